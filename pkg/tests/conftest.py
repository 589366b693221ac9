"""Shared pytest fixtures common to all test scopes."""

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from jacobilab.tensors import (
    AlgebraicCurvatureTensor,
    TwoRootModelParams,
    build_two_root_model,
    dump_tensor,
    random_frame,
)


@pytest.fixture
def write_tensor(tmp_path: Path) -> Callable[..., Path]:
    """Write a tensor file into the test directory and return its path."""

    def _write(tensor: AlgebraicCurvatureTensor, name: str = "tensor.json") -> Path:
        path = tmp_path / name
        dump_tensor(tensor, path)
        return path

    return _write


@pytest.fixture
def make_two_root_params() -> Callable[..., TwoRootModelParams]:
    """Factory for two-root model parameters with overridable fields.

    `frame_seed` draws a random orthonormal frame; otherwise the standard basis is used.
    """

    def _make(
        dim: int = 6,
        mu: float = 1.0,
        nus: tuple[float, ...] | None = None,
        sign: int | str = 1,
        frame_seed: int | None = None,
    ) -> TwoRootModelParams:
        return TwoRootModelParams(
            dim=dim,
            mu=mu,
            nus=nus if nus is not None else (3.0,) * (dim // 2),
            frame=None if frame_seed is None else random_frame(dim, frame_seed),
            sign=sign,
        )

    return _make


@pytest.fixture
def make_two_root_model(
    make_two_root_params: Callable[..., TwoRootModelParams],
) -> Callable[..., AlgebraicCurvatureTensor]:
    """Factory for two-root model tensors, same arguments as `make_two_root_params`."""

    def _make(**kwargs) -> AlgebraicCurvatureTensor:
        return build_two_root_model(make_two_root_params(**kwargs))

    return _make


@pytest.fixture
def random_curvature() -> Callable[[int, int], AlgebraicCurvatureTensor]:
    """Factory for a generic algebraic curvature tensor of unit size.

    Built from a random symmetric form `S` as `S(y, z) S(x, w) - S(x, z) S(y, w)`, which has every curvature symmetry.
    """

    def _make(dim: int, seed: int) -> AlgebraicCurvatureTensor:
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((dim, dim))
        s = 0.5 * (a + a.T)
        comps = np.einsum("jk,il->ijkl", s, s) - np.einsum("ik,jl->ijkl", s, s)
        comps /= np.max(np.abs(comps))
        return AlgebraicCurvatureTensor.from_array(comps)

    return _make


@pytest.fixture
def perturbed(
    random_curvature: Callable[[int, int], AlgebraicCurvatureTensor],
) -> Callable[..., AlgebraicCurvatureTensor]:
    """Add a generic tensor of size `delta` to a tensor."""

    def _make(
        tensor: AlgebraicCurvatureTensor, delta: float = 1e-3, seed: int = 99
    ) -> AlgebraicCurvatureTensor:
        return tensor + delta * random_curvature(tensor.dim, seed)

    return _make
