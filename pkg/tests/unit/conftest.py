"""Unit testing fixtures and model tensor factories."""

from collections.abc import Callable

import numpy as np
import pytest

from jacobilab.tensors import (
    AlgebraicCurvatureTensor,
    build_r0,
    build_rp,
    skew_from_frame,
)

# Left multiplication by i, j, k on the quaternions, basis (1, i, j, k), columns are the images.
_QUATERNION_UNITS: tuple[list[list[float]], ...] = (
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
)


def quaternion_structures() -> list[np.ndarray]:
    """Three anticommuting orthogonal complex structures on `R^8 = H + H`."""

    out = []
    for unit in _QUATERNION_UNITS:
        block = np.array(unit, dtype=float)
        out.append(np.block([[block, np.zeros((4, 4))], [np.zeros((4, 4)), block]]))
    return out


@pytest.fixture
def quaternionic_model() -> Callable[..., AlgebraicCurvatureTensor]:
    """Factory for `mu R^0 - c/3 sum R^J` in dimension 8.

    Its reduced Jacobi operator has roots `mu` with multiplicity 4 and `mu + c` with multiplicity 3.
    """

    def _make(mu: float = 1.0, c: float = 2.0) -> AlgebraicCurvatureTensor:
        tensor = mu * build_r0(8)
        for j in quaternion_structures():
            tensor = tensor + (-c / 3.0) * build_rp(j)
        return tensor

    return _make


@pytest.fixture
def rank_defect_model(
    make_two_root_model: Callable[..., AlgebraicCurvatureTensor],
) -> Callable[..., AlgebraicCurvatureTensor]:
    """Factory for the `nu = (3, 2, 1)` model plus `-delta/3 R^Q`.

    `Q` pairs `(E_1, E_3), (E_2, E_4), (E_5, E_6)`, so row 0 of `Q` is orthogonal to row 0 of `P` and the first diagonal form picks up a second eigenvalue of exactly `delta`.
    """

    def _make(delta: float = 1e-3) -> AlgebraicCurvatureTensor:
        base = make_two_root_model(dim=6, mu=1.0, nus=(3.0, 2.0, 1.0))
        frame = np.eye(6)[[0, 2, 1, 3, 4, 5]]
        q = skew_from_frame(frame, (1.0, 1.0, 1.0))
        return base + (-delta / 3.0) * build_rp(q)

    return _make
