"""
Run configuration and orchestration.

[`JacobiLab`][jacobilab.lab.JacobiLab] holds the sampling defaults shared by every analysis and runs them against a tensor.
The command line interface reads its defaults from a default instance, so library and CLI runs with the same inputs produce the same reports.

Pair the lab with a tensor built by the constructors in [`jacobilab.tensors`][jacobilab.tensors] or read with [`load_tensor`][jacobilab.tensors.load_tensor].
"""

import logging
from enum import StrEnum

import numpy as np

from jacobilab.analyses.admissibility import DimensionScreen, dimension_screen, rho
from jacobilab.analyses.factorizer import (
    FACTOR_REL_TOL,
    FactorizationReport,
    classify_two_root_simple,
)
from jacobilab.analyses.probes import ProbeReport, jacobi_dual, probe_report
from jacobilab.analyses.spectral import (
    AnalysisReport,
    SamplingParams,
    classify_k_root,
    k_stein_invariants,
    osserman_test,
)
from jacobilab.linalg import DEFAULT_REL_TOL
from jacobilab.tensors import (
    AlgebraicCurvatureTensor,
    TwoRootModelParams,
    build_r0,
    build_rp,
    build_two_root_model,
    constant_curvature,
    random_frame,
    skew_from_frame,
)
from jacobilab.utils import _thread_count

logger = logging.getLogger(__name__)


class MODELS(StrEnum):
    R0 = "r0"
    RP = "rp"
    TWO_ROOT = "two-root"


class JacobiLab:
    """Sampling defaults plus the analyses that use them."""

    def __init__(
        self,
        samples: int = 256,
        seed: int = 0,
        rel_tol: float = DEFAULT_REL_TOL,
        factor_tol: float = FACTOR_REL_TOL,
        k_max: int = 4,
        threads: int | None = None,
    ) -> None:
        """
        :param samples: Number of points sampled on the unit sphere, defaults to 256
        :type samples: int, optional
        :param seed: Seed of the sample stream, defaults to 0
        :type seed: int, optional
        :param rel_tol: Relative tolerance of the spectral analyses and probes, defaults to 1e-6
        :type rel_tol: float, optional
        :param factor_tol: Relative tolerance of the factorization pipeline, defaults to 1e-7
        :type factor_tol: float, optional
        :param k_max: Highest power in the trace invariants, defaults to 4
        :type k_max: int, optional
        :param threads: Worker threads; `None` reads `JACOBILAB_THREADS`, defaults to None
        :type threads: int | None, optional
        """
        # Validates the ranges
        SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol)
        SamplingParams(samples=samples, seed=seed, rel_tol=factor_tol)

        self.samples = samples
        self.seed = seed
        self.rel_tol = rel_tol
        self.factor_tol = factor_tol
        self.k_max = k_max
        self.threads = _thread_count(threads)

    def build(
        self,
        model: MODELS | str,
        dim: int,
        mu: float = 0.0,
        nus: list[float] | tuple[float, ...] | None = None,
        sign: int | str = 1,
        frame_seed: int | None = None,
    ) -> AlgebraicCurvatureTensor:
        """Build a model tensor.

        :param model: `r0`, `rp` or `two-root`
        :type model: MODELS | str
        :param dim: Dimension
        :type dim: int
        :param mu: Shift of the two-root model, defaults to 0
        :type mu: float, optional
        :param nus: Constants of `P` on the frame, required for `rp` and `two-root`
        :type nus: list[float] | tuple[float, ...] | None, optional
        :param sign: Global sign of the two-root model, defaults to +1
        :type sign: int | str, optional
        :param frame_seed: Seed of a random frame; `None` uses the standard basis
        :type frame_seed: int | None, optional
        :raises ValueError: On parameters that do not fit the model
        :return: Tensor
        :rtype: AlgebraicCurvatureTensor
        """
        model = MODELS(model)
        if model is MODELS.R0:
            return build_r0(dim)

        if nus is None:
            raise ValueError(f"Model {model.value} needs --nus")
        for i, nu in enumerate(nus, start=1):
            if not nu > 0:
                raise ValueError(f"nu_{i} = {nu:g} must be positive")
        frame =None if frame_seed is None else random_frame(dim, frame_seed)

        if model is MODELS.RP:
            if dim % 2 or len(nus) != dim // 2:
                raise ValueError(f"Model rp needs an even dimension and {dim // 2} values of nu")
            basis = frame if frame is not None else np.eye(dim)
            return build_rp(skew_from_frame(basis, nus))

        params = TwoRootModelParams(dim=dim, mu=mu, nus=tuple(nus), frame=frame, sign=sign)
        return build_two_root_model(params)

    def analyze(self, tensor: AlgebraicCurvatureTensor) -> AnalysisReport:
        """Spectral classification of a tensor: roots, Osserman test, trace invariants and duality."""

        args = (self.samples, self.seed, self.rel_tol)
        verdict = classify_k_root(tensor, *args, threads=self.threads)
        report = AnalysisReport(
            dim=tensor.dim,
            k_root=verdict,
            osserman=osserman_test(tensor, *args, threads=self.threads),
            stein=k_stein_invariants(tensor, self.k_max, *args, threads=self.threads),
            constant_curvature=constant_curvature(tensor, self.rel_tol) if verdict.k == 1 else None,
            jacobi_dual=jacobi_dual(tensor, *args, threads=self.threads),
            sampling=SamplingParams(samples=self.samples, seed=self.seed, rel_tol=self.rel_tol),
        )
        logger.info("analysis: %s", verdict.statement)
        return report

    def probe(self, tensor: AlgebraicCurvatureTensor) -> ProbeReport:
        """Structural identity checks."""

        return probe_report(tensor, self.samples, self.seed, self.rel_tol, self.threads)

    def factorize(self, tensor: AlgebraicCurvatureTensor) -> FactorizationReport:
        """Factorization pipeline for two-root tensors with a simple root."""

        return classify_two_root_simple(
            tensor, self.samples, self.seed, self.factor_tol, self.threads
        )

    def rho(self, n: int) -> int:
        return rho(n)

    def screen(self, n: int) -> DimensionScreen:
        return dimension_screen(n)
