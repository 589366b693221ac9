"""
Jacobi operator assembly and spectral classification.

For a tensor `R` and a vector `X` the Jacobi operator `J_X(Y) = R(Y, X)X` is symmetric, kills `X` and preserves `X^perp`.
Its restriction to `X^perp` is the reduced operator. Everything here is computed from eigenvalues of the reduced operator, divided by `g(X, X)`, so the values do not depend on the length of `X`.

- [`spectral_profile`][jacobilab.analyses.spectral.spectral_profile] clusters the reduced spectrum at one point.
- [`classify_k_root`][jacobilab.analyses.spectral.classify_k_root], [`osserman_test`][jacobilab.analyses.spectral.osserman_test] and [`k_stein_invariants`][jacobilab.analyses.spectral.k_stein_invariants] sample the unit sphere.
- [`eigenspaces`][jacobilab.analyses.spectral.eigenspaces] splits `X^perp` into the eigenspaces of a two-root tensor.

Sampling can refute a property but never prove it, so verdicts read "consistent with k-root at N samples".
"""

from __future__ import annotations

import logging
from functools import partial

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from jacobilab.exceptions import NotTwoRoot, ZeroVector
from jacobilab.linalg import (
    DEFAULT_REL_TOL,
    EigenClusterSet,
    SymmetricMatrix,
    cluster_eigenvalues,
    orthonormal_complement,
    sample_unit_sphere,
    sym_eigen,
)
from jacobilab.tensors import AlgebraicCurvatureTensor
from jacobilab.utils import Matrix, Vector, _parallel_map

logger = logging.getLogger(__name__)


class SamplingParams(BaseModel):
    """Echo of the sampling inputs of an analysis."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    samples: int = Field(ge=1)
    seed: int = Field(ge=0)
    rel_tol: float = Field(gt=0)


class SpectralProfile(BaseModel):
    """Clustered reduced spectrum at one point.

    With exactly two clusters, `mu_x` is the smaller value and `nu_x` the larger, with multiplicities `p` and `q`.
    `swapped` is set when `q > p`, in which case the usual normalization `p >= q` holds for `-R`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point: Vector
    clusters: EigenClusterSet
    mu_x: float | None = None
    nu_x: float | None = None
    p: int | None = None
    q: int | None = None
    swapped: bool = False

    @property
    def is_two_root(self) -> bool:
        return self.clusters.count == 2


class EigenspacePair(BaseModel):
    """Orthonormal bases, one vector per row, of the two eigenspaces of a two-root reduced operator."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point: Vector
    mu_x: float
    nu_x: float
    m_basis: Matrix
    n_basis: Matrix
    residual: float


class KRootVerdict(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int | None
    multiplicities: tuple[int, ...] | None
    witnesses: tuple[Vector, Vector] | None = None
    sampling: SamplingParams

    @computed_field
    @property
    def statement(self) -> str:
        if self.k is None:
            return f"varying number of eigenvalues across {self.sampling.samples} samples"
        return f"consistent with {self.k}-root at {self.sampling.samples} samples"


class OssermanVerdict(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    osserman: bool
    max_deviation: float
    tolerance: float
    witnesses: tuple[Vector, Vector]
    witness_spectra: tuple[tuple[float, ...], tuple[float, ...]]
    sampling: SamplingParams


class SteinInvariants(BaseModel):
    """Sample means of `tr(J_X^k)` over unit `X`, with their spread and the two-root cross-check."""

    model_config = ConfigDict(frozen=True)

    constants: tuple[float, ...]
    deviations: tuple[float, ...]
    formula_values: tuple[float, ...] | None = None
    formula_deviation: float | None = None
    sampling: SamplingParams

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


class AnalysisReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    k_root: KRootVerdict
    osserman: OssermanVerdict
    stein: SteinInvariants
    constant_curvature: float | None = None
    jacobi_dual: bool | None = None
    sampling: SamplingParams


# Jacobi operators
# ---


def jacobi_matrix(R: AlgebraicCurvatureTensor, x: np.ndarray) -> SymmetricMatrix:
    """Matrix of `J_X`: `(J_X)[a, b] = sum R[b, i, j, a] x_i x_j`."""

    x = np.asarray(x, dtype=float)
    return SymmetricMatrix(entries=np.einsum("bija,i,j->ab", R.components, x, x))


def _complement(x: np.ndarray) -> np.ndarray:
    try:
        return orthonormal_complement(x)
    except ZeroVector as exc:
        raise ZeroVector("The Jacobi operator is only reduced at a nonzero vector") from exc


def reduced_jacobi(R: AlgebraicCurvatureTensor, x: np.ndarray) -> SymmetricMatrix:
    """Matrix of `J_X` restricted to `X^perp`, in the basis of `orthonormal_complement(x)`.

    :raises ZeroVector: If `x` vanishes
    """
    basis = _complement(x)
    full = jacobi_matrix(R, x).entries
    return SymmetricMatrix(entries=basis @ full @ basis.T)


def _reduced_eigen(
    R: AlgebraicCurvatureTensor, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Reduced eigenvalues divided by `g(x, x)`, and eigenvectors in ambient coordinates (rows)."""

    x = np.asarray(x, dtype=float)
    basis = _complement(x)
    full = jacobi_matrix(R, x).entries
    values, vectors = sym_eigen(SymmetricMatrix(entries=basis @ full @ basis.T))
    return values / float(x @ x), (basis.T @ vectors).T


def _profile_from_values(
    x: np.ndarray, values: np.ndarray, rel_tol: float
) -> SpectralProfile:
    clusters = cluster_eigenvalues(values, rel_tol)
    if clusters.count != 2:
        return SpectralProfile(point=x, clusters=clusters)
    (low, p), (high, q) = ((c.value, c.multiplicity) for c in clusters.clusters)
    return SpectralProfile(
        point=x, clusters=clusters, mu_x=low, nu_x=high, p=p, q=q, swapped=q > p
    )


def spectral_profile(
    R: AlgebraicCurvatureTensor, x: np.ndarray, rel_tol: float = DEFAULT_REL_TOL
) -> SpectralProfile:
    """Cluster the reduced spectrum at `x`.

    :raises ZeroVector: If `x` vanishes
    """
    x = np.asarray(x, dtype=float)
    values, _ = _reduced_eigen(R, x)
    return _profile_from_values(x, values, rel_tol)


def eigenspaces(
    R: AlgebraicCurvatureTensor, x: np.ndarray, rel_tol: float = DEFAULT_REL_TOL
) -> EigenspacePair:
    """Split `X^perp` into the eigenspaces of the two roots.

    `m_basis` spans the eigenspace of the smaller root, `n_basis` that of the larger.

    :raises NotTwoRoot: If the reduced spectrum does not have exactly two clusters
    """
    x = np.asarray(x, dtype=float)
    values, vectors = _reduced_eigen(R, x)
    profile = _profile_from_values(x, values, rel_tol)
    if not profile.is_two_root or profile.p is None:
        raise NotTwoRoot(
            f"Reduced Jacobi operator has {profile.clusters.count} distinct eigenvalues, not 2",
            stage="eigenspaces",
            magnitude=float(abs(profile.clusters.count - 2)),
            witness=[x],
        )

    m_basis, n_basis = vectors[: profile.p], vectors[profile.p :]
    jx = jacobi_matrix(R, x).entries
    ex = float(x @ x)
    residual = max(
        float(np.max(np.abs(m_basis @ jx - ex * profile.mu_x * m_basis))),
        float(np.max(np.abs(n_basis @ jx - ex * profile.nu_x * n_basis))),
    )
    return EigenspacePair(
        point=x,
        mu_x=float(profile.mu_x),
        nu_x=float(profile.nu_x),
        m_basis=m_basis,
        n_basis=n_basis,
        residual=residual,
    )


# Sampling analyses
# ---


def sample_profiles(
    R: AlgebraicCurvatureTensor,
    samples: int,
    seed: int,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> tuple[np.ndarray, list[SpectralProfile]]:
    """Profiles at `samples` points drawn once from the seeded stream."""

    points = sample_unit_sphere(R.dim, samples, seed)
    profiles = _parallel_map(partial(spectral_profile, R, rel_tol=rel_tol), points, threads)
    return points, profiles


def classify_k_root(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> KRootVerdict:
    """Count distinct reduced eigenvalues at every sample.

    The verdict is `k` when every sample has `k` clusters with the same multiplicities, and varying otherwise, with the first disagreeing pair as witnesses.
    """
    points, profiles = sample_profiles(R, samples, seed, rel_tol, threads)
    sampling = SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol)

    first = profiles[0].clusters.multiplicities
    for point, profile in zip(points, profiles, strict=True):
        if profile.clusters.multiplicities != first:
            logger.info("k-root: varying (%s vs %s)", first, profile.clusters.multiplicities)
            return KRootVerdict(
                k=None, multiplicities=None, witnesses=(points[0], point), sampling=sampling
            )

    logger.info("k-root: k=%s multiplicities=%s", len(first), first)
    return KRootVerdict(k=len(first), multiplicities=first, sampling=sampling)


def osserman_test(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> OssermanVerdict:
    """Compare sorted reduced spectra across samples.

    The deviation is the largest range of any sorted eigenvalue coordinate; the witnesses are the two samples realizing it.
    """
    if samples < 2:
        raise ValueError("The Osserman test needs at least two samples")

    points = sample_unit_sphere(R.dim, samples, seed)
    spectra = np.array(
        _parallel_map(lambda x: _reduced_eigen(R, x)[0], points, threads)
    )
    ranges = spectra.max(axis=0) - spectra.min(axis=0)
    worst = int(np.argmax(ranges))
    hi, lo = int(np.argmax(spectra[:, worst])), int(np.argmin(spectra[:, worst]))
    deviation = float(ranges[worst])
    tolerance = rel_tol * max(1.0, float(np.max(np.abs(spectra))))

    verdict = OssermanVerdict(
        osserman=deviation <= tolerance,
        max_deviation=deviation,
        tolerance=tolerance,
        witnesses=(points[hi], points[lo]),
        witness_spectra=(tuple(spectra[hi].tolist()), tuple(spectra[lo].tolist())),
        sampling=SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol),
    )
    logger.info("Osserman: %s (deviation %s)", verdict.osserman, deviation)
    return verdict


def k_stein_invariants(
    R: AlgebraicCurvatureTensor,
    k_max: int = 4,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> SteinInvariants:
    """Mean and spread of `tr(J_X^k)` for `k = 1..k_max` over unit samples.

    When every sample is two-root with the same roots, the constants are cross-checked against `p mu^k + q nu^k`.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be positive. Found {k_max}")

    points, profiles = sample_profiles(R, samples, seed, rel_tol, threads)

    def traces(x: np.ndarray) -> list[float]:
        jx = jacobi_matrix(R, x).entries
        return [float(np.trace(np.linalg.matrix_power(jx, k))) for k in range(1, k_max + 1)]

    table = np.array(_parallel_map(traces, points, threads))
    constants = table.mean(axis=0)
    deviations = table.max(axis=0) - table.min(axis=0)

    formula_values = None
    formula_deviation = None
    if all(p.is_two_root for p in profiles):
        mus = np.array([p.mu_x for p in profiles])
        nus = np.array([p.nu_x for p in profiles])
        pq = {(p.p, p.q) for p in profiles}
        tol = rel_tol * max(1.0, float(np.max(np.abs(nus))), float(np.max(np.abs(mus))))
        if len(pq) == 1 and np.ptp(mus) <= tol and np.ptp(nus) <= tol:
            p, q = pq.pop()
            mu, nu = float(mus.mean()), float(nus.mean())
            formula = np.array([p * mu**k + q * nu**k for k in range(1, k_max + 1)])
            formula_values = tuple(formula.tolist())
            formula_deviation = float(np.max(np.abs(formula - constants)))

    return SteinInvariants(
        constants=tuple(constants.tolist()),
        deviations=tuple(deviations.tolist()),
        formula_values=formula_values,
        formula_deviation=formula_deviation,
        sampling=SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol),
    )
