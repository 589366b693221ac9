"""
Factorization of two-root tensors with a simple root.

In dimension `n > 4`, a two-root tensor whose Jacobi operators have a simple root is `sign * (-1/3 R^P + mu R^0)` for a skew-adjoint `P`.
The pipeline recovers every piece of that description from the tensor alone:

1. screen the dimension, classify the spectrum and check the multiplicities,
2. read `mu` off the multiple root ([`estimate_mu`][jacobilab.analyses.factorizer.estimate_mu]),
3. shift by `mu`; the shifted Jacobi operator is `sign * (PX)(PX)^T`, so every diagonal coefficient form has rank one and its top eigenpair gives a row of `P` ([`extract_p`][jacobilab.analyses.factorizer.extract_p]),
4. diagonalize `-P^2` into the canonical frame ([`canonical_frame`][jacobilab.analyses.factorizer.canonical_frame]),
5. rebuild the tensor and compare ([`reconstruct`][jacobilab.analyses.factorizer.reconstruct]).

Each stage either passes or raises a [`Refutation`][jacobilab.exceptions.Refutation] that names the stage.
[`classify_two_root_simple`][jacobilab.analyses.factorizer.classify_two_root_simple] runs the stages in order and reports the first refutation.

The sign is reported explicitly and the tensor is never renormalized: a certified structure satisfies `R = sign * (-1/3 R^P + mu R^0)`.
Conventions that normalize `sign = +1` describe `sign * R` with the same `mu` and `P`.
"""

from __future__ import annotations

import logging
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from jacobilab.analyses.admissibility import (
    MultiplicityPattern,
    ScreenCode,
    admissible,
    dimension_screen,
)
from jacobilab.analyses.spectral import (
    SamplingParams,
    classify_k_root,
    jacobi_matrix,
    sample_profiles,
)
from jacobilab.exceptions import (
    DimensionScreenFailed,
    EigenvectorMismatch,
    MultiplicityInadmissible,
    MuNotConstant,
    NotSimpleRootTwoRoot,
    NotTwoRoot,
    OddMultiplicity,
    RankExceeded,
    Refutation,
    SignInconsistency,
    SingularP,
    SkewnessViolation,
    ZeroSimpleRoot,
)
from jacobilab.linalg import cluster_eigenvalues, sample_unit_sphere, worker_seed
from jacobilab.tensors import (
    AlgebraicCurvatureTensor,
    SkewEndomorphism,
    build_rp,
    scale,
    shift,
)
from jacobilab.utils import Matrix, Tensor4, Vector

logger = logging.getLogger(__name__)

FACTOR_REL_TOL = 1e-7
VERIFY_SAMPLES = 16


class FactorizationStage(StrEnum):
    DIMENSION_SCREEN = "dimension_screen"
    CLASSIFY_K_ROOT = "classify_k_root"
    MULTIPLICITY_SCREEN = "multiplicity_screen"
    ESTIMATE_MU = "estimate_mu"
    EXTRACT_P = "extract_p"
    CANONICAL_FRAME = "canonical_frame"
    RECONSTRUCT = "reconstruct"


class SkewStructure(BaseModel):
    """Recovered description `R = sign * (-1/3 R^P + mu R^0)`.

    `frame` holds the rows `E_1, F_1, ..., E_m, F_m` with `P(E_i) = sqrt(nu_i) F_i`, once [`canonical_frame`][jacobilab.analyses.factorizer.canonical_frame] has run.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: SkewEndomorphism
    sign: int
    mu: float
    frame: Matrix | None = None
    nus: tuple[float, ...] | None = None

    @field_serializer("p")
    def _serialize_p(self, value: SkewEndomorphism) -> list:
        return value.matrix.tolist()

    @property
    def dim(self) -> int:
        return self.p.dim


class QuadraticFormFamily(BaseModel):
    """Coefficient forms of the Jacobi operator: `J_X[a, b] = X^T A[a, b] X`, each `A[a, b]` symmetric."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    forms: Tensor4

    @property
    def dim(self) -> int:
        return int(self.forms.shape[0])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("abij,i,j->ab", self.forms, x, x)

    def trace_form(self) -> np.ndarray:
        """`sum_a A[a, a]`, so that `X^T (sum_a A[a, a]) X = tr J_X`."""

        return np.einsum("aaij->ij", self.forms)


class MuEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    deviation: float
    sampling: SamplingParams


class NuBlock(BaseModel):
    """Eigenspace of `-P^2` for one value of `nu`, spanned by the rows of `basis`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nu: float
    basis: Matrix


class RefutationInfo(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stage: str
    error: str
    message: str
    magnitude: float | None = None
    witness: tuple[Vector, ...] = ()

    @classmethod
    def from_exception(cls, exc: Refutation) -> RefutationInfo:
        return cls(
            stage=exc.stage,
            error=type(exc).__name__,
            message=exc.message,
            magnitude=exc.magnitude,
            witness=tuple(exc.witness),
        )


class SignConventions(BaseModel):
    """Both readings of a certified structure."""

    model_config = ConfigDict(frozen=True)

    explicit: str = "R = sign * (-1/3 R^P + mu R^0)"
    normalized: str = "sign * R = -1/3 R^P + mu R^0, so the larger root of sign * R is the simple one"


class FactorizationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    certified: bool
    stage: FactorizationStage
    pattern: tuple[int, int] | None = None
    structure: SkewStructure | None = None
    nu_blocks: tuple[NuBlock, ...] = ()
    residual: float | None = None
    mu_deviation: float | None = None
    nu_deviation: float | None = None
    refutation: RefutationInfo | None = None
    conventions: SignConventions = Field(default_factory=SignConventions)
    sampling: SamplingParams


class StructureFile(BaseModel):
    """JSON form of a certified structure."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sign: int
    mu: float
    nus: tuple[float, ...]
    P: Matrix
    frame: Matrix
    residual: float

    @classmethod
    def from_report(cls, report: FactorizationReport) -> StructureFile:
        s = report.structure
        if not report.certified or s is None or s.frame is None or s.nus is None:
            raise ValueError("Only certified structures can be written")
        return cls(
            sign=s.sign,
            mu=s.mu,
            nus=s.nus,
            P=s.p.matrix,
            frame=s.frame,
            residual=float(report.residual or 0.0),
        )


# Stages
# ---


def quadratic_form_family(R: AlgebraicCurvatureTensor) -> QuadraticFormFamily:
    """Symmetrized coefficients: `A[a, b, i, j] = (R[b, i, j, a] + R[b, j, i, a]) / 2`."""

    c = R.components
    forms = 0.5 * (np.einsum("bija->abij", c) + np.einsum("bjia->abij", c))
    return QuadraticFormFamily(forms=forms)


def estimate_mu(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = FACTOR_REL_TOL,
    threads: int | None = None,
) -> MuEstimate:
    """Estimate the multiple root and certify that it is constant.

    :raises NotSimpleRootTwoRoot: If `n <= 4`, or some sample is not two-root with a simple root
    :raises MuNotConstant: If the multiple root varies across samples
    """
    n = R.dim
    stage = FactorizationStage.ESTIMATE_MU.value
    if n <= 4:
        raise NotSimpleRootTwoRoot(
            f"The factorization of two-root tensors with a simple root requires dimension n > 4. Found n={n}",
            stage=stage,
        )

    points, profiles = sample_profiles(R, samples, seed, rel_tol, threads)
    mus = []
    for x, profile in zip(points, profiles, strict=True):
        if not profile.is_two_root or sorted((profile.p, profile.q)) != [1, n - 2]:
            raise NotSimpleRootTwoRoot(
                f"Multiplicities {profile.clusters.multiplicities} at a sample are not (n-2, 1) = ({n - 2}, 1)",
                stage=stage,
                witness=[x],
            )
        mus.append(profile.mu_x if profile.p == n - 2 else profile.nu_x)

    arr = np.array(mus, dtype=float)
    deviation = float(np.ptp(arr))
    if deviation > rel_tol * R.scale:
        lo, hi = int(np.argmin(arr)), int(np.argmax(arr))
        raise MuNotConstant(
            f"The multiple root varies by {deviation:.3e} across samples",
            stage=stage,
            magnitude=deviation,
            witness=[points[lo], points[hi]],
        )

    estimate = MuEstimate(
        mu=float(arr.mean()),
        deviation=deviation,
        sampling=SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol),
    )
    logger.debug("estimated mu=%s (deviation %s)", estimate.mu, deviation)
    return estimate


def _first_significant(v: np.ndarray, tol: float) -> int:
    idx = np.flatnonzero(np.abs(v) > tol)
    return int(idx[0]) if idx.size else 0


def extract_p(
    R: AlgebraicCurvatureTensor,
    mu: float,
    rel_tol: float = FACTOR_REL_TOL,
    samples: int = VERIFY_SAMPLES,
    seed: int = 0,
) -> SkewStructure:
    """Recover `sign` and `P` from the tensor shifted by its multiple root.

    After the shift `J'_X = sign * (PX)(PX)^T`, so `sign * A[a, a] = p_a p_a^T` where `p_a` is row `a` of `P`.
    Rows are taken from top eigenpairs; their relative signs come from the off-diagonal forms `sign * A[a0, b] = (p_a0 p_b^T + p_b p_a0^T) / 2` against an anchor row.
    The anchor is row 0 unless it vanishes, in which case it is the row with the largest form. Its first significant coordinate is made positive.

    :param R: Tensor
    :type R: AlgebraicCurvatureTensor
    :param mu: Multiple root as estimated, so `sign * mu` in the parametrization
    :type mu: float
    :param rel_tol: Relative tolerance, scaled by `1 + max|R|`
    :type rel_tol: float
    :param samples: Number of points at which the eigenvector property of `P` is verified
    :type samples: int
    :param seed: Seed of the verification points
    :type seed: int
    :raises ZeroSimpleRoot: If the shifted tensor has no simple root
    :raises RankExceeded: If a diagonal form has rank above one or is not semidefinite
    :raises SignInconsistency: If no choice of row signs reproduces the off-diagonal forms
    :raises SkewnessViolation: If the recovered matrix is not skew
    :raises EigenvectorMismatch: If `PX` is not an eigenvector of the shifted operator
    :return: Structure without frame
    :rtype: SkewStructure
    """
    stage = FactorizationStage.EXTRACT_P.value
    n = R.dim
    tol = rel_tol * R.scale
    family = quadratic_form_family(shift(R, mu))
    forms = family.forms

    trace_values = np.linalg.eigvalsh(family.trace_form())
    dominant = float(trace_values[np.argmax(np.abs(trace_values))])
    if abs(dominant) <= tol:
        raise ZeroSimpleRoot(
            "The shifted tensor vanishes; there is no simple root",
            stage=stage,
            magnitude=abs(dominant),
        )
    sigma = 1 if dominant > 0 else -1

    rows = np.zeros((n, n))
    for a in range(n):
        values, vectors = np.linalg.eigh(sigma * forms[a, a])
        extra = max(abs(float(values[-2])), float(-values[0]))
        if extra > tol:
            raise RankExceeded(
                f"Form A[{a}, {a}] has a second eigenvalue of size {extra:.3e}",
                stage=stage,
                magnitude=extra,
                witness=[vectors[:, 0] if -values[0] > abs(values[-2]) else vectors[:, -2]],
            )
        if values[-1] > tol:
            rows[a] = np.sqrt(values[-1]) * vectors[:, -1]

    norms = np.array([np.max(np.abs(forms[a, a])) for a in range(n)])
    anchor = 0 if norms[0] > tol else int(np.argmax(norms))
    lead = _first_significant(rows[anchor], np.sqrt(tol))
    if rows[anchor, lead] < 0:
        rows[anchor] = -rows[anchor]

    for b in range(n):
        if b == anchor:
            continue
        target = sigma * forms[anchor, b]
        plus = np.outer(rows[anchor], rows[b])
        minus = np.max(np.abs(target + 0.5 * (plus + plus.T)))
        if minus < np.max(np.abs(target - 0.5 * (plus + plus.T))):
            rows[b] = -rows[b]

    predicted = 0.5 * (
        np.einsum("ai,bj->abij", rows, rows) + np.einsum("bi,aj->abij", rows, rows)
    )
    mismatch = float(np.max(np.abs(sigma * forms - predicted)))
    if mismatch > tol:
        raise SignInconsistency(
            f"No choice of row signs reproduces the coefficient forms, mismatch {mismatch:.3e}",
            stage=stage,
            magnitude=mismatch,
        )

    skewness = float(np.max(np.abs(rows + rows.T)))
    if skewness > tol:
        raise SkewnessViolation(
            f"Recovered matrix is not skew, max|P + P^T| = {skewness:.3e}",
            stage=stage,
            magnitude=skewness,
        )
    p = SkewEndomorphism(matrix=0.5 * (rows - rows.T))

    shifted = shift(R, mu)
    for x in sample_unit_sphere(n, samples, worker_seed(seed, 2)):
        px = p.matrix @ x
        residual = float(
            np.linalg.norm(jacobi_matrix(shifted, x).entries @ px - sigma * (px @ px) * px)
        )
        if residual > tol * max(1.0, float(px @ px)):
            raise EigenvectorMismatch(
                f"PX is not an eigenvector of the shifted Jacobi operator, residual {residual:.3e}",
                stage=stage,
                magnitude=residual,
                witness=[x],
            )

    logger.debug("extracted P with sign %s", sigma)
    return SkewStructure(p=p, sign=sigma, mu=sigma * mu)


def canonical_frame(
    P: SkewEndomorphism, rel_tol: float = FACTOR_REL_TOL
) -> tuple[np.ndarray, tuple[float, ...]]:
    """Frame `E_1, F_1, ..., E_m, F_m` with `P(E_i) = sqrt(nu_i) F_i`, `nu_1 >= ... >= nu_m`.

    `-P^2 = P^T P` is diagonalized and each eigenvalue cluster is split into pairs `(E, PE / |PE|)` by Gram-Schmidt on the eigensolver output.
    Inside a cluster the frame is not unique; only the values of `nu` are.

    :raises SingularP: If some `nu` is not positive
    :raises OddMultiplicity: If an eigenvalue of `-P^2` has odd multiplicity
    :return: Frame rows and the values of `nu`
    :rtype: tuple[np.ndarray, tuple[float, ...]]
    """
    stage = FactorizationStage.CANONICAL_FRAME.value
    values, vectors = np.linalg.eigh(P.gram())
    top = max(1.0, float(values[-1]))
    if values[0] <= rel_tol * top:
        raise SingularP(
            f"-P^2 has an eigenvalue {values[0]:.3e}, so P is singular",
            stage=stage,
            magnitude=float(values[0]),
            witness=[vectors[:, 0]],
        )

    clusters = cluster_eigenvalues(values, rel_tol)
    frame: list[np.ndarray] = []
    nus: list[float] = []
    start = 0
    blocks = []
    for cluster in clusters.clusters:
        blocks.append((cluster, vectors[:, start : start + cluster.multiplicity]))
        start += cluster.multiplicity

    for cluster, block in reversed(blocks):
        if cluster.multiplicity % 2:
            raise OddMultiplicity(
                f"-P^2 has eigenvalue {cluster.value:.6g} with odd multiplicity {cluster.multiplicity}",
                stage=stage,
                magnitude=float(cluster.multiplicity),
            )
        chosen: list[np.ndarray] = []
        for column in block.T:
            v = column.copy()
            for _ in range(2):
                for u in frame + chosen:
                    v -= (u @ v) * u
            if np.linalg.norm(v) < 0.5:
                continue
            v /= np.linalg.norm(v)
            if v[_first_significant(v, 1e-12)] < 0:
                v = -v
            f = P.matrix @ v
            f /= np.linalg.norm(f)
            chosen += [v, f]
            nus.append(cluster.value)
            if len(chosen) == cluster.multiplicity:
                break
        frame += chosen

    logger.debug("canonical frame with nus %s", nus)
    return np.array(frame), tuple(nus)


def reconstruct(structure: SkewStructure) -> AlgebraicCurvatureTensor:
    """`sign * (-1/3 R^P + mu R^0)`."""

    return scale(shift(scale(build_rp(structure.p), -1.0 / 3.0), -structure.mu), structure.sign)


def ps_eigenspaces(structure: SkewStructure) -> list[NuBlock]:
    """Eigenspaces of `-P^2`, one per distinct `nu`, in decreasing order of `nu`."""

    frame, nus = structure.frame, structure.nus
    if frame is None or nus is None:
        frame, nus = canonical_frame(structure.p)

    blocks: list[NuBlock] = []
    for i, nu in enumerate(nus):
        pair = frame[2 * i : 2 * i + 2]
        if blocks and blocks[-1].nu == nu:
            blocks[-1] = NuBlock(nu=nu, basis=np.vstack([blocks[-1].basis, pair]))
        else:
            blocks.append(NuBlock(nu=nu, basis=pair))
    return blocks


def predicted_nu(structure: SkewStructure, x: np.ndarray) -> float:
    """`g(PX, PX) / g(X, X)`."""

    x = np.asarray(x, dtype=float)
    px = structure.p.matrix @ x
    return float(px @ px) / float(x @ x)


# Pipeline
# ---


def _screen_and_classify(
    R: AlgebraicCurvatureTensor,
    samples: int,
    seed: int,
    rel_tol: float,
    threads: int | None,
) -> tuple[int, int]:
    n = R.dim
    if n < 3 or dimension_screen(n).code is ScreenCode.TWO_ROOT_IMPOSSIBLE:
        raise DimensionScreenFailed(
            f"Two-root tensors do not exist in dimension {n}",
            stage=FactorizationStage.DIMENSION_SCREEN.value,
        )

    verdict = classify_k_root(R, samples, seed, rel_tol, threads)
    if verdict.k != 2 or verdict.multiplicities is None:
        label = "varying" if verdict.k is None else str(verdict.k)
        raise NotTwoRoot(
            f"refuted: k={label} at stage {FactorizationStage.CLASSIFY_K_ROOT.value}",
            stage=FactorizationStage.CLASSIFY_K_ROOT.value,
            witness=list(verdict.witnesses or ()),
        )

    p, q = sorted(verdict.multiplicities, reverse=True)
    stage = FactorizationStage.MULTIPLICITY_SCREEN.value
    check = admissible(MultiplicityPattern(n=n, p=p, q=q))
    if not check.admissible:
        raise MultiplicityInadmissible(check.reason, stage=stage, magnitude=float(q))
    if q != 1:
        raise NotSimpleRootTwoRoot(
            f"q={q} ≠ 1: no simple root", stage=stage, magnitude=float(q)
        )
    return p, q


def _stage_of(exc: Refutation, fallback: FactorizationStage) -> FactorizationStage:
    try:
        return FactorizationStage(exc.stage)
    except ValueError:
        return fallback


def classify_two_root_simple(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = FACTOR_REL_TOL,
    threads: int | None = None,
) -> FactorizationReport:
    """Run the whole factorization and certify the reconstruction.

    The structure is certified when the componentwise residual of the reconstruction is at most `rel_tol * (1 + max|R|)`.
    Otherwise the report carries the first refutation, with its stage and witness.
    """
    sampling = SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol)
    stage = FactorizationStage.DIMENSION_SCREEN
    pattern = None
    mu_deviation = None
    try:
        pattern = _screen_and_classify(R, samples, seed, rel_tol, threads)
        stage = FactorizationStage.ESTIMATE_MU
        estimate = estimate_mu(R, samples, seed, rel_tol, threads)
        mu_deviation = estimate.deviation
        stage = FactorizationStage.EXTRACT_P
        structure = extract_p(R, estimate.mu, rel_tol, seed=seed)
        stage = FactorizationStage.CANONICAL_FRAME
        frame, nus = canonical_frame(structure.p, rel_tol)
    except Refutation as exc:
        logger.info("refuted at %s: %s", exc.stage, exc.message)
        return FactorizationReport(
            dim=R.dim,
            certified=False,
            stage=_stage_of(exc, stage),
            pattern=pattern,
            mu_deviation=mu_deviation,
            refutation=RefutationInfo.from_exception(exc),
            sampling=sampling,
        )

    structure = structure.model_copy(update={"frame": frame, "nus": nus})
    rebuilt = reconstruct(structure)
    residual = float(np.max(np.abs(rebuilt.components - R.components)))

    # simple root of R at X is sign * (mu + nu_X)
    points, profiles = sample_profiles(R, VERIFY_SAMPLES, worker_seed(seed, 3), rel_tol, threads)
    nu_deviation = 0.0
    for x, profile in zip(points, profiles, strict=True):
        simple = profile.nu_x if profile.q == 1 else profile.mu_x
        expected = structure.sign * (structure.mu + predicted_nu(structure, x))
        nu_deviation = max(nu_deviation, abs(float(simple or 0.0) - expected))

    certified = residual <= rel_tol * R.scale and nu_deviation <= rel_tol * R.scale
    logger.info("factorization certified=%s residual=%s", certified, residual)
    return FactorizationReport(
        dim=R.dim,
        certified=certified,
        stage=FactorizationStage.RECONSTRUCT,
        pattern=pattern,
        structure=structure,
        nu_blocks=tuple(ps_eigenspaces(structure)),
        residual=residual,
        mu_deviation=mu_deviation,
        nu_deviation=nu_deviation,
        sampling=sampling,
    )
