"""
Executable checks of the structural identities of two-root tensors.

Every check samples the unit sphere and returns a list of [`ViolationRecord`][jacobilab.analyses.probes.ViolationRecord]; an empty list means the identity held at every sample.
Tolerances are `rel_tol * (1 + max|R|)` unless noted.

- duality: `Y` is an eigenvector of `J_X` if and only if `X` is an eigenvector of `J_Y`.
  Pointwise Osserman tensors satisfy it everywhere ([`DualityMode.FULL`][jacobilab.analyses.probes.DualityMode]); every two-root tensor satisfies it at the extremal sets ([`DualityMode.EXTREMAL`][jacobilab.analyses.probes.DualityMode]).
- eigenvalue bounds: for `Y` in `M(X)`, `mu_Y <= mu_X <= nu_Y`; for `Y` in `N(X)`, `mu_Y <= nu_X <= nu_Y`.
- decomposition: the `M(Y)` component of `X` has squared length `(nu_Y - mu_X) / (nu_Y - mu_Y)` for `Y` in `M(X)`, and dually for `N`.
- rotation identity: dual eigenpairs stay eigenpairs along the rotated pair `(aX + bY, bX - aY)`.
- extrema: estimates of `mu_min` and `nu_max` with witnesses refined onto the extremal sets.

The extremal sets are infinite; they are represented by witness vectors only.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field

from jacobilab.analyses.spectral import (
    EigenspacePair,
    SamplingParams,
    SpectralProfile,
    _reduced_eigen,
    classify_k_root,
    eigenspaces,
    jacobi_matrix,
    sample_profiles,
    spectral_profile,
)
from jacobilab.exceptions import NoDualPairsFound, NotTwoRoot, Refutation
from jacobilab.linalg import (
    DEFAULT_REL_TOL,
    sample_unit_sphere,
    subspace_intersection_dim,
    worker_seed,
)
from jacobilab.tensors import AlgebraicCurvatureTensor, curvature_operator
from jacobilab.utils import Vector, _parallel_map

logger = logging.getLogger(__name__)

MAX_REFINE_STEPS = 2000
# Witnesses spanning the subspace of the quadratic fit, besides the new step
FIT_WINDOW = 3


class DualityMode(StrEnum):
    FULL = "full"
    EXTREMAL = "extremal"
    AUTO = "auto"


class ExtremalTarget(StrEnum):
    """Which extremal set a witness is moved onto."""

    U = "mu_min"
    W = "nu_max"


class SectionStatus(StrEnum):
    GREEN = "green"
    RED = "red"
    SKIPPED = "skipped"


class ViolationRecord(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    check_name: str
    inputs: tuple[Vector, ...]
    magnitude: float
    detail: str = ""


class ExtremaReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu_min: float
    mu_max: float
    nu_min: float
    nu_max: float
    witness_u: Vector
    witness_w: Vector
    refine_steps_u: int
    refine_steps_w: int
    intersection_dim: int
    sampling: SamplingParams


class ProbeSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    status: SectionStatus
    identities_checked: int = 0
    mode: DualityMode | None = None
    note: str | None = None
    violations: tuple[ViolationRecord, ...] = ()


class ProbeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    k: int | None
    sections: tuple[ProbeSection, ...]
    extrema: ExtremaReport | None = None
    sampling: SamplingParams

    @computed_field
    @property
    def red(self) -> bool:
        return any(s.status is SectionStatus.RED for s in self.sections)


def _slack(R: AlgebraicCurvatureTensor, rel_tol: float) -> float:
    return rel_tol * R.scale


def _not_two_root_record(check_name: str, exc: NotTwoRoot) -> ViolationRecord:
    return ViolationRecord(
        check_name=check_name,
        inputs=tuple(exc.witness),
        magnitude=float(exc.magnitude or 1.0),
        detail=exc.message,
    )


# Duality
# ---


def _eigen_residual(
    R: AlgebraicCurvatureTensor, x: np.ndarray, y: np.ndarray
) -> tuple[float, float]:
    """Rayleigh quotient of `J_Y` at `X` divided by `g(Y, Y)`, and the residual of `X` as its eigenvector."""

    v = jacobi_matrix(R, y).entries @ x
    lam = float(v @ x) / float(x @ x)
    return lam / float(y @ y), float(np.linalg.norm(v - lam * x))


def _full_duality(
    R: AlgebraicCurvatureTensor, points: np.ndarray, rel_tol: float, threads: int | None
) -> tuple[list[ViolationRecord], int]:
    slack = _slack(R, rel_tol)

    def check(x: np.ndarray) -> list[ViolationRecord]:
        _, vectors = _reduced_eigen(R, x)
        out = []
        for y in vectors:
            _, residual = _eigen_residual(R, x, y)
            if residual > slack:
                out.append(
                    ViolationRecord(
                        check_name="duality", inputs=(x, y), magnitude=residual
                    )
                )
        return out

    found = _parallel_map(check, points, threads)
    return [r for batch in found for r in batch], len(points) * (R.dim - 1)


def _extremal_duality(
    R: AlgebraicCurvatureTensor,
    points: np.ndarray,
    profiles: list[SpectralProfile],
    rel_tol: float,
    threads: int | None,
) -> tuple[list[ViolationRecord], int]:
    slack = _slack(R, rel_tol)
    extrema = _extrema(R, points, profiles, rel_tol, threads)
    records: list[ViolationRecord] = []
    checked = 0

    for witness, target in (
        (extrema.witness_u, ExtremalTarget.U),
        (extrema.witness_w, ExtremalTarget.W),
    ):
        pair = eigenspaces(R, witness, rel_tol)
        basis = pair.m_basis if target is ExtremalTarget.U else pair.n_basis
        for y in basis:
            checked += 1
            root, residual = _eigen_residual(R, witness, y)
            try:
                at_y = eigenspaces(R, y, rel_tol)
            except NotTwoRoot as exc:
                records.append(_not_two_root_record("duality", exc))
                continue
            if target is ExtremalTarget.U:
                # X lands in M(Y) and Y lies on the same level of mu
                mismatch = max(abs(root - at_y.mu_x), abs(at_y.mu_x - pair.mu_x))
            else:
                mismatch = max(abs(root - at_y.nu_x), abs(at_y.nu_x - pair.nu_x))
            magnitude = max(residual, mismatch)
            if magnitude > slack:
                records.append(
                    ViolationRecord(
                        check_name="duality",
                        inputs=(witness, y),
                        magnitude=magnitude,
                        detail=f"extremal set {target.value}",
                    )
                )
    return records, checked


def _is_two_root(profiles: list[SpectralProfile]) -> bool:
    return all(p.is_two_root for p in profiles)


def _duality(
    R: AlgebraicCurvatureTensor,
    samples: int,
    seed: int,
    rel_tol: float,
    mode: DualityMode,
    threads: int | None,
) -> tuple[list[ViolationRecord], int, DualityMode]:
    points, profiles = sample_profiles(R, samples, seed, rel_tol, threads)
    if mode is DualityMode.AUTO:
        mode = DualityMode.EXTREMAL if _is_two_root(profiles) else DualityMode.FULL
    if mode is DualityMode.FULL:
        records, checked = _full_duality(R, points, rel_tol, threads)
    else:
        records, checked = _extremal_duality(R, points, profiles, rel_tol, threads)
    logger.debug("duality (%s): %s violations of %s", mode, len(records), checked)
    return records, checked, mode


def duality_check(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    mode: DualityMode = DualityMode.AUTO,
    threads: int | None = None,
) -> list[ViolationRecord]:
    """Test the eigenvector duality.

    For every sampled `X` and reduced eigenvector `Y` of `J_X`, `X` must be an eigenvector of `J_Y`, measured by the residual against the Rayleigh quotient.
    `AUTO` uses the extremal form when the tensor is two-root at the samples.

    :raises NotTwoRoot: In `EXTREMAL` mode, if the tensor is not two-root at some sample
    """
    records, _, _ = _duality(R, samples, seed, rel_tol, DualityMode(mode), threads)
    return records


def jacobi_dual(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> bool:
    """Whether the full duality held at every sample."""

    return not duality_check(R, samples, seed, rel_tol, DualityMode.FULL, threads)


# Eigenvalue bounds and decomposition
# ---


def _bounds_records(
    R: AlgebraicCurvatureTensor, x: np.ndarray, rel_tol: float, swap: bool
) -> tuple[list[ViolationRecord], int]:
    slack = _slack(R, rel_tol)
    try:
        pair = eigenspaces(R, x, rel_tol)
    except NotTwoRoot as exc:
        return [_not_two_root_record("eigenvalue_bounds", exc)], 1

    m_basis, n_basis = (pair.n_basis, pair.m_basis) if swap else (pair.m_basis, pair.n_basis)
    out = []
    checked = 0
    for basis, in_m in ((m_basis, True), (n_basis, False)):
        for y in basis:
            checked += 1
            try:
                at_y = spectral_profile(R, y, rel_tol)
                if not at_y.is_two_root or at_y.mu_x is None or at_y.nu_x is None:
                    raise NotTwoRoot(
                        f"Reduced Jacobi operator has {at_y.clusters.count} distinct eigenvalues, not 2",
                        stage="eigenvalue_bounds",
                        magnitude=float(abs(at_y.clusters.count - 2)),
                        witness=[y],
                    )
            except NotTwoRoot as exc:
                out.append(_not_two_root_record("eigenvalue_bounds", exc))
                continue
            if in_m:
                # mu_Y <= mu_X <= nu_Y
                gaps = (at_y.mu_x - pair.mu_x, pair.mu_x - at_y.nu_x)
            else:
                # mu_Y <= nu_X <= nu_Y
                gaps = (at_y.mu_x - pair.nu_x, pair.nu_x - at_y.nu_x)
            magnitude = max(gaps)
            if magnitude > slack:
                out.append(
                    ViolationRecord(
                        check_name="eigenvalue_bounds",
                        inputs=(x, y),
                        magnitude=float(magnitude),
                        detail="Y in M(X)" if in_m else "Y in N(X)",
                    )
                )
    return out, checked


def eigenvalue_bounds_check(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    swap_eigenspaces: bool = False,
    threads: int | None = None,
) -> list[ViolationRecord]:
    """Test the eigenvalue bounds on eigenvectors of sampled Jacobi operators.

    `swap_eigenspaces` exchanges the roles of `M(X)` and `N(X)` and exists as a negative control.
    """
    points = sample_unit_sphere(R.dim, samples, seed)
    found = _parallel_map(
        lambda x: _bounds_records(R, x, rel_tol, swap_eigenspaces)[0], points, threads
    )
    return [r for batch in found for r in batch]


def _emex_records(
    R: AlgebraicCurvatureTensor, x: np.ndarray, rel_tol: float
) -> tuple[list[ViolationRecord], int]:
    slack = _slack(R, rel_tol)
    try:
        pair = eigenspaces(R, x, rel_tol)
    except NotTwoRoot as exc:
        return [_not_two_root_record("emex", exc)], 1

    ex = float(x @ x)
    out = []
    checked = 0
    for basis, in_m in ((pair.m_basis, True), (pair.n_basis, False)):
        for y in basis:
            checked += 1
            try:
                at_y = eigenspaces(R, y, rel_tol)
            except NotTwoRoot as exc:
                out.append(_not_two_root_record("emex", exc))
                continue
            gap = at_y.nu_x - at_y.mu_x
            if in_m:
                component = at_y.m_basis @ x
                expected = ex * (at_y.nu_x - pair.mu_x) / gap
            else:
                component = at_y.n_basis @ x
                expected = ex * (at_y.mu_x - pair.nu_x) / (at_y.mu_x - at_y.nu_x)
            magnitude = abs(float(component @ component) - expected)
            if magnitude > slack:
                out.append(
                    ViolationRecord(
                        check_name="emex",
                        inputs=(x, y),
                        magnitude=magnitude,
                        detail="M(Y) component" if in_m else "N(Y) component",
                    )
                )
    return out, checked


def emex_check(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> list[ViolationRecord]:
    """Test the squared length of the eigenspace components of `X` relative to `Y`.

    For `Y` in `M(X)`: `|X_M(Y)|^2 = g(X, X) (nu_Y - mu_X) / (nu_Y - mu_Y)`.
    For `Y` in `N(X)`: `|X_N(Y)|^2 = g(X, X) (mu_Y - nu_X) / (mu_Y - nu_Y)`.
    """
    points = sample_unit_sphere(R.dim, samples, seed)
    found = _parallel_map(lambda x: _emex_records(R, x, rel_tol)[0], points, threads)
    return [r for batch in found for r in batch]


# Rotation identity
# ---


def rotation_identity_residual(
    R: AlgebraicCurvatureTensor,
    x: np.ndarray,
    y: np.ndarray,
    lam: float,
    alpha: float,
    beta: float,
) -> float:
    """Residual of the rotation identity for one dual pair.

    With `Z = aX + bY` and `V = g(Y, Y) b X - g(X, X) a Y`, a dual pair `J_X Y = g(X, X) lam Y`, `J_Y X = g(Y, Y) lam X` gives `J_Z V = g(Z, Z) lam V`.

    :return: `|J_Z V - g(Z, Z) lam V|`
    :rtype: float
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = alpha * x + beta * y
    v = float(y @ y) * beta * x - float(x @ x) * alpha * y
    jz_v = curvature_operator(R, v, z, z)
    return float(np.linalg.norm(jz_v - float(z @ z) * lam * v))


def _harvest_dual_pairs(
    R: AlgebraicCurvatureTensor, x: np.ndarray, slack: float
) -> list[tuple[np.ndarray, np.ndarray, float]]:
    values, vectors = _reduced_eigen(R, x)
    pairs = []
    for lam, y in zip(values, vectors, strict=True):
        root, residual = _eigen_residual(R, x, y)
        if residual <= slack and abs(root - lam) <= slack:
            pairs.append((x, y, float(lam)))
    return pairs


def _rotation_records(
    R: AlgebraicCurvatureTensor,
    samples: int,
    seed: int,
    rel_tol: float,
    threads: int | None,
) -> tuple[list[ViolationRecord], int]:
    slack = _slack(R, rel_tol)
    points = sample_unit_sphere(R.dim, samples, seed)
    harvested = _parallel_map(lambda x: _harvest_dual_pairs(R, x, slack), points, threads)
    pairs = [pair for batch in harvested for pair in batch]
    if not pairs:
        raise NoDualPairsFound(
            f"No dual eigenpairs among {samples} samples",
            stage="rotation_lemma",
            witness=[points[0]],
        )

    coeffs = np.random.default_rng(worker_seed(seed, 1)).standard_normal((len(pairs), 2))

    def check(item: tuple[tuple[np.ndarray, np.ndarray, float], np.ndarray]) -> ViolationRecord | None:
        (x, y, lam), (alpha, beta) = item
        residual = rotation_identity_residual(R, x, y, lam, alpha, beta)
        z = alpha * x + beta * y
        v = float(y @ y) * beta * x - float(x @ x) * alpha * y
        if residual > slack * float(z @ z) * max(1.0, float(np.linalg.norm(v))):
            return ViolationRecord(
                check_name="rotation_lemma",
                inputs=(x, y),
                magnitude=residual,
                detail=f"alpha={alpha:.6g} beta={beta:.6g} lambda={lam:.6g}",
            )
        return None

    found = _parallel_map(check, list(zip(pairs, coeffs, strict=True)), threads)
    return [r for r in found if r is not None], len(pairs)


def rotation_lemma_check(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> list[ViolationRecord]:
    """Harvest dual eigenpairs at the samples and test the rotation identity on random rotations of each.

    :raises NoDualPairsFound: If no sample yields a dual pair
    """
    records, _ = _rotation_records(R, samples, seed, rel_tol, threads)
    return records


# Extremal sets
# ---


def refine_extremal(
    R: AlgebraicCurvatureTensor,
    x: np.ndarray,
    target: ExtremalTarget,
    rel_tol: float = DEFAULT_REL_TOL,
    max_steps: int = MAX_REFINE_STEPS,
) -> tuple[np.ndarray, int]:
    """Move a witness towards an extremal set by eigenspace ascent.

    Stepping from `X` to a unit vector of `N(X)` never decreases `nu`, and stepping into `M(X)` never increases `mu`, by the eigenvalue bounds.
    Among the basis vectors of the eigenspace the best one is taken.
    The ascent stops once `X` is an eigenvector of `J_Y` for every `Y` in the eigenspace, or when a step would lose value.

    Each step is also compared with the optimum of a quadratic fit of the root over the span of the last few witnesses.
    Plain ascent converges at the ratio of the two largest values of the varying root, which is slow when they nearly coincide; the fit is exact whenever the root is a quadratic form, as for the two-root models.

    :return: Refined unit witness and the number of steps taken
    :rtype: tuple[np.ndarray, int]
    """
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    sign = 1.0 if target is ExtremalTarget.W else -1.0

    def score(pair: EigenspacePair) -> float:
        return sign * (pair.nu_x if target is ExtremalTarget.W else pair.mu_x)

    pair = eigenspaces(R, x, rel_tol)
    best = score(pair)
    stall = 1e-15 * R.scale
    settled_tol = 1e-12 * R.scale
    history = [x]
    steps = 0
    while steps < max_steps:
        basis = pair.n_basis if target is ExtremalTarget.W else pair.m_basis
        if all(_eigen_residual(R, x, y)[1] <= settled_tol for y in basis):
            break
        step = max((eigenspaces(R, y, rel_tol) for y in basis), key=score)
        fitted = _fitted_optimum(R, [*history[-FIT_WINDOW:], step.point], score, rel_tol)
        if fitted is not None and score(fitted) > score(step):
            step = fitted
        if score(step) < best - stall:
            break
        steps += 1
        x, pair, best = step.point / np.linalg.norm(step.point), step, score(step)
        history.append(x)
    if steps == max_steps:
        logger.warning("%s witness unsettled after %s steps", target.value, steps)
    logger.debug("refined %s witness in %s steps to %s", target.value, steps, sign * best)
    return x, steps


def _fitted_optimum(
    R: AlgebraicCurvatureTensor,
    vectors: list[np.ndarray],
    score: Callable[[EigenspacePair], float],
    rel_tol: float,
) -> EigenspacePair | None:
    """Maximize `score` over the unit sphere of the span of `vectors`, modelling it as a quadratic form.

    The form is read off at the orthonormal basis vectors and their normalized pairwise sums.
    Returns `None` when the span is one-dimensional or a fitted point is not two-root.
    """
    q, r = np.linalg.qr(np.array(vectors).T)
    q = q[:, np.abs(np.diag(r)) > 1e-8]
    m = q.shape[1]
    if m < 2:
        return None

    def at(v: np.ndarray) -> float:
        return score(eigenspaces(R, v / np.linalg.norm(v), rel_tol))

    try:
        form = np.diag([at(q[:, i]) for i in range(m)])
        for i in range(m):
            for j in range(i + 1, m):
                form[i, j] = form[j, i] = (
                    at(q[:, i] + q[:, j]) - 0.5 * (form[i, i] + form[j, j])
                )
        _, vecs = np.linalg.eigh(form)
        top = q @ vecs[:, -1]
        return eigenspaces(R, top / np.linalg.norm(top), rel_tol)
    except NotTwoRoot:
        return None


def _extrema(
    R: AlgebraicCurvatureTensor,
    points: np.ndarray,
    profiles: list[SpectralProfile],
    rel_tol: float,
    threads: int | None,
    samples: int | None = None,
    seed: int = 0,
) -> ExtremaReport:
    for x, profile in zip(points, profiles, strict=True):
        if not profile.is_two_root:
            raise NotTwoRoot(
                f"Reduced Jacobi operator has {profile.clusters.count} distinct eigenvalues, not 2",
                stage="extrema",
                magnitude=float(abs(profile.clusters.count - 2)),
                witness=[x],
            )

    mus = np.array([p.mu_x for p in profiles], dtype=float)
    nus = np.array([p.nu_x for p in profiles], dtype=float)
    u0, w0 = points[int(np.argmin(mus))], points[int(np.argmax(nus))]
    refined = _parallel_map(
        lambda job: refine_extremal(R, job[0], job[1], rel_tol),
        [(u0, ExtremalTarget.U), (w0, ExtremalTarget.W)],
        threads,
    )
    (u, u_steps), (w, w_steps) = refined
    at_u, at_w = eigenspaces(R, u, rel_tol), eigenspaces(R, w, rel_tol)

    span_u = np.vstack([u, at_u.m_basis])
    span_w = np.vstack([w, at_w.n_basis])
    intersection = subspace_intersection_dim(span_u, span_w, tol=1e-8)

    return ExtremaReport(
        mu_min=float(min(mus.min(), at_u.mu_x)),
        mu_max=float(mus.max()),
        nu_min=float(nus.min()),
        nu_max=float(max(nus.max(), at_w.nu_x)),
        witness_u=u,
        witness_w=w,
        refine_steps_u=u_steps,
        refine_steps_w=w_steps,
        intersection_dim=intersection,
        sampling=SamplingParams(
            samples=samples or len(points), seed=seed, rel_tol=rel_tol
        ),
    )


def extrema_probe(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> ExtremaReport:
    """Estimate the range of both roots and find witnesses of the extremal sets.

    Also measures the intersection of `Span{U} + M(U)` with `Span{W} + N(W)`, which is nontrivial by a dimension count.

    :raises NotTwoRoot: If the tensor is not two-root at some sample
    """
    points, profiles = sample_profiles(R, samples, seed, rel_tol, threads)
    return _extrema(R, points, profiles, rel_tol, threads, samples, seed)


# Report
# ---


def _refuted_section(name: str, exc: Refutation) -> ProbeSection:
    record = ViolationRecord(
        check_name=name,
        inputs=tuple(exc.witness),
        magnitude=float(exc.magnitude if exc.magnitude is not None else 1.0),
        detail=exc.message,
    )
    return ProbeSection(
        name=name,
        status=SectionStatus.RED,
        note=type(exc).__name__,
        violations=(record,),
    )


def _section(
    name: str,
    records: list[ViolationRecord],
    checked: int,
    mode: DualityMode | None = None,
) -> ProbeSection:
    return ProbeSection(
        name=name,
        status=SectionStatus.RED if records else SectionStatus.GREEN,
        identities_checked=checked,
        mode=mode,
        violations=tuple(records),
    )


def _sum_over_points(
    fn: Callable[[np.ndarray], tuple[list[ViolationRecord], int]],
    points: np.ndarray,
    threads: int | None,
) -> tuple[list[ViolationRecord], int]:
    results = _parallel_map(fn, points, threads)
    return [r for records, _ in results for r in records], sum(n for _, n in results)


def _two_root_sections(
    R: AlgebraicCurvatureTensor,
    points: np.ndarray,
    samples: int,
    seed: int,
    rel_tol: float,
    threads: int | None,
) -> tuple[list[ProbeSection], ExtremaReport | None]:
    sections = [
        _section(
            "eigenvalue_bounds",
            *_sum_over_points(lambda x: _bounds_records(R, x, rel_tol, False), points, threads),
        ),
        _section(
            "emex",
            *_sum_over_points(lambda x: _emex_records(R, x, rel_tol), points, threads),
        ),
    ]
    try:
        extrema = extrema_probe(R, samples, seed, rel_tol, threads)
    except NotTwoRoot as exc:
        sections.append(_refuted_section("extrema", exc))
        return sections, None

    records = []
    if extrema.intersection_dim < 1:
        records.append(
            ViolationRecord(
                check_name="extrema",
                inputs=(extrema.witness_u, extrema.witness_w),
                magnitude=1.0,
                detail="trivial intersection of Span{U} + M(U) and Span{W} + N(W)",
            )
        )
    sections.append(_section("extrema", records, 1))
    return sections, extrema


def probe_report(
    R: AlgebraicCurvatureTensor,
    samples: int = 256,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    threads: int | None = None,
) -> ProbeReport:
    """Run every structural check and collect the sections.

    Checks that only make sense for two-root tensors are skipped when every sample has the same number `k != 2` of roots.
    A check that cannot run on the input, for example a rotation check without dual pairs, is reported red.
    """
    verdict = classify_k_root(R, samples, seed, rel_tol, threads)
    points = sample_unit_sphere(R.dim, samples, seed)

    try:
        records, checked, mode = _duality(R, samples, seed, rel_tol, DualityMode.AUTO, threads)
        sections = [_section("duality", records, checked, mode)]
    except Refutation as exc:
        sections = [_refuted_section("duality", exc)]

    extrema = None
    if verdict.k is not None and verdict.k != 2:
        note = f"skipped (k={verdict.k})"
        for name in ("eigenvalue_bounds", "emex", "extrema"):
            sections.append(ProbeSection(name=name, status=SectionStatus.SKIPPED, note=note))
    else:
        two_root, extrema = _two_root_sections(R, points, samples, seed, rel_tol, threads)
        sections += two_root

    try:
        sections.append(
            _section("rotation_lemma", *_rotation_records(R, samples, seed, rel_tol, threads))
        )
    except NoDualPairsFound as exc:
        sections.append(_refuted_section("rotation_lemma", exc))

    report = ProbeReport(
        dim=R.dim,
        k=verdict.k,
        sections=tuple(sections),
        extrema=extrema,
        sampling=SamplingParams(samples=samples, seed=seed, rel_tol=rel_tol),
    )
    logger.info(
        "probe: %s",
        ", ".join(f"{s.name}={s.status.value}" for s in report.sections),
    )
    return report
