"""
Algebraic curvature tensors.

Tensors are dense `n x n x n x n` arrays indexed `R[i, j, k, l] = R(E_i, E_j, E_k, E_l)` in an orthonormal basis of the standard Euclidean scalar product.
The Jacobi operator convention used throughout the package is `J_X(Y) = R(Y, X)X`, with `R(X, Y)Z = sum_l R(X, Y, Z, E_l) E_l`, so that

    (J_X)[a, b] = sum_{i, j} R[b, i, j, a] x_i x_j

Sign conventions differ across the literature. With this one the unit sphere tensor [`build_r0`][jacobilab.tensors.build_r0] has sectional curvature `+1`.

Constructors:

- [`build_act`][jacobilab.tensors.build_act] densifies a list of generator entries.
- [`build_r0`][jacobilab.tensors.build_r0] and [`build_rp`][jacobilab.tensors.build_rp] build the constant curvature tensor and the tensor of a skew-adjoint endomorphism.
- [`build_two_root_model`][jacobilab.tensors.build_two_root_model] builds `sign * (-1/3 R^P + mu R^0)` from [`TwoRootModelParams`][jacobilab.tensors.TwoRootModelParams].

[`TensorFile`][jacobilab.tensors.TensorFile] is the JSON file format: `{"dim": n, "entries": [[i, j, k, l, value], ...]}` with 1-based indices.
"""

from __future__ import annotations

import itertools
import json
import logging
from pathlib import Path
from typing import Annotated

import numpy as np
from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from jacobilab._validators import isvalid_sign, isvalid_two_root_dim
from jacobilab.exceptions import (
    BianchiViolation,
    DegeneratePlane,
    InvalidTensorFile,
    NotSkew,
    SymmetryConflict,
)
from jacobilab.utils import Matrix, Tensor4

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
SKEW_TOL = 1e-10
FRAME_TOL = 1e-10


class AlgebraicCurvatureTensor(BaseModel):
    """Dense 4-index tensor with the symmetries of a curvature tensor.

    Construct through the `build_*` functions or [`from_array`][jacobilab.tensors.AlgebraicCurvatureTensor.from_array], which check the symmetries.
    Direct construction only checks the shape.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: Tensor4

    @field_validator("components")
    @classmethod
    def _check_shape(cls, value: np.ndarray) -> np.ndarray:
        n = value.shape[0]
        if n < 2 or value.shape != (n, n, n, n):
            raise ValueError(f"Expected shape (n, n, n, n) with n >= 2, found {value.shape}")
        if not np.all(np.isfinite(value)):
            raise ValueError("Tensor components must be finite")
        return value

    @classmethod
    def from_array(cls, value: np.ndarray, tol: float = SYMMETRY_TOL) -> AlgebraicCurvatureTensor:
        """Wrap an array and check the curvature symmetries.

        :param value: Array of shape `(n, n, n, n)`
        :type value: np.ndarray
        :param tol: Relative tolerance, scaled by `1 + max|R|`
        :type tol: float
        :raises SymmetryConflict: If an antisymmetry or the pair symmetry fails
        :raises BianchiViolation: If the first Bianchi identity fails
        :return: Validated tensor
        :rtype: AlgebraicCurvatureTensor
        """
        tensor = cls(components=value)
        _ensure_curvature(tensor, tol)
        return tensor

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    @property
    def scale(self) -> float:
        """`1 + max|R|`, the reference size for relative tolerances."""

        return 1.0 + self.max_abs

    def __add__(self, other: AlgebraicCurvatureTensor) -> AlgebraicCurvatureTensor:
        _check_same_dim(self, other)
        return AlgebraicCurvatureTensor(components=self.components + other.components)

    def __sub__(self, other: AlgebraicCurvatureTensor) -> AlgebraicCurvatureTensor:
        _check_same_dim(self, other)
        return AlgebraicCurvatureTensor(components=self.components - other.components)

    def __neg__(self) -> AlgebraicCurvatureTensor:
        return AlgebraicCurvatureTensor(components=-self.components)

    def __mul__(self, c: float) -> AlgebraicCurvatureTensor:
        return AlgebraicCurvatureTensor(components=float(c) * self.components)

    __rmul__ = __mul__


def _check_same_dim(a: AlgebraicCurvatureTensor, b: AlgebraicCurvatureTensor) -> None:
    if a.dim != b.dim:
        raise ValueError(f"Dimension mismatch: {a.dim} vs {b.dim}")


class SkewEndomorphism(BaseModel):
    """Skew-adjoint endomorphism `P` of an even dimensional space, stored as its matrix."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: Matrix

    @field_validator("matrix")
    @classmethod
    def _check_skew(cls, value: np.ndarray) -> np.ndarray:
        n = value.shape[0]
        if value.shape != (n, n) or n == 0 or n % 2:
            raise ValueError(f"Expected a square matrix of positive even size, found {value.shape}")
        deviation = float(np.max(np.abs(value + value.T)))
        if deviation > SKEW_TOL:
            raise ValueError(f"Matrix is not skew-symmetric, max|P + P^T| = {deviation:.3e}")
        return value

    @classmethod
    def from_matrix(cls, value: np.ndarray) -> SkewEndomorphism:
        """Wrap a matrix, raising `NotSkew` when it is not skew-symmetric."""

        arr = np.asarray(value, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise NotSkew(f"Expected a square matrix of positive even size, found {arr.shape}")
        deviation = float(np.max(np.abs(arr + arr.T)))
        if deviation > SKEW_TOL:
            raise NotSkew(f"Matrix is not skew-symmetric, max|P + P^T| = {deviation:.3e}")
        return cls(matrix=arr)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def gram(self) -> np.ndarray:
        """`P^T P = -P^2`, symmetric positive semidefinite."""

        return self.matrix.T @ self.matrix


class TwoRootModelParams(BaseModel):
    """Parameters of `sign * (-1/3 R^P + mu R^0)`.

    `P` is defined on the frame `(E_1, F_1, ..., E_m, F_m)`, given as the rows of `frame`, by `P(E_i) = sqrt(nu_i) F_i` and `P(F_i) = -sqrt(nu_i) E_i`.
    A missing frame means the standard basis.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    dim: Annotated[int, AfterValidator(isvalid_two_root_dim)]
    mu: float
    nus: tuple[float, ...] = Field(min_length=1)
    frame: Matrix | None = None
    sign: Annotated[int | str, AfterValidator(isvalid_sign)] = 1

    @field_validator("nus")
    @classmethod
    def _check_nus(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(nu <= 0 for nu in value):
            raise ValueError(f"Every nu must be positive. Found {value}")
        if any(b > a for a, b in itertools.pairwise(value)):
            raise ValueError(f"nus must be non-increasing. Found {value}")
        return value

    @model_validator(mode="after")
    def _check_sizes(self) -> TwoRootModelParams:
        if len(self.nus) != self.dim // 2:
            raise ValueError(
                f"Dimension {self.dim} needs {self.dim // 2} values of nu. Found {len(self.nus)}"
            )
        if self.frame is not None:
            if self.frame.shape != (self.dim, self.dim):
                raise ValueError(
                    f"Frame must have shape ({self.dim}, {self.dim}). Found {self.frame.shape}"
                )
            error = float(np.max(np.abs(self.frame @ self.frame.T - np.eye(self.dim))))
            if error > FRAME_TOL:
                raise ValueError(f"Frame is not orthonormal, deviation {error:.3e}")
        return self

    def frame_or_identity(self) -> np.ndarray:
        return np.eye(self.dim) if self.frame is None else self.frame


class SymmetryReport(BaseModel):
    """Largest violation of each curvature symmetry."""

    model_config = ConfigDict(frozen=True)

    antisymmetry_first_pair: float
    antisymmetry_second_pair: float
    pair_symmetry: float
    bianchi: float
    tolerance: float

    @property
    def max_violation(self) -> float:
        return max(
            self.antisymmetry_first_pair,
            self.antisymmetry_second_pair,
            self.pair_symmetry,
        )

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tolerance and self.bianchi <= self.tolerance


# Validation
# ---


def validate_symmetries(
    R: AlgebraicCurvatureTensor, tol: float = SYMMETRY_TOL
) -> SymmetryReport:
    """Measure every curvature symmetry.

    :param R: Tensor
    :type R: AlgebraicCurvatureTensor
    :param tol: Relative tolerance, scaled by `1 + max|R|` in the report
    :type tol: float
    :return: Maximum violation per symmetry class
    :rtype: SymmetryReport
    """
    c = R.components
    report = SymmetryReport(
        antisymmetry_first_pair=float(np.max(np.abs(c + np.einsum("jikl->ijkl", c)))),
        antisymmetry_second_pair=float(np.max(np.abs(c + np.einsum("ijlk->ijkl", c)))),
        pair_symmetry=float(np.max(np.abs(c - np.einsum("klij->ijkl", c)))),
        bianchi=float(
            np.max(np.abs(c + np.einsum("jkil->ijkl", c) + np.einsum("kijl->ijkl", c)))
        ),
        tolerance=tol * R.scale,
    )
    logger.debug("symmetry report %s", report)
    return report


def _ensure_curvature(R: AlgebraicCurvatureTensor, tol: float = SYMMETRY_TOL) -> None:
    report = validate_symmetries(R, tol)
    if report.max_violation > report.tolerance:
        raise SymmetryConflict(
            f"Tensor violates the curvature symmetries by {report.max_violation:.3e}"
        )
    if report.bianchi > report.tolerance:
        raise BianchiViolation(
            f"Tensor violates the first Bianchi identity by {report.bianchi:.3e}"
        )


# Constructors
# ---


def _orbit(i: int, j: int, k: int, l: int) -> list[tuple[tuple[int, int, int, int], int]]:
    """Index tuples forced by the antisymmetries and pair symmetry, with their signs."""

    out = []
    for a, b, c, d in ((i, j, k, l), (k, l, i, j)):
        out += [
            ((a, b, c, d), 1),
            ((b, a, c, d), -1),
            ((a, b, d, c), -1),
            ((b, a, d, c), 1),
        ]
    return out


def build_act(
    dim: int, entries: list[tuple[int, int, int, int, float]]
) -> AlgebraicCurvatureTensor:
    """Densify generator entries by symmetry.

    Each entry `(i, j, k, l, value)` uses 1-based indices and sets `R(E_i, E_j, E_k, E_l) = value` together with every entry forced by the antisymmetries and the pair symmetry.
    Entries that are never set are zero.

    :param dim: Dimension `n >= 2`
    :type dim: int
    :param entries: Generator entries
    :type entries: list[tuple[int, int, int, int, float]]
    :raises SymmetryConflict: If two entries, or an entry and its own orbit, disagree
    :raises BianchiViolation: If the densified tensor violates the first Bianchi identity
    :return: Tensor
    :rtype: AlgebraicCurvatureTensor
    """
    if dim < 2:
        raise ValueError(f"Dimension must be at least 2. Found {dim}")

    comps = np.zeros((dim, dim, dim, dim))
    assigned = np.zeros((dim, dim, dim, dim), dtype=bool)
    for entry in entries:
        i, j, k, l, value = entry
        idx = (int(i) - 1, int(j) - 1, int(k) - 1, int(l) - 1)
        if not all(0 <= x < dim for x in idx):
            raise ValueError(f"Entry {entry} has an index outside 1..{dim}")
        for target, sign in _orbit(*idx):
            forced = sign * float(value)
            if assigned[target] and abs(comps[target] - forced) > SYMMETRY_TOL * (
                1.0 + abs(forced)
            ):
                one_based = tuple(t + 1 for t in target)
                raise SymmetryConflict(
                    f"Entry {entry} forces R{one_based} = {forced}, which conflicts with {comps[target]}"
                )
            comps[target] = forced
            assigned[target] = True

    return AlgebraicCurvatureTensor.from_array(comps)


def build_r0(dim: int) -> AlgebraicCurvatureTensor:
    """Constant sectional curvature one: `R(x, y, z, w) = g(y, z) g(x, w) - g(x, z) g(y, w)`."""

    eye = np.eye(dim)
    comps = np.einsum("jk,il->ijkl", eye, eye) - np.einsum("ik,jl->ijkl", eye, eye)
    return AlgebraicCurvatureTensor.from_array(comps)


def build_rp(P: SkewEndomorphism | np.ndarray) -> AlgebraicCurvatureTensor:
    """Tensor generated by a skew-adjoint endomorphism.

    `R^P(x, y, z, w) = g(Px, z) g(Py, w) - g(Py, z) g(Px, w) + 2 g(Px, y) g(Pz, w)`

    :param P: Skew-adjoint endomorphism, or its matrix
    :type P: SkewEndomorphism | np.ndarray
    :raises NotSkew: If a matrix is given that is not skew-symmetric
    :return: Tensor
    :rtype: AlgebraicCurvatureTensor
    """
    if not isinstance(P, SkewEndomorphism):
        P = SkewEndomorphism.from_matrix(P)
    # q[i, j] = g(P E_i, E_j)
    q = P.matrix.T
    comps = (
        np.einsum("ik,jl->ijkl", q, q)
        - np.einsum("jk,il->ijkl", q, q)
        + 2.0 * np.einsum("ij,kl->ijkl", q, q)
    )
    return AlgebraicCurvatureTensor.from_array(comps)


def skew_from_frame(frame: np.ndarray, nus: tuple[float, ...] | list[float]) -> SkewEndomorphism:
    """Endomorphism with `P(E_i) = sqrt(nu_i) F_i` and `P(F_i) = -sqrt(nu_i) E_i`.

    :param frame: Rows `E_1, F_1, E_2, F_2, ...`
    :type frame: np.ndarray
    :param nus: Non-negative constants, one per pair
    :type nus: tuple[float, ...] | list[float]
    :return: Endomorphism
    :rtype: SkewEndomorphism
    """
    frame = np.asarray(frame, dtype=float)
    if frame.shape[0] != 2 * len(nus):
        raise ValueError(f"A frame of {frame.shape[0]} vectors needs {frame.shape[0] // 2} values of nu")
    p = np.zeros((frame.shape[1], frame.shape[1]))
    for i, nu in enumerate(nus):
        e, f = frame[2 * i], frame[2 * i + 1]
        p += np.sqrt(nu) * (np.outer(f, e) - np.outer(e, f))
    return SkewEndomorphism.from_matrix(p)


def random_frame(dim: int, seed: int) -> np.ndarray:
    """Deterministic random orthonormal frame, one vector per row.

    QR of a Gaussian matrix with the signs of `R`'s diagonal fixed positive, which is Haar distributed.
    """

    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return q.T.copy()


def build_two_root_model(params: TwoRootModelParams) -> AlgebraicCurvatureTensor:
    """Build `sign * (-1/3 R^P + mu R^0)`."""

    p = skew_from_frame(params.frame_or_identity(), params.nus)
    tensor = scale(shift(scale(build_rp(p), -1.0 / 3.0), -params.mu), params.sign)
    _ensure_curvature(tensor)
    logger.debug(
        "built two-root model dim=%s mu=%s nus=%s sign=%s",
        params.dim,
        params.mu,
        params.nus,
        params.sign,
    )
    return tensor


# Arithmetic helpers
# ---


def scale(R: AlgebraicCurvatureTensor, c: float) -> AlgebraicCurvatureTensor:
    return float(c) * R


def shift(R: AlgebraicCurvatureTensor, c: float) -> AlgebraicCurvatureTensor:
    """`R - c R^0`. Moves every eigenvalue of every reduced Jacobi operator by `-c`."""

    return R - c * build_r0(R.dim)


def curvature_operator(
    R: AlgebraicCurvatureTensor, x: np.ndarray, y: np.ndarray, z: np.ndarray
) -> np.ndarray:
    """The vector `R(x, y)z = sum_l R(x, y, z, E_l) E_l`."""

    return np.einsum("ijkl,i,j,k->l", R.components, x, y, z)


def sectional_curvature(R: AlgebraicCurvatureTensor, x: np.ndarray, y: np.ndarray) -> float:
    """`R(x, y, y, x) / (g(x, x) g(y, y) - g(x, y)^2)`.

    :raises DegeneratePlane: If `x` and `y` are (nearly) parallel
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ex, ey, exy = float(x @ x), float(y @ y), float(x @ y)
    denom = ex * ey - exy**2
    if denom <= 1e-14 * ex * ey or ex == 0.0 or ey == 0.0:
        raise DegeneratePlane("Vectors do not span a plane")
    numer = float(np.einsum("ijkl,i,j,k,l->", R.components, x, y, y, x))
    return numer / denom


def constant_curvature(R: AlgebraicCurvatureTensor, rel_tol: float = 1e-6) -> float | None:
    """Return `kappa` when `R = kappa R^0` within `rel_tol * (1 + max|R|)`, else `None`."""

    kappa = float(R.components[0, 1, 1, 0])
    residual = float(np.max(np.abs(R.components - kappa * build_r0(R.dim).components)))
    if residual <= rel_tol * R.scale:
        return kappa
    return None


# File format
# ---


class TensorFile(BaseModel):
    """JSON tensor file.

    The writer emits canonical generators only: `i < j`, `k < l`, `(i, j) <= (k, l)` lexicographically, 1-based.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    dim: int = Field(ge=2)
    entries: list[tuple[int, int, int, int, float]]

    @classmethod
    def from_tensor(cls, R: AlgebraicCurvatureTensor) -> TensorFile:
        n = R.dim
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        entries = []
        for a, (i, j) in enumerate(pairs):
            for k, l in pairs[a:]:
                value = float(R.components[i, j, k, l])
                if value != 0.0:
                    entries.append((i + 1, j + 1, k + 1, l + 1, value))
        return cls(dim=n, entries=entries)

    def to_tensor(self) -> AlgebraicCurvatureTensor:
        return build_act(self.dim, self.entries)


def dump_tensor(R: AlgebraicCurvatureTensor, path: str | Path) -> None:
    """Write a tensor file."""

    Path(path).write_text(TensorFile.from_tensor(R).model_dump_json() + "\n", encoding="utf-8")


def load_tensor(path: str | Path) -> AlgebraicCurvatureTensor:
    """Read a tensor file.

    :param path: File path
    :type path: str | Path
    :raises InvalidTensorFile: If the file is not valid JSON or not a tensor file, with the parse location
    :raises SymmetryConflict: If entries conflict
    :raises BianchiViolation: If the densified tensor violates the first Bianchi identity
    :return: Tensor
    :rtype: AlgebraicCurvatureTensor
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidTensorFile(f"{path}: cannot read file: {exc}") from exc

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidTensorFile(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    try:
        tensor_file = TensorFile.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise InvalidTensorFile(f"{path}: at {loc or 'top level'}: {first['msg']}") from exc

    try:
        return tensor_file.to_tensor()
    except (SymmetryConflict, BianchiViolation):
        raise
    except ValueError as exc:
        raise InvalidTensorFile(f"{path}: {exc}") from exc
