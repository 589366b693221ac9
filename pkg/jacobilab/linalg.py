"""
Deterministic real linear algebra and sampling primitives.

Every other module builds on these helpers: symmetric eigendecomposition, eigenvalue clustering, orthogonal complements, sphere sampling and subspace intersections.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, field_validator

from jacobilab.exceptions import (
    DegenerateBasis,
    EmptyInput,
    InvalidMatrix,
    ZeroVector,
)
from jacobilab.utils import Matrix

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-6


class SymmetricMatrix(BaseModel):
    """Real symmetric matrix.

    Only the lower triangle of the input is kept; the upper triangle is its mirror image, so the stored entries are exactly symmetric.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: Matrix

    @field_validator("entries")
    @classmethod
    def _mirror_lower_triangle(cls, value: np.ndarray) -> np.ndarray:
        if value.shape[0] != value.shape[1] or value.shape[0] == 0:
            raise ValueError(f"Expected a non-empty square matrix, found {value.shape}")
        lower = np.tril(value)
        mirrored = lower + np.tril(value, -1).T
        mirrored.flags.writeable = False
        return mirrored

    @classmethod
    def from_array(cls, value: np.ndarray) -> "SymmetricMatrix":
        """Build from an array, raising `InvalidMatrix` instead of a validation error."""

        arr = np.asarray(value, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidMatrix(f"Expected a non-empty square matrix, found {arr.shape}")
        return cls(entries=arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


class EigenCluster(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    multiplicity: PositiveInt


class EigenClusterSet(BaseModel):
    """Eigenvalues merged into clusters, ordered by increasing value."""

    model_config = ConfigDict(frozen=True)

    clusters: tuple[EigenCluster, ...]
    tolerance_used: float

    @property
    def count(self) -> int:
        return len(self.clusters)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(c.value for c in self.clusters)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c.multiplicity for c in self.clusters)

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)


def sym_eigen(m: SymmetricMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    :param m: Symmetric matrix
    :type m: SymmetricMatrix
    :raises InvalidMatrix: If an entry is not finite
    :return: Ascending eigenvalues and the matrix whose columns are the matching orthonormal eigenvectors
    :rtype: tuple[np.ndarray, np.ndarray]
    """
    if not np.all(np.isfinite(m.entries)):
        raise InvalidMatrix("Matrix has non-finite entries")
    values, vectors = np.linalg.eigh(m.entries)
    return values, vectors


def orthonormal_complement(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of `x`.

    Uses the Householder reflection that maps `x` onto a coordinate axis, so the result is a smooth, deterministic function of `x`.

    :param x: Nonzero vector
    :type x: np.ndarray
    :raises ZeroVector: If `x` vanishes
    :return: Array of shape `(n - 1, n)` whose rows span the complement
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0 or not np.isfinite(norm):
        raise ZeroVector("Cannot complement the zero vector")

    u = x / norm
    v = u.copy()
    v[0] += 1.0 if u[0] >= 0 else -1.0
    h = np.eye(x.size) - 2.0 * np.outer(v, v) / (v @ v)
    # h is symmetric and orthogonal with h[:, 0] = -sign(u0) u
    return h[:, 1:].T.copy()


def cluster_eigenvalues(
    values: np.ndarray | list[float], rel_tol: float = DEFAULT_REL_TOL
) -> EigenClusterSet:
    """Merge nearly equal eigenvalues.

    Adjacent values are merged when their gap is at most `rel_tol * max(1, spectral radius)`. The value of a cluster is the mean of its members.

    :param values: Ascending eigenvalues
    :type values: np.ndarray | list[float]
    :param rel_tol: Relative gap threshold
    :type rel_tol: float
    :raises EmptyInput: If no values are given
    :raises ValueError: If `rel_tol` is not positive
    :return: Clusters in increasing order
    :rtype: EigenClusterSet
    """
    arr = np.sort(np.asarray(values, dtype=float).ravel())
    if arr.size == 0:
        raise EmptyInput("No eigenvalues to cluster")
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive. Found {rel_tol}")

    tol = rel_tol * max(1.0, float(np.max(np.abs(arr))))
    groups: list[list[float]] = [[float(arr[0])]]
    for prev, cur in zip(arr[:-1], arr[1:], strict=True):
        if cur - prev <= tol:
            groups[-1].append(float(cur))
        else:
            groups.append([float(cur)])

    clusters = tuple(
        EigenCluster(value=float(np.mean(g)), multiplicity=len(g)) for g in groups
    )
    return EigenClusterSet(clusters=clusters, tolerance_used=tol)


def sample_unit_sphere(dim: int, count: int, seed: int) -> np.ndarray:
    """Draw points uniformly from the unit sphere.

    Independent standard Gaussian coordinates are normalized, which is rotation invariant. The output is a pure function of `(dim, count, seed)`.

    :param dim: Ambient dimension
    :type dim: int
    :param count: Number of points
    :type count: int
    :param seed: Seed of the random stream
    :type seed: int
    :return: Array of shape `(count, dim)` with unit rows
    :rtype: np.ndarray
    """
    if dim < 1 or count < 1:
        raise ValueError(f"dim and count must be positive. Found {dim=}, {count=}")

    rng = np.random.default_rng(seed)
    points = rng.standard_normal((count, dim))
    norms = np.linalg.norm(points, axis=1)
    # a Gaussian draw of exact zero has probability zero, redraw anyway
    while np.any(norms == 0.0):
        bad = norms == 0.0
        points[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(points, axis=1)
    return points / norms[:, None]


def worker_seed(seed: int, worker_index: int) -> int:
    """Seed of an independent stream derived from a base seed."""

    return seed + worker_index


def _rank(vectors: np.ndarray, tol: float) -> int:
    if vectors.size == 0:
        return 0
    singular = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(singular > tol))


def subspace_intersection_dim(
    basis_a: np.ndarray | list[np.ndarray],
    basis_b: np.ndarray | list[np.ndarray],
    tol: float = 1e-9,
) -> int:
    """Dimension of the intersection of two spans.

    Computed as `dim A + dim B - rank [A; B]` from singular values.

    :param basis_a: Linearly independent vectors, one per row
    :type basis_a: np.ndarray | list[np.ndarray]
    :param basis_b: Linearly independent vectors, one per row
    :type basis_b: np.ndarray | list[np.ndarray]
    :param tol: Singular value threshold
    :type tol: float
    :raises DegenerateBasis: If either list is linearly dependent
    :return: Dimension of the intersection
    :rtype: int
    """
    a = np.atleast_2d(np.asarray(basis_a, dtype=float))
    b = np.atleast_2d(np.asarray(basis_b, dtype=float))
    if a.size == 0 or b.size == 0:
        return 0
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"Bases live in different spaces: {a.shape[1]} vs {b.shape[1]}")

    for name, basis in (("basis_a", a), ("basis_b", b)):
        if _rank(basis, tol) < basis.shape[0]:
            raise DegenerateBasis(f"{name} is linearly dependent")

    joint = _rank(np.vstack([a, b]), tol)
    result = a.shape[0] + b.shape[0] - joint
    logger.debug("intersection of spans of dims %s and %s: %s", a.shape[0], b.shape[0], result)
    return result
