import numpy as np
import pytest

from jacobilab.exceptions import DegenerateBasis, EmptyInput, InvalidMatrix, ZeroVector
from jacobilab.linalg import (
    SymmetricMatrix,
    cluster_eigenvalues,
    orthonormal_complement,
    sample_unit_sphere,
    subspace_intersection_dim,
    sym_eigen,
    worker_seed,
)

# test SymmetricMatrix
# ---


def test_symmetric_matrix_mirrors_lower_triangle():
    m = SymmetricMatrix(entries=[[1.0, 99.0], [2.0, 3.0]])
    assert np.array_equal(m.entries, [[1.0, 2.0], [2.0, 3.0]])
    assert m.dim == 2


def test_symmetric_matrix_from_array_rejects_non_square():
    with pytest.raises(InvalidMatrix):
        SymmetricMatrix.from_array(np.zeros((2, 3)))


# test sym_eigen
# ---


def test_sym_eigen_diagonalizes():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((5, 5))
    m = SymmetricMatrix(entries=a + a.T)
    values, vectors = sym_eigen(m)

    assert np.all(np.diff(values) >= 0)
    assert np.allclose(vectors.T @ vectors, np.eye(5), atol=1e-12)
    assert np.allclose(m.entries @ vectors, vectors * values, atol=1e-10)


@pytest.mark.parametrize("dim", [2, 5, 9])
@pytest.mark.parametrize("seed", range(8))
def test_sym_eigen_trace_and_residual(dim, seed):
    a = np.random.default_rng(seed).uniform(-10.0, 10.0, (dim, dim))
    m = SymmetricMatrix(entries=a + a.T)
    values, vectors = sym_eigen(m)
    tol = 1e-10 * (1.0 + np.max(np.abs(m.entries)))

    assert abs(np.sum(values) - np.trace(m.entries)) <= dim * tol
    for value, vector in zip(values, vectors.T, strict=True):
        assert np.linalg.norm(m.entries @ vector - value * vector) <= dim * tol


def test_sym_eigen_rejects_non_finite():
    with pytest.raises(InvalidMatrix):
        sym_eigen(SymmetricMatrix(entries=[[np.nan, 0.0], [0.0, 1.0]]))


# test orthonormal_complement
# ---


@pytest.mark.parametrize("x", [[1.0, 0.0, 0.0], [-2.0, 1.0, 3.0], [0.0, 0.0, -1.0]])
def test_orthonormal_complement(x):
    x = np.array(x)
    basis = orthonormal_complement(x)

    assert basis.shape == (2, 3)
    assert np.allclose(basis @ basis.T, np.eye(2), atol=1e-12)
    assert np.allclose(basis @ x, 0.0, atol=1e-12)


def test_orthonormal_complement_rejects_zero():
    with pytest.raises(ZeroVector):
        orthonormal_complement(np.zeros(4))


# test cluster_eigenvalues
# ---


def test_cluster_eigenvalues_merges_close_values():
    clusters = cluster_eigenvalues([1.0, 1.0 + 1e-9, 4.0, 1.0 - 1e-9])
    assert clusters.count == 2
    assert clusters.multiplicities == (3, 1)
    assert clusters.values[0] == pytest.approx(1.0, abs=1e-12)
    assert clusters.dimension == 4


def test_cluster_eigenvalues_tolerance_scales_with_radius():
    # gap 1e-4 relative to 1e3 is below 1e-6 * 1e3
    clusters = cluster_eigenvalues([1000.0, 1000.0001], rel_tol=1e-6)
    assert clusters.count == 1
    assert clusters.tolerance_used == pytest.approx(1000.0001e-6)


def test_cluster_eigenvalues_keeps_separated_values():
    clusters = cluster_eigenvalues([0.0, 0.5, 1.0])
    assert clusters.count == 3


@pytest.mark.parametrize("seed", range(10))
def test_cluster_eigenvalues_is_idempotent(seed):
    rng = np.random.default_rng(seed)
    base = rng.uniform(-3.0, 3.0, 6)
    values = np.concatenate([base, base[:3] + rng.uniform(-1e-9, 1e-9, 3)])
    clusters = cluster_eigenvalues(values)
    again = cluster_eigenvalues(clusters.values)

    assert again.values == clusters.values
    assert set(again.multiplicities) == {1}


def test_cluster_eigenvalues_rejects_empty_and_bad_tolerance():
    with pytest.raises(EmptyInput):
        cluster_eigenvalues([])
    with pytest.raises(ValueError):
        cluster_eigenvalues([1.0], rel_tol=0.0)


# test sample_unit_sphere
# ---


def test_sample_unit_sphere_is_deterministic_and_unit():
    a = sample_unit_sphere(6, 32, seed=7)
    b = sample_unit_sphere(6, 32, seed=7)

    assert a.shape == (32, 6)
    assert np.array_equal(a, b)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    assert not np.array_equal(a, sample_unit_sphere(6, 32, seed=8))


def test_sample_unit_sphere_prefix_is_stable():
    assert np.array_equal(sample_unit_sphere(4, 8, 3), sample_unit_sphere(4, 16, 3)[:8])


@pytest.mark.parametrize("dim", [3, 6, 10])
def test_sample_unit_sphere_mean_shrinks(dim):
    # |mean|^2 is about 1 / count
    means = {
        count: np.linalg.norm(sample_unit_sphere(dim, count, 5).mean(axis=0))
        for count in (64, 4096)
    }
    assert means[64] <= 4.0 / 8.0
    assert means[4096] <= 4.0 / 64.0


def test_sample_unit_sphere_rejects_empty():
    with pytest.raises(ValueError):
        sample_unit_sphere(0, 4, 0)


def test_worker_seed_offsets():
    assert worker_seed(10, 2) == 12


# test subspace_intersection_dim
# ---


def test_subspace_intersection_dim():
    eye = np.eye(4)
    assert subspace_intersection_dim(eye[:2], eye[1:3]) == 1
    assert subspace_intersection_dim(eye[:2], eye[2:]) == 0
    assert subspace_intersection_dim(eye[:3], eye[1:]) == 2


def test_subspace_intersection_dim_empty_input():
    assert subspace_intersection_dim(np.zeros((0, 3)), np.eye(3)) == 0


def test_subspace_intersection_dim_rejects_dependent_basis():
    with pytest.raises(DegenerateBasis):
        subspace_intersection_dim([[1.0, 0.0], [2.0, 0.0]], [[0.0, 1.0]])
