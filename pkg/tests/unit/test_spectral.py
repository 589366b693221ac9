import numpy as np
import pytest

from jacobilab.analyses.spectral import (
    classify_k_root,
    eigenspaces,
    jacobi_matrix,
    k_stein_invariants,
    osserman_test,
    reduced_jacobi,
    sample_profiles,
    spectral_profile,
)
from jacobilab.exceptions import NotTwoRoot, ZeroVector
from jacobilab.tensors import (
    build_r0,
    build_rp,
    build_two_root_model,
    curvature_operator,
    random_frame,
    skew_from_frame,
)

# test jacobi_matrix
# ---


def test_jacobi_matrix_of_r0():
    x = np.array([0.6, 0.0, 0.8, 0.0])
    assert np.allclose(jacobi_matrix(build_r0(4), x).entries, np.eye(4) - np.outer(x, x))


def test_jacobi_matrix_of_rp():
    p = skew_from_frame(random_frame(6, 5), (3.0, 2.0, 1.0))
    x = np.random.default_rng(5).standard_normal(6)
    px = p.matrix @ x
    assert np.allclose(jacobi_matrix(build_rp(p), x).entries, -3.0 * np.outer(px, px))


def test_jacobi_matrix_kills_x(make_two_root_model):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=3)
    x = np.random.default_rng(3).standard_normal(6)
    assert np.allclose(jacobi_matrix(model, x).entries @ x, 0.0, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_jacobi_operator_is_self_adjoint(random_curvature, make_two_root_model, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (v / np.linalg.norm(v) for v in rng.standard_normal((3, 6)))
    model = make_two_root_model(mu=0.5, nus=(3.0, 2.0, 1.0), frame_seed=seed, sign=-1)
    for tensor in (random_curvature(6, seed), model):
        jy = curvature_operator(tensor, y, x, x)
        jz = curvature_operator(tensor, z, x, x)
        assert jy @ z == pytest.approx(y @ jz, abs=1e-10 * tensor.scale)
        assert np.allclose(jacobi_matrix(tensor, x).entries @ y, jy, atol=1e-10 * tensor.scale)


def test_reduced_jacobi_shape_and_zero_vector():
    assert reduced_jacobi(build_r0(5), np.ones(5)).dim == 4
    with pytest.raises(ZeroVector):
        reduced_jacobi(build_r0(5), np.zeros(5))


# test spectral_profile
# ---


def test_spectral_profile_of_two_root_model(make_two_root_model):
    model = make_two_root_model(mu=1.0, nus=(3.0, 2.0, 1.0))
    eye = np.eye(6)

    at_e1 = spectral_profile(model, eye[0])
    assert at_e1.is_two_root
    assert (at_e1.p, at_e1.q) == (4, 1)
    assert at_e1.mu_x == pytest.approx(1.0)
    assert at_e1.nu_x == pytest.approx(4.0)
    assert not at_e1.swapped

    assert spectral_profile(model, eye[4]).nu_x == pytest.approx(2.0)


def test_spectral_profile_is_homogeneous(make_two_root_model):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=8)
    x = np.random.default_rng(8).standard_normal(6)
    assert spectral_profile(model, 3.0 * x).nu_x == pytest.approx(spectral_profile(model, x).nu_x)


def test_spectral_profile_negative_sign_is_swapped(make_two_root_model):
    profile = spectral_profile(make_two_root_model(sign=-1), np.eye(6)[0])
    assert profile.swapped
    assert (profile.p, profile.q) == (1, 4)
    assert profile.mu_x == pytest.approx(-4.0)
    assert profile.nu_x == pytest.approx(-1.0)


def test_spectral_profile_of_r0_has_one_cluster():
    profile = spectral_profile(build_r0(4), np.ones(4))
    assert not profile.is_two_root
    assert profile.mu_x is None
    assert profile.clusters.values == pytest.approx((1.0,))


# test eigenspaces
# ---


def test_eigenspaces_split_complement(make_two_root_model):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=6)
    x = np.random.default_rng(6).standard_normal(6)
    x /= np.linalg.norm(x)
    pair = eigenspaces(model, x)

    assert pair.m_basis.shape == (4, 6)
    assert pair.n_basis.shape == (1, 6)
    assert pair.residual < 1e-10
    basis = np.vstack([x, pair.m_basis, pair.n_basis])
    assert np.allclose(basis @ basis.T, np.eye(6), atol=1e-10)


def test_eigenspaces_n_is_spanned_by_px(make_two_root_params):
    params = make_two_root_params(nus=(3.0, 2.0, 1.0), frame_seed=6)
    model = build_two_root_model(params)
    p = skew_from_frame(params.frame_or_identity(), params.nus)
    x = np.random.default_rng(9).standard_normal(6)
    px = p.matrix @ x
    n = eigenspaces(model, x).n_basis[0]
    assert abs(n @ px) == pytest.approx(np.linalg.norm(px))


def test_eigenspaces_refute_one_root():
    with pytest.raises(NotTwoRoot) as excinfo:
        eigenspaces(build_r0(4), np.ones(4))
    assert excinfo.value.stage == "eigenspaces"
    assert len(excinfo.value.witness) == 1


# test sample_profiles
# ---


def test_sample_profiles_is_deterministic(make_two_root_model):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=1)
    points_a, profiles_a = sample_profiles(model, 8, 4)
    points_b, profiles_b = sample_profiles(model, 8, 4, threads=3)

    assert np.array_equal(points_a, points_b)
    assert [p.nu_x for p in profiles_a] == [p.nu_x for p in profiles_b]


# test classify_k_root
# ---


def test_classify_k_root_r0():
    verdict = classify_k_root(build_r0(5), samples=32)
    assert verdict.k == 1
    assert verdict.multiplicities == (4,)
    assert verdict.statement == "consistent with 1-root at 32 samples"


@pytest.mark.parametrize("sign, multiplicities", [(1, (4, 1)), (-1, (1, 4))])
def test_classify_k_root_two_root(make_two_root_model, sign, multiplicities):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=2, sign=sign)
    verdict = classify_k_root(model, samples=32)
    assert verdict.k == 2
    assert verdict.multiplicities == multiplicities


@pytest.mark.parametrize("c", [0.25, 3.0, 40.0])
def test_verdicts_are_invariant_under_positive_scaling(make_two_root_model, c):
    graded = make_two_root_model(mu=1.0, nus=(3.0, 2.0, 1.0), frame_seed=2)
    uniform = make_two_root_model(mu=1.0, frame_seed=2)

    for tensor in (graded, uniform):
        base = classify_k_root(tensor, samples=32)
        scaled = classify_k_root(c * tensor, samples=32)
        assert (scaled.k, scaled.multiplicities) == (base.k, base.multiplicities)

    base = osserman_test(graded, samples=32)
    scaled = osserman_test(c * graded, samples=32)
    assert not scaled.osserman
    assert scaled.max_deviation == pytest.approx(c * base.max_deviation)
    assert osserman_test(c * uniform, samples=32).osserman


def test_classify_k_root_quaternionic(quaternionic_model):
    verdict = classify_k_root(quaternionic_model(), samples=32)
    assert verdict.k == 2
    assert verdict.multiplicities == (4, 3)


def test_classify_k_root_misses_measure_zero_degeneracy():
    # nu_X vanishes on the kernel of P, so the root count drops there
    p = np.zeros((4, 4))
    p[0, 1], p[1, 0] = -1.0, 1.0
    tensor = build_r0(4) + (-1.0 / 3.0) * build_rp(p)
    eye = np.eye(4)

    assert spectral_profile(tensor, eye[2]).clusters.count == 1
    assert spectral_profile(tensor, eye[0]).clusters.count == 2
    verdict = classify_k_root(tensor, samples=64)
    assert verdict.k == 2


def test_classify_k_root_reports_witnesses_when_varying(make_two_root_model):
    # with a coarse tolerance the roots 1 and 1 + nu_X merge only where nu_X <= 1.5
    model = make_two_root_model(mu=1.0, nus=(3.0, 2.0, 1.0))
    verdict = classify_k_root(model, samples=64, rel_tol=0.6)

    assert verdict.k is None
    assert verdict.multiplicities is None
    assert verdict.statement == "varying number of eigenvalues across 64 samples"
    first, other = verdict.witnesses
    counts = {
        spectral_profile(model, first, 0.6).clusters.count,
        spectral_profile(model, other, 0.6).clusters.count,
    }
    assert counts == {1, 2}


# test osserman_test
# ---


def test_osserman_test_accepts_constant_spectrum(make_two_root_model):
    verdict = osserman_test(make_two_root_model(frame_seed=3), samples=64)
    assert verdict.osserman
    assert verdict.max_deviation < 1e-9


def test_osserman_test_rejects_varying_spectrum(make_two_root_model):
    verdict = osserman_test(make_two_root_model(nus=(3.0, 2.0, 1.0)), samples=64)
    assert not verdict.osserman
    low, high = verdict.witness_spectra
    assert abs(max(low) - max(high)) == pytest.approx(verdict.max_deviation)


def test_osserman_test_needs_two_samples():
    with pytest.raises(ValueError):
        osserman_test(build_r0(3), samples=1)


# test k_stein_invariants
# ---


def test_k_stein_invariants_of_r0():
    stein = k_stein_invariants(build_r0(5), k_max=3, samples=16)
    assert stein.constants == pytest.approx((4.0, 4.0, 4.0))
    assert stein.max_deviation < 1e-10
    assert stein.formula_values is None


def test_k_stein_invariants_cross_check(make_two_root_model):
    stein = k_stein_invariants(make_two_root_model(mu=1.0, frame_seed=5), samples=32)
    assert stein.constants == pytest.approx((8.0, 20.0, 68.0, 260.0))
    assert stein.formula_values == pytest.approx((8.0, 20.0, 68.0, 260.0))
    assert stein.formula_deviation < 1e-8


def test_k_stein_invariants_vary_off_osserman(make_two_root_model):
    stein = k_stein_invariants(make_two_root_model(nus=(3.0, 2.0, 1.0)), k_max=2, samples=32)
    assert stein.max_deviation > 0.1
    assert stein.formula_values is None


def test_k_stein_invariants_rejects_k_max():
    with pytest.raises(ValueError):
        k_stein_invariants(build_r0(3), k_max=0)
