import json

import numpy as np
import pytest

from jacobilab.analyses import factorizer
from jacobilab.analyses.factorizer import (
    FactorizationStage,
    RefutationInfo,
    SkewStructure,
    StructureFile,
    canonical_frame,
    classify_two_root_simple,
    estimate_mu,
    extract_p,
    predicted_nu,
    ps_eigenspaces,
    quadratic_form_family,
    reconstruct,
)
from jacobilab.analyses.spectral import _profile_from_values, jacobi_matrix
from jacobilab.exceptions import (
    MuNotConstant,
    NotSimpleRootTwoRoot,
    RankExceeded,
    SingularP,
    ZeroSimpleRoot,
)
from jacobilab.tensors import (
    build_r0,
    build_rp,
    build_two_root_model,
    skew_from_frame,
)

# test quadratic_form_family
# ---


def test_quadratic_forms_reproduce_jacobi_operator(make_two_root_model):
    model = make_two_root_model(nus=(3.0, 2.0, 1.0), frame_seed=1)
    family = quadratic_form_family(model)
    x = np.random.default_rng(1).standard_normal(6)
    jx = jacobi_matrix(model, x).entries

    assert family.dim == 6
    assert np.allclose(family.evaluate(x), jx)
    assert x @ family.trace_form() @ x == pytest.approx(np.trace(jx))
    assert np.allclose(family.forms, np.swapaxes(family.forms, 2, 3))


# test estimate_mu
# ---


@pytest.mark.parametrize("sign", [1, -1])
def test_estimate_mu(make_two_root_model, sign):
    model = make_two_root_model(mu=0.7, nus=(3.0, 2.0, 1.0), frame_seed=2, sign=sign)
    estimate = estimate_mu(model, samples=32)
    assert estimate.mu == pytest.approx(sign * 0.7, abs=1e-10)
    assert estimate.deviation < 1e-10


def test_estimate_mu_requires_dimension_above_four():
    p = skew_from_frame(np.eye(4), (3.0, 1.0))
    tensor = (-1.0 / 3.0) * build_rp(p) + build_r0(4)
    with pytest.raises(NotSimpleRootTwoRoot, match="n > 4"):
        estimate_mu(tensor, samples=8)


def test_estimate_mu_rejects_other_patterns(quaternionic_model):
    with pytest.raises(NotSimpleRootTwoRoot) as excinfo:
        estimate_mu(quaternionic_model(), samples=8)
    assert excinfo.value.stage == FactorizationStage.ESTIMATE_MU.value
    assert len(excinfo.value.witness) == 1


def test_estimate_mu_rejects_varying_root(monkeypatch: pytest.MonkeyPatch, make_two_root_model):
    model = make_two_root_model()
    points = np.eye(6)[:2]

    def fake_sample_profiles(R, samples, seed, rel_tol, threads):
        profiles = [
            _profile_from_values(points[0], np.array([1.0, 1.0, 1.0, 1.0, 4.0]), rel_tol),
            _profile_from_values(points[1], np.array([1.2, 1.2, 1.2, 1.2, 4.0]), rel_tol),
        ]
        return points, profiles

    monkeypatch.setattr(factorizer, "sample_profiles", fake_sample_profiles)
    with pytest.raises(MuNotConstant) as excinfo:
        estimate_mu(model, samples=2)
    assert excinfo.value.magnitude == pytest.approx(0.2)
    assert len(excinfo.value.witness) == 2


# test extract_p
# ---


@pytest.mark.parametrize("sign", [1, -1])
def test_extract_p_recovers_structure(make_two_root_params, sign):
    params = make_two_root_params(mu=0.7, nus=(3.0, 2.0, 1.0), frame_seed=3, sign=sign)
    model = build_two_root_model(params)
    true_p = skew_from_frame(params.frame_or_identity(), params.nus).matrix

    structure = extract_p(model, sign * 0.7)

    assert structure.sign == sign
    assert structure.mu == pytest.approx(0.7)
    # P and -P generate the same tensor
    assert min(
        np.max(np.abs(structure.p.matrix - true_p)), np.max(np.abs(structure.p.matrix + true_p))
    ) < 1e-8
    assert np.allclose(reconstruct(structure).components, model.components, atol=1e-10)


def test_extract_p_rejects_rank_defect(rank_defect_model):
    with pytest.raises(RankExceeded) as excinfo:
        extract_p(rank_defect_model(delta=1e-3), 1.0)
    assert excinfo.value.stage == FactorizationStage.EXTRACT_P.value
    assert excinfo.value.magnitude == pytest.approx(1e-3, rel=1e-6)


def test_extract_p_rejects_vanishing_shift():
    with pytest.raises(ZeroSimpleRoot) as excinfo:
        extract_p(2.0 * build_r0(6), 2.0)
    assert isinstance(excinfo.value, RankExceeded)


# test canonical_frame
# ---


@pytest.mark.parametrize("nus", [(3.0, 2.0, 1.0), (3.0, 3.0, 1.0), (2.0, 2.0, 2.0)])
def test_canonical_frame(nus):
    p = skew_from_frame(np.random.default_rng(4).permutation(np.eye(6)), nus)
    frame, found = canonical_frame(p)

    assert found == pytest.approx(nus)
    assert np.allclose(frame @ frame.T, np.eye(6), atol=1e-10)
    for i, nu in enumerate(found):
        assert np.allclose(p.matrix @ frame[2 * i], np.sqrt(nu) * frame[2 * i + 1], atol=1e-10)


def test_canonical_frame_rejects_singular_p():
    p = skew_from_frame(np.eye(6), (3.0, 2.0, 0.0))
    with pytest.raises(SingularP) as excinfo:
        canonical_frame(p)
    assert excinfo.value.stage == FactorizationStage.CANONICAL_FRAME.value


# test structure helpers
# ---


def test_ps_eigenspaces_group_equal_nus():
    p = skew_from_frame(np.eye(6), (3.0, 3.0, 1.0))
    blocks = ps_eigenspaces(SkewStructure(p=p, sign=1, mu=0.0))

    assert [b.nu for b in blocks] == pytest.approx([3.0, 1.0])
    assert [b.basis.shape[0] for b in blocks] == [4, 2]
    for block in blocks:
        assert np.allclose(block.basis @ p.gram(), block.nu * block.basis, atol=1e-10)


def test_predicted_nu():
    structure = SkewStructure(p=skew_from_frame(np.eye(6), (3.0, 2.0, 1.0)), sign=1, mu=0.0)
    assert predicted_nu(structure, np.eye(6)[0]) == pytest.approx(3.0)
    assert predicted_nu(structure, np.array([0.0, 0.0, 2.0, 0.0, 0.0, 0.0])) == pytest.approx(2.0)


def test_refutation_info_from_exception():
    exc = RankExceeded("too big", stage="extract_p", magnitude=0.5, witness=[np.ones(3)])
    info = RefutationInfo.from_exception(exc)
    assert info.error == "RankExceeded"
    assert info.magnitude == 0.5
    assert np.array_equal(info.witness[0], np.ones(3))


# test classify_two_root_simple
# ---


@pytest.mark.parametrize(
    "dim, nus, sign",
    [
        (6, (3.0, 2.0, 1.0), 1),
        (6, (2.0, 2.0, 2.0), -1),
        (10, (4.0, 4.0, 2.5, 1.0, 1.0), -1),
    ],
)
def test_classify_two_root_simple_certifies_models(make_two_root_model, dim, nus, sign):
    model = make_two_root_model(dim=dim, mu=-0.4, nus=nus, sign=sign, frame_seed=dim)
    report = classify_two_root_simple(model, samples=64, seed=3)

    assert report.certified
    assert report.stage is FactorizationStage.RECONSTRUCT
    assert report.pattern == (dim - 2, 1)
    assert report.refutation is None
    assert report.residual < 1e-8
    assert report.structure.sign == sign
    assert report.structure.mu == pytest.approx(-0.4, abs=1e-6)
    assert report.structure.nus == pytest.approx(nus, abs=1e-6)
    assert sum(b.basis.shape[0] for b in report.nu_blocks) == dim


def test_classify_two_root_simple_refutes_r0():
    report = classify_two_root_simple(build_r0(6), samples=16)
    assert not report.certified
    assert report.stage is FactorizationStage.CLASSIFY_K_ROOT
    assert report.refutation.message == "refuted: k=1 at stage classify_k_root"
    assert report.refutation.error == "NotTwoRoot"


def test_classify_two_root_simple_refutes_odd_dimension():
    report = classify_two_root_simple(build_r0(7), samples=16)
    assert report.stage is FactorizationStage.DIMENSION_SCREEN
    assert report.refutation.error == "DimensionScreenFailed"


def test_classify_two_root_simple_refutes_quaternionic(quaternionic_model):
    report = classify_two_root_simple(quaternionic_model(), samples=16)
    assert report.stage is FactorizationStage.MULTIPLICITY_SCREEN
    assert report.pattern is None
    assert report.refutation.message == "q=3 ≠ 1: no simple root"
    assert report.refutation.magnitude == 3.0


def test_classify_two_root_simple_refutes_rank_defect(rank_defect_model):
    report = classify_two_root_simple(rank_defect_model(), samples=16)
    assert report.stage is FactorizationStage.CLASSIFY_K_ROOT
    assert report.refutation.message == "refuted: k=3 at stage classify_k_root"


def test_classify_two_root_simple_refutes_dimension_four():
    p = skew_from_frame(np.eye(4), (3.0, 1.0))
    tensor = (-1.0 / 3.0) * build_rp(p) + build_r0(4)
    report = classify_two_root_simple(tensor, samples=16)
    assert report.stage is FactorizationStage.ESTIMATE_MU
    assert report.pattern == (2, 1)


def test_factorization_report_serializes(make_two_root_model):
    report = classify_two_root_simple(make_two_root_model(frame_seed=2), samples=16)
    payload = json.loads(report.model_dump_json())

    assert payload["certified"] is True
    assert payload["stage"] == "reconstruct"
    assert len(payload["structure"]["p"]) == 6
    assert payload["conventions"]["explicit"].startswith("R = sign")


# test StructureFile
# ---


def test_structure_file_from_report(make_two_root_model):
    report = classify_two_root_simple(make_two_root_model(mu=2.0, frame_seed=5), samples=16)
    structure = StructureFile.from_report(report)

    assert structure.sign == 1
    assert structure.mu == pytest.approx(2.0)
    assert structure.nus == pytest.approx((3.0, 3.0, 3.0))
    assert structure.P.shape == (6, 6)
    assert structure.frame.shape == (6, 6)


def test_structure_file_requires_certified_report():
    report = classify_two_root_simple(build_r0(6), samples=8)
    with pytest.raises(ValueError, match="certified"):
        StructureFile.from_report(report)
