import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavefront import classify as K
from wavefront import jets as J
from wavefront import models as M
from wavefront.errors import GeometryError
from wavefront.jets import Jet
from wavefront.surface import SurfaceSpec, random_rotation

A_MODELS = ["cuspidal-edge", "swallowtail", "cuspidal-butterfly", "cuspidal-lips", "cuspidal-beaks"]


@pytest.mark.parametrize("name", A_MODELS)
def test_a_models_identify_themselves(name):
    rep = K.classify_singular_point(M.make_model(name), (0, 0))
    assert rep.label == name and rep.corank == 1 and rep.front


@pytest.mark.parametrize("name", ["d4-plus", "d4-minus"])
def test_d4_rejected(name):
    rep = K.classify_singular_point(M.make_model(name), (0, 0))
    assert rep.label == "unsupported-corank-2" and rep.corank == 2


def test_evidence_values():
    ev = K.classify_singular_point(M.cuspidal_edge(), (0, 0)).evidence
    assert ev["eta_lambda"] == pytest.approx(2.0)
    ev = K.classify_singular_point(M.swallowtail(), (0, 0)).evidence
    assert ev["eta_lambda"] == pytest.approx(0.0, abs=1e-12)
    assert ev["eta_eta_lambda"] == pytest.approx(24.0)
    assert ev["grad_lambda"] == pytest.approx([2.0, 0.0])
    ev = K.classify_singular_point(M.cuspidal_lips(), (0, 0)).evidence
    assert ev["grad_lambda"] == pytest.approx([0, 0], abs=1e-12) and ev["det_hessian"] > 0


def test_report_kinds_and_admissibility():
    rep = K.classify_singular_point(M.swallowtail(), (0, 0))
    assert (rep.kind, rep.admissible) == ("second", True)
    rep = K.classify_singular_point(M.swallowtail(), (-6 * 0.01, 0.1))
    assert (rep.kind, rep.label) == ("first", "cuspidal-edge")
    assert K.classify_singular_point(M.cuspidal_beaks(), (0, 0)).kind == "degenerate"


def test_frontal_is_not_guessed():
    rep = K.classify_singular_point(M.frontal_second_kind(), (0, 0))
    assert rep.label == "unresolved (frontal)" and rep.front is False


def test_regular_point_rejected():
    with pytest.raises(GeometryError, match="not singular"):
        K.classify_singular_point(M.plane(), (0, 0))


def test_report_serializes():
    d = K.classify_singular_point(M.swallowtail(), (0, 0)).to_dict()
    back = json.loads(json.dumps(d))
    assert back["label"] == "swallowtail" and back["location"] == [0.0, 0.0]


def test_eta_extension_examples():
    eta = K.eta_extension(M.cuspidal_edge(), (0.0, 0.0))
    np.testing.assert_allclose(eta.c[0, 0], [0, 1])
    assert np.abs(eta.c).sum() == pytest.approx(1.0)
    for a in (0.0, 0.1, -0.15):
        q = (-6 * a * a, a)
        d = K.eta_samples(M.swallowtail(), [q])[0]
        np.testing.assert_allclose(d, [0, 1], atol=1e-12)
    nf = M.make_normal_form(M.RUNNING_EXAMPLE)
    np.testing.assert_allclose(K.eta_samples(nf, [(0.05, 0.0), (-0.05, 0.0)]), [[0, 1], [0, 1]], atol=1e-12)


@pytest.mark.parametrize("name", A_MODELS)
def test_criteria_do_not_depend_on_eta_extension(name):
    s = M.make_model(name)
    a = K.lambda_evidence(s, (0.0, 0.0), "kernel")
    b = K.lambda_evidence(s, (0.0, 0.0), "perturbed")
    assert K.label_from_evidence(a) == K.label_from_evidence(b)
    # the pattern is well defined up to the first derivative that does not vanish
    tau = K.TAU_VANISH * a["scale"]
    keys = ("eta_lambda", "eta_eta_lambda", "eta_eta_eta_lambda")
    if name in ("cuspidal-lips", "cuspidal-beaks"):
        keys = ("eta_eta_lambda",)
    for key in keys:
        assert (abs(a[key]) > tau) == (abs(b[key]) > tau)
        if abs(a[key]) > tau:
            break


def test_locate_degenerate_point():
    q = K.locate_degenerate(M.cuspidal_lips(), (0.01, -0.02))
    np.testing.assert_allclose(q, [0, 0], atol=1e-10)


def reparametrized(surface: SurfaceSpec, coeffs) -> SurfaceSpec:
    """``f o theta`` for the near-identity chart ``theta = (u + a v^2 + b uv, v + c u^2 + d uv)``."""
    a, b, c, d = coeffs
    n = 10
    u, v = Jet.variable("u", (0.0, 0.0), n), Jet.variable("v", (0.0, 0.0), n)
    theta = J.stack([u + a * v * v + b * u * v, v + c * u * u + d * u * v])
    g = J.compose(surface.jet((0.0, 0.0), n), theta, n)
    nn = J.compose(surface.normal_numerator((0.0, 0.0), n), theta, n)
    return SurfaceSpec(map=g, normal=nn, exact=True, kind="polynomial")


small = st.floats(-0.5, 0.5, allow_nan=False)


@given(st.sampled_from(A_MODELS), st.tuples(small, small, small, small))
def test_invariance_under_reparametrization(name, coeffs):
    s = reparametrized(M.make_model(name), coeffs)
    assert K.classify_singular_point(s, (0, 0), check_admissible=False).label == name


@pytest.mark.parametrize("seed", range(3))
def test_invariance_under_rigid_motion_and_flip(seed):
    rng = np.random.default_rng(seed)
    R, t = random_rotation(rng), rng.normal(size=3)
    for name in A_MODELS:
        s = M.make_model(name)
        for variant in (s.moved(R, t), s.flipped(), s.moved(R, t).flipped()):
            assert K.classify_singular_point(variant, (0, 0)).label == name
