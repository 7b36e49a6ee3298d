import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import normal_forms
from wavefront import chart as C
from wavefront import invariants as I
from wavefront import jets as J
from wavefront import models as M
from wavefront.errors import BranchAmbiguity, WrongKind
from wavefront.surface import random_rotation

RUN = M.RUNNING_EXAMPLE


def nf_chart(c=RUN, flip=False):
    s = M.make_normal_form(c)
    return C.adapted_chart(s.flipped() if flip else s)


def richardson(fn, v0=1e-2, levels=5):
    """Limit of fn(v) as v -> 0 by repeated Richardson extrapolation on v, v/2, ..."""
    vals = [fn(v0 / 2 ** k) for k in range(levels)]
    table = [vals]
    for m in range(1, levels):
        prev = table[-1]
        table.append([(2 ** m * prev[k + 1] - prev[k]) / (2 ** m - 1) for k in range(len(prev) - 1)])
    return table[-1][0], abs(table[-1][0] - table[-2][-1])


# -- fundamental data -----------------------------------------------------------
def test_fundamental_data_cusp():
    fd = I.fundamental_data(C.straighten(M.cuspidal_edge()))
    vals = [x.value for x in (fd.E, fd.F, fd.G, fd.L, fd.M, fd.N)]
    # N~(0) = <phi_v, nu>(0) = <(0, 0, 6), (0, 0, 1)> / 2
    np.testing.assert_allclose(vals, [1, 0, 4, 0, 0, 3], atol=1e-13)


def test_fundamental_data_running_example():
    fd = I.fundamental_data(nf_chart())
    vals = [x.value for x in (fd.E, fd.F, fd.G, fd.L, fd.M, fd.N)]
    np.testing.assert_allclose(vals, [1, 0, 1, 2, 2, 0.5], atol=1e-13)


# -- edge invariants --------------------------------------------------------------
def test_edge_invariants_examples():
    e = I.edge_invariants(C.straighten(M.cuspidal_edge()))
    assert (e.kappa_s, e.kappa_nu, e.kappa_t) == pytest.approx((0, 0, 0), abs=1e-13)
    assert e.kappa_c == pytest.approx(12 / 2 ** 2.5)
    e = I.edge_invariants(nf_chart())
    assert (e.kappa_s, e.kappa_nu, e.kappa_c, e.kappa_t) == pytest.approx((1, 2, 1, 2))
    e = I.edge_invariants(nf_chart(M.NormalFormCoeffs(b03=2.0)))
    assert (e.kappa_s, e.kappa_nu, e.kappa_c, e.kappa_t) == pytest.approx((0, 0, 2, 0), abs=1e-13)


@given(normal_forms(tails=True))
def test_edge_invariants_read_off_coefficients(c):
    e = I.edge_invariants(nf_chart(c))
    assert e.kappa_s == pytest.approx(c.a20, abs=1e-9)
    assert e.kappa_nu == pytest.approx(c.b20, abs=1e-9)
    assert e.kappa_c == pytest.approx(c.b03, abs=1e-9)
    assert e.kappa_t == pytest.approx(c.b12, abs=1e-9)
    assert e.kappa_c == pytest.approx(e.sigma * e.kappa_c_nu)


def test_wrong_kind_errors():
    with pytest.raises(WrongKind, match="wrong kind"):
        I.edge_invariants(C.straighten(M.swallowtail()))
    with pytest.raises(WrongKind, match="wrong kind"):
        I.second_kind_invariants(nf_chart())


def test_second_kind_invariants():
    sw = C.straighten(M.swallowtail())
    s = I.second_kind_invariants(sw)
    fd = I.fundamental_data(sw)
    cr = np.cross(fd.frame.phi.value, fd.frame.fv.value)
    assert s.mu_c == pytest.approx(fd.G.value * fd.L.value / (cr @ cr))
    assert s.mu_c != 0 and s.front
    flipped = I.second_kind_invariants(C.straighten(M.swallowtail().flipped()))
    assert flipped.mu_c == pytest.approx(-s.mu_c)
    fr = I.second_kind_invariants(C.straighten(M.frontal_second_kind()))
    assert fr.mu_c == pytest.approx(0.0, abs=1e-12) and not fr.front


# -- principal curvatures -----------------------------------------------------------
def test_sphere_is_ambiguous():
    sph = M.sphere()
    f = sph.jet((0.1, 0.2), 2)
    with pytest.raises(BranchAmbiguity, match="branch ambiguity"):
        I.regular_branches(f, sph.unit_normal((0.1, 0.2), 1))


def test_cusp_branches_near_axis():
    ch = C.straighten(M.cuspidal_edge())
    vs = [10.0 ** -k for k in range(2, 7)]
    bs = [I.principal_branches(ch, (0.0, v)) for v in vs]
    assert abs(bs[-1].kappa_plus) < 1e-5
    prod = [b.kappa_minus * v for b, v in zip(bs, vs)]
    assert prod[-1] == pytest.approx(prod[-2], rel=1e-4) and abs(prod[-1]) > 0.1


def test_running_example_bounded_limit():
    ch = nf_chart()
    lim, err = richardson(lambda v: I.principal_branches(ch, (0.0, v)).kappa_plus)
    assert lim == pytest.approx(2.0, abs=1e-6) and err < 1e-6


@given(normal_forms(), st.floats(-0.05, 0.05), st.floats(0.01, 0.05), st.booleans())
def test_branch_identities(c, u, v, neg):
    ch = nf_chart(c)
    v = -v if neg else v
    try:
        b = I.principal_branches(ch, (u, v))
    except BranchAmbiguity:
        return
    assert b.kappa_plus * b.kappa_minus == pytest.approx(b.K, rel=1e-9, abs=1e-9)
    assert b.kappa_plus + b.kappa_minus == pytest.approx(2 * b.H, rel=1e-9, abs=1e-9)
    # independent regular-surface computation at the same point
    f = ch.surface.jet((u, v), 2)
    nu = ch.frame((u, v), 1).nu
    r = I.regular_branches(f, nu)
    assert r.K == pytest.approx(b.K, rel=1e-7, abs=1e-7)
    assert r.H == pytest.approx(b.H, rel=1e-7, abs=1e-7)
    assert sorted([r.kappa_plus, r.kappa_minus]) == pytest.approx(sorted([b.kappa_plus, b.kappa_minus]),
                                                                  rel=1e-6, abs=1e-6)


@given(normal_forms(tails=True))
def test_weingarten_reconstruction(c):
    fd = I.fundamental_data(nf_chart(c), (0.0, 0.0), 3)
    nu_u, nu_v = fd.weingarten()
    ref_u, ref_v = fd.frame.nu.du(), fd.frame.nu.dv()
    for got, ref in ((nu_u, ref_u), (nu_v, ref_v)):
        n = min(got.order, ref.order)
        scale = max(1.0, np.abs(ref.c).max())
        assert np.abs(got.truncate(n).c - ref.truncate(n).c).max() <= 1e-8 * scale


def test_second_kind_weingarten():
    fd = I.fundamental_data(C.straighten(M.swallowtail(k=1.0)), (0.0, 0.0), 3)
    nu_u, nu_v = fd.weingarten()
    for got, ref in ((nu_u, fd.frame.nu.du()), (nu_v, fd.frame.nu.dv())):
        n = min(got.order, ref.order)
        assert np.abs(got.truncate(n).c - ref.truncate(n).c).max() <= 1e-8


@given(normal_forms(), st.floats(-0.05, 0.05), st.floats(0.01, 0.05))
def test_gauss_and_mean_curvature_identities(c, u, v):
    ch = nf_chart(c)
    fd = I.fundamental_data(ch, (u, v), 0)
    f = ch.surface.jet((u, v), 2)
    nu = fd.frame.nu.value
    fu, fv = f.partial(1, 0), f.partial(0, 1)
    E, F, G = fu @ fu, fu @ fv, fv @ fv
    L, Mm, N = f.partial(2, 0) @ nu, f.partial(1, 1) @ nu, f.partial(0, 2) @ nu
    K = (L * N - Mm * Mm) / (E * G - F * F)
    H = (E * N - 2 * F * Mm + G * L) / (2 * (E * G - F * F))
    vD = v * fd.D.value
    assert fd.numerator().value == pytest.approx(K * vD, rel=1e-7, abs=1e-9)
    assert fd.trace().value == pytest.approx(2 * H * vD, rel=1e-7, abs=1e-9)


# -- bounded branch ---------------------------------------------------------------------
def test_bounded_branch_examples():
    b = I.bounded_branch(nf_chart())
    assert (b.exists, b.value, b.which) == (True, pytest.approx(2.0), "plus")
    b = I.bounded_branch(nf_chart(flip=True))
    assert (b.exists, b.value, b.which) == (True, pytest.approx(-2.0), "minus")


def test_swallowtail_bounded_branch_limit():
    surf = M.swallowtail(k=1.0)
    ch = C.straighten(surf)
    b = I.bounded_branch(ch)
    mu = I.second_kind_invariants(ch).mu_c
    assert b.which == ("plus" if mu > 0 else "minus")
    fd = I.fundamental_data(ch, (0.0, 0.0), 0)
    assert b.value == pytest.approx(fd.N.value / fd.G.value)

    def branch(v):
        br = I.principal_branches(ch, (0.0, v))
        return br.kappa_plus if b.which == "plus" else br.kappa_minus

    lim, err = richardson(branch)
    assert lim == pytest.approx(b.value, abs=1e-6) and err < 1e-6


def test_frontal_has_no_bounded_branch():
    with pytest.raises(I.FrontalPoint, match="frontal, no bounded branch guarantee"):
        I.bounded_branch(C.straighten(M.frontal_second_kind()))


def test_bounded_jet_matches_pointwise_branch():
    ch = nf_chart()
    kj = I.bounded_kappa_jet(ch, (0.0, 0.0))
    assert kj.value == pytest.approx(2.0)
    np.testing.assert_allclose(kj.grad(), [3.0, -8.5], atol=1e-10)
    # truncation error of the order-5 jet is O(|q|^6)
    for q in [(0.001, 0.002), (-0.002, -0.001)]:
        assert kj.at(q) == pytest.approx(I.principal_branches(ch, q).kappa_plus, abs=1e-10)


# -- principal vectors and ridges -----------------------------------------------------
def test_principal_vector_examples():
    np.testing.assert_allclose(I.principal_vector(nf_chart()), [0.5, -2.0], atol=1e-12)
    # a circle of cuspidal edges is a line of curvature: v is tangent to it
    pv = I.principal_vector(C.adapted_chart(M.rotational_cusp()))
    assert abs(pv[1]) <= 1e-12 * abs(pv[0])
    ch = C.straighten(M.swallowtail(k=1.0))
    fd = I.fundamental_data(ch, (0.0, 0.0), 0)
    pv = I.principal_vector(ch)
    s = np.sign(fd.trace().value)
    assert pv[1] == pytest.approx(s * fd.L.value) and pv[1] != 0


def test_principal_vector_solves_eigen_problem():
    ch = nf_chart()
    for v in (1e-3, -1e-3):
        fd = I.fundamental_data(ch, (0.0, v), 0)
        k = I.principal_branches(ch, (0.0, v)).kappa_plus
        vec = I.principal_vector_jet(ch, (0.0, v), 1).value
        E, F, G, L, Mm, N = (x.value for x in (fd.E, fd.F, fd.G, fd.L, fd.M, fd.N))
        # fundamental forms in (u, v) coordinates, using f_v = v phi
        II = np.array([[L, v * Mm], [v * Mm, v * N]])
        I1 = np.array([[E, v * F], [v * F, v * v * G]])
        assert np.linalg.norm((II - k * I1) @ vec) <= 1e-9 * np.linalg.norm(II @ vec)


def test_ridge_order_examples():
    r = I.ridge_order(nf_chart())
    assert r.order == -1 and r.derivatives[0] == pytest.approx(37 / 2) and r.fd_agrees
    assert r.derivatives[0] == pytest.approx(0.5 * 3 + (-2) * (-8.5))
    r = I.ridge_order(nf_chart(M.ridge_tuned(RUN)))
    assert r.order == 0 and abs(r.derivatives[0]) < 1e-9 and r.fd_agrees


def test_line_of_curvature():
    assert I.line_of_curvature_test(nf_chart(M.NormalFormCoeffs(b20=1.0, b30=1.0)))
    assert not I.line_of_curvature_test(nf_chart())
    assert not I.line_of_curvature_test(nf_chart(M.NormalFormCoeffs(b20=1.0, a20=0.5)))
    assert not I.line_of_curvature_test(C.straighten(M.swallowtail(k=1.0)))
    assert I.line_of_curvature_test(C.adapted_chart(M.rotational_cusp()))


# -- symmetries ---------------------------------------------------------------------------
@given(normal_forms(tails=True))
def test_orientation_flip(c):
    a, b = nf_chart(c), nf_chart(c, flip=True)
    ea, eb = I.edge_invariants(a), I.edge_invariants(b)
    assert eb.kappa_s == pytest.approx(ea.kappa_s, abs=1e-12)
    assert eb.kappa_nu == pytest.approx(-ea.kappa_nu, abs=1e-12)
    assert eb.kappa_c_nu == pytest.approx(-ea.kappa_c_nu, abs=1e-12)
    assert eb.kappa_t_nu == pytest.approx(-ea.kappa_t_nu, abs=1e-12)
    assert (eb.kappa_c, eb.kappa_t) == pytest.approx((ea.kappa_c, ea.kappa_t), abs=1e-12)
    ba, bb = I.bounded_branch(a), I.bounded_branch(b)
    assert bb.value == pytest.approx(-ba.value) and {ba.which, bb.which} == {"plus", "minus"}
    np.testing.assert_allclose(I.principal_vector(b), I.principal_vector(a), atol=1e-12)
    assert I.ridge_order(a).order == I.ridge_order(b).order


@pytest.mark.parametrize("seed", range(5))
def test_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    R, t = random_rotation(rng), rng.normal(size=3)
    for surf, kind in [(M.cuspidal_edge(), "first"), (M.swallowtail(k=1.0), "second")]:
        a, b = C.straighten(surf), C.straighten(surf.moved(R, t))
        if kind == "first":
            ea, eb = I.edge_invariants(a), I.edge_invariants(b)
            np.testing.assert_allclose(np.array(list(eb.__dict__.values()), float),
                                       np.array(list(ea.__dict__.values()), float), atol=1e-9)
        else:
            sa, sb = I.second_kind_invariants(a), I.second_kind_invariants(b)
            assert (sb.mu_c, sb.kappa_nu) == pytest.approx((sa.mu_c, sa.kappa_nu), abs=1e-9)
        assert I.bounded_branch(b).value == pytest.approx(I.bounded_branch(a).value, abs=1e-9)
        assert I.ridge_order(b).order == I.ridge_order(a).order


# -- profiles ---------------------------------------------------------------------------
def test_profile_csv():
    prof = I.invariant_profile(nf_chart(), np.linspace(-0.02, 0.02, 3))
    buf = io.StringIO()
    prof.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(I.PROFILE_COLUMNS)
    assert len(lines) == 4
    mid = dict(zip(I.PROFILE_COLUMNS, lines[2].split(",")))
    assert float(mid["kappa_nu"]) == 2.0 and float(mid["kappa_plus"]) == 2.0
    assert math.isnan(float(mid["mu_c"]))
