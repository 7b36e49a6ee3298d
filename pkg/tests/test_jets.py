import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from wavefront import jets as J
from wavefront.jets import (CompositionBaseMismatch, Jet, JetMismatch, NonUnitDivisor,
                            NotDivisible)

U, V = sp.symbols("u v")


def sym_jet(expr, order, base=(0.0, 0.0), shape=()):
    """Oracle: jet of a sympy expression built from its derivatives."""
    derivs = {}
    for d in range(order + 1):
        for i in range(d + 1):
            j = d - i
            e = sp.diff(expr, U, i, V, j) if shape == () else [sp.diff(x, U, i, V, j) for x in expr]
            sub = {U: base[0], V: base[1]}
            derivs[(i, j)] = float(e.subs(sub)) if shape == () else [float(x.subs(sub)) for x in e]
    return Jet.from_derivatives(derivs, base, order)


def uv(order, base=(0.0, 0.0)):
    return Jet.variable("u", base, order), Jet.variable("v", base, order)


# -- examples ------------------------------------------------------------------
def test_product_of_conjugates():
    u, _ = uv(2)
    p = (1 + u) * (1 - u)
    assert p.partial(0, 0) == 1 and p.partial(1, 0) == 0 and p.partial(2, 0) == -2
    assert p.partial(0, 2) == 0


def test_cross_of_constant_and_linear():
    _, v = uv(3)
    a = Jet.constant([1.0, 0.0, 0.0], order=3)
    b = J.stack([0 * v, 2 + 0 * v, 3 * v])
    c = J.cross(a, b)
    np.testing.assert_allclose(c.value, [0, -3 * 0, 2])
    np.testing.assert_allclose(c.partial(0, 1), [0, -3, 0])


def test_sqrt_squares_back():
    _, v = uv(2)
    r = J.sqrt(4 + 9 * v * v)
    assert r.value == pytest.approx(2.0)
    assert r.partial(0, 2) / 2 == pytest.approx(9 / 4)
    np.testing.assert_allclose((r * r).c, (4 + 9 * v * v).c, atol=1e-14)


def test_compose_identity_and_swap():
    f = J.polynomial_jet({(1, 0): (1, 0, 0), (0, 2): (0, 1, 0), (0, 3): (0, 0, 1)}, order=4)
    u, v = uv(4)
    np.testing.assert_allclose(J.compose(f, J.stack([u, v])).c, f.c, atol=1e-15)
    swapped = J.compose(f, J.stack([v, u]))
    oracle = sym_jet([V, U ** 2, U ** 3], 4, shape=(3,))
    np.testing.assert_allclose(swapped.c, oracle.c, atol=1e-14)


def test_compose_against_substitution():
    f = J.polynomial_jet({(1, 0): (1, 0, 0), (0, 2): (0, 1, 0), (0, 3): (0, 0, 1)}, order=4)
    u, v = uv(4)
    g = J.compose(f, J.stack([u, v + u * u]), 4)
    oracle = sym_jet([U, (V + U ** 2) ** 2, (V + U ** 2) ** 3], 4, shape=(3,))
    np.testing.assert_allclose(g.c, oracle.c, atol=1e-13)
    assert g.partial(2, 0)[1] == pytest.approx(0.0)
    assert g.partial(4, 0)[1] == pytest.approx(24.0)


def test_divide_by_v_examples():
    f = J.polynomial_jet({(1, 0): (1, 0, 0), (0, 2): (0, 1, 0), (0, 3): (0, 0, 1)}, order=4)
    phi = f.dv().divide_by_v()
    np.testing.assert_allclose(phi.value, [0, 2, 0])
    np.testing.assert_allclose(phi.partial(0, 1), [0, 0, 3])
    u, v = uv(3)
    q = (v * (1 + u + v)).divide_by_v()
    np.testing.assert_allclose(q.c, (1 + u + v).truncate(2).c, atol=1e-15)
    # f_v of the normal form with b12 = 2, b03 = 1
    fv = J.stack([0 * v, v, 2 * u * v + v * v / 2])
    phi = fv.divide_by_v()
    np.testing.assert_allclose(phi.value, [0, 1, 0])
    np.testing.assert_allclose(phi.partial(1, 0), [0, 0, 2])
    np.testing.assert_allclose(phi.partial(0, 1), [0, 0, 0.5])


def test_divide_by_v_rejects_nonzero_row():
    u, v = uv(3)
    with pytest.raises(NotDivisible, match="not divisible by v"):
        (u + v).divide_by_v()


def test_divide_by_v_off_axis_matches_series():
    base = (0.2, 0.3)
    u, v = uv(4, base)
    a = 1 + u * v + v ** 2
    np.testing.assert_allclose((v * a).divide_by_v().c, a.truncate(3).c, atol=1e-12)


def test_error_messages():
    u, v = uv(2)
    with pytest.raises(NonUnitDivisor, match="non-unit divisor"):
        1.0 / u
    with pytest.raises(NonUnitDivisor, match="non-unit divisor"):
        J.sqrt(u * u)
    w = Jet.variable("u", (1.0, 0.0), 2)
    with pytest.raises(JetMismatch, match="jet mismatch"):
        u + w
    f = J.polynomial_jet({(1, 0): (1.0, 0.0)}, base=(0.5, 0.0))
    with pytest.raises(CompositionBaseMismatch, match="composition base mismatch"):
        J.compose(f, J.stack([u, v]))


def test_shift_is_exact_for_polynomials():
    coeffs = {(0, 0): 1.0, (2, 1): -2.0, (0, 3): 0.5, (1, 0): 3.0}
    p = J.polynomial_jet(coeffs, order=3)
    q = p.shift((0.3, -0.7))
    for pt in [(0.1, 0.2), (-0.4, 0.5)]:
        assert q.at(pt) == pytest.approx(p.at(pt), abs=1e-13)


# -- properties ------------------------------------------------------------------
coef = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def poly_jets(draw, order=None):
    n = order if order is not None else draw(st.integers(1, 5))
    vals = draw(st.lists(coef, min_size=(n + 1) ** 2, max_size=(n + 1) ** 2))
    c = np.array(vals).reshape(n + 1, n + 1)
    return Jet(c, (0.0, 0.0), n)


@given(poly_jets(order=4), poly_jets(order=4), poly_jets(order=4))
def test_ring_axioms(a, b, c):
    np.testing.assert_allclose(((a * b) * c).c, (a * (b * c)).c, atol=1e-9)
    np.testing.assert_allclose((a * (b + c)).c, (a * b + a * c).c, atol=1e-10)
    np.testing.assert_allclose((a * b).c, (b * a).c, atol=1e-12)
    np.testing.assert_allclose((a + b - b).c, a.c, atol=1e-12)


@given(poly_jets())
def test_divide_by_v_inverts_multiplication(a):
    v = Jet.variable("v", a.base, a.order + 1)
    a_up = a.shift(a.base, a.order + 1)
    np.testing.assert_allclose((v * a_up).divide_by_v().c, a.c, atol=1e-13)


@given(poly_jets())
def test_reciprocal_is_inverse(a):
    a = a + (5.0 - a.value) * 1.0  # unit constant term
    np.testing.assert_allclose((a * J.reciprocal(a)).c, Jet.constant(1.0, order=a.order).c, atol=1e-9)


@given(st.lists(coef, min_size=6, max_size=6), st.lists(coef, min_size=6, max_size=6),
       st.lists(coef, min_size=3, max_size=3))
def test_compose_agrees_with_substitution(pc, tc, fc):
    # f quadratic-cubic polynomial, theta a degree-2 chart through the origin
    f_expr = (pc[0] * U + pc[1] * V + pc[2] * U * V + pc[3] * V ** 2 + pc[4] * U ** 3
              + pc[5] * U * V ** 2)
    tu = U + tc[0] * V + tc[1] * U ** 2 + tc[2] * U * V
    tv = V + tc[3] * U + tc[4] * V ** 2 + tc[5] * U * V
    order = 4
    f = sym_jet(f_expr, order)
    u, v = uv(order)
    theta = J.stack([u + tc[0] * v + tc[1] * u * u + tc[2] * u * v,
                     v + tc[3] * u + tc[4] * v * v + tc[5] * u * v])
    got = J.compose(f, theta, order)
    oracle = sym_jet(sp.expand(f_expr.subs({U: tu, V: tv}, simultaneous=True)), order)
    np.testing.assert_allclose(got.c, oracle.c, atol=1e-9)


@given(st.lists(coef, min_size=10, max_size=10), st.tuples(coef, coef))
def test_partials_match_finite_differences(cs, base):
    base = (base[0] / 3, base[1] / 3)
    mons = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3), (2, 2)]
    p = J.polynomial_jet(dict(zip(mons, cs)), base=base, order=4)
    f = lambda x, y: sum(c * x ** i * y ** j for (i, j), c in zip(mons, cs))
    h = 1e-3
    x, y = base
    w = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]  # 4th-order central stencil
    fu = sum(c * f(x + k * h, y) for k, c in w) / h
    fv = sum(c * f(x, y + k * h) for k, c in w) / h
    fuv = sum(a * b * f(x + i * h, y + j * h) for i, a in w for j, b in w) / (h * h)
    for got, fd in [(p.partial(1, 0), fu), (p.partial(0, 1), fv), (p.partial(1, 1), fuv)]:
        assert abs(got - fd) <= 1e-6 * max(1.0, abs(fd))


def test_series_functions_against_sympy():
    base = (0.3, -0.2)
    u, v = uv(5, base)
    x = u * v + 0.5 * u
    for ours, expr in [(J.sin(x), sp.sin(U * V + U / 2)), (J.cos(x), sp.cos(U * V + U / 2)),
                       (J.exp(x), sp.exp(U * V + U / 2)), (J.power(1 + x, 1.5), (1 + U * V + U / 2) ** 1.5)]:
        np.testing.assert_allclose(ours.c, sym_jet(expr, 5, base).c, atol=1e-12)


def test_from_derivatives_stores_partials():
    j = Jet.from_derivatives({(0, 0): 1.0, (2, 1): 6.0}, order=3)
    assert j.partial(2, 1) == 6.0
    assert j.c[2, 1] == pytest.approx(6.0 / (math.factorial(2) * math.factorial(1)))
