"""Truncated Taylor series (jets) in two variables.

A :class:`Jet` holds the Taylor polynomial of a scalar- or vector-valued
function of ``(u, v)`` about a base point ``(u0, v0)``, truncated at total
degree ``order``.  Internally the coefficients are the monomial ones,

    f(u0 + du, v0 + dv) ~ sum_{i+j <= order} c[i, j] du**i dv**j,

so ``c[i, j] * i! * j!`` is the partial derivative ``d^{i+j} f / du^i dv^j``
at the base point (see :meth:`Jet.partial`).  Value shapes other than scalar
are carried as trailing array axes: a surface map is a jet of shape ``(3,)``,
a planar reparametrization (a "chart jet") one of shape ``(2,)``.

All arithmetic is exact up to the truncation order; jets are treated as
immutable.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from .errors import GeometryError

#: Relative tolerance for the vanishing ``v**0`` row in :meth:`Jet.divide_by_v`.
TAU_DIV = 1e-9


class JetMismatch(GeometryError):
    """Operands live at different base points."""


class NonUnitDivisor(GeometryError):
    """Quotient or root of a jet whose constant term vanishes."""


class NotDivisible(GeometryError):
    """Division by ``v`` of a jet that does not vanish on ``v = v0``."""


class CompositionBaseMismatch(GeometryError):
    """The inner map of a composition does not hit the outer base point."""


@lru_cache(maxsize=None)
def _tables(n: int):
    """Index tables for products of order-``n`` jets.

    Returns the triangle indices and, for every output monomial, the list of
    factor pairs contributing to it (sorted, with segment starts for
    ``np.add.reduceat``).
    """
    ti, tj = [], []
    for d in range(n + 1):
        for i in range(d, -1, -1):
            ti.append(i)
            tj.append(d - i)
    ti = np.array(ti)
    tj = np.array(tj)
    pairs = []
    for k, (oi, oj) in enumerate(zip(ti, tj)):
        for a in range(oi + 1):
            for b in range(oj + 1):
                pairs.append((k, a, b, oi - a, oj - b))
    pairs = np.array(pairs)
    starts = np.flatnonzero(np.r_[True, np.diff(pairs[:, 0]) != 0])
    return ti, tj, pairs[:, 1], pairs[:, 2], pairs[:, 3], pairs[:, 4], starts


@lru_cache(maxsize=None)
def _triangle_mask(n: int) -> np.ndarray:
    i, j = np.indices((n + 1, n + 1))
    return (i + j) <= n


def _binomial_shift(n_in: int, n_out: int, d: float) -> np.ndarray:
    """Matrix ``S[a, i] = C(a, i) d**(a-i)`` re-expanding powers about ``+d``."""
    s = np.zeros((n_in + 1, n_out + 1))
    for a in range(n_in + 1):
        for i in range(min(a, n_out) + 1):
            s[a, i] = comb(a, i) * d ** (a - i)
    return s


class Jet:
    """Truncated two-variable Taylor expansion with optional value shape."""

    __slots__ = ("c", "base", "order")

    def __init__(self, coeffs, base: Sequence[float] = (0.0, 0.0), order: int | None = None):
        c = np.asarray(coeffs, dtype=float)
        if order is None:
            order = c.shape[0] - 1
        if c.shape[0] != order + 1 or c.shape[1] != order + 1:
            raise ValueError("coefficient array must be (order+1, order+1, ...)")
        mask = _triangle_mask(order).reshape((order + 1, order + 1) + (1,) * (c.ndim - 2))
        self.c = np.where(mask, c, 0.0)
        self.base = (float(base[0]), float(base[1]))
        self.order = int(order)

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, base=(0.0, 0.0), order: int = 0) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        return cls(c, base, order)

    @classmethod
    def variable(cls, name: str, base=(0.0, 0.0), order: int = 1) -> "Jet":
        """The coordinate function ``u`` or ``v`` as a jet."""
        c = np.zeros((order + 1, order + 1))
        if name == "u":
            c[0, 0] = base[0]
            if order >= 1:
                c[1, 0] = 1.0
        elif name == "v":
            c[0, 0] = base[1]
            if order >= 1:
                c[0, 1] = 1.0
        else:
            raise ValueError(f"unknown variable {name!r}")
        return cls(c, base, order)

    @classmethod
    def from_derivatives(cls, derivs: dict, base=(0.0, 0.0), order: int = 5) -> "Jet":
        """Build a jet from partial derivative values keyed by ``(i, j)``."""
        sample = np.asarray(next(iter(derivs.values())), dtype=float)
        c = np.zeros((order + 1, order + 1) + sample.shape)
        for (i, j), val in derivs.items():
            if i < 0 or j < 0 or i + j > order:
                raise ValueError(f"multi-index {(i, j)} outside order {order}")
            c[i, j] = np.asarray(val, dtype=float) / (factorial(i) * factorial(j))
        return cls(c, base, order)

    # -- inspection -------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.c.shape[2:]

    @property
    def value(self):
        v = self.c[0, 0]
        return float(v) if v.ndim == 0 else v.copy()

    def partial(self, i: int, j: int):
        """Partial derivative ``d^{i+j}/du^i dv^j`` at the base point."""
        if i + j > self.order:
            raise ValueError(f"derivative {(i, j)} exceeds jet order {self.order}")
        v = self.c[i, j] * (factorial(i) * factorial(j))
        return float(v) if np.ndim(v) == 0 else v

    def derivatives(self) -> dict:
        """All stored partial derivatives keyed by multi-index."""
        out = {}
        for d in range(self.order + 1):
            for i in range(d, -1, -1):
                out[(i, d - i)] = self.partial(i, d - i)
        return out

    def grad(self) -> np.ndarray:
        return np.array([self.partial(1, 0), self.partial(0, 1)])

    def hessian(self) -> np.ndarray:
        uv = self.partial(1, 1)
        return np.array([[self.partial(2, 0), uv], [uv, self.partial(0, 2)]])

    def scale(self) -> float:
        """Largest coefficient magnitude (zero jets give 0)."""
        return float(np.max(np.abs(self.c))) if self.c.size else 0.0

    def __getitem__(self, k) -> "Jet":
        return Jet(self.c[(slice(None), slice(None)) + np.index_exp[k]], self.base, self.order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, base={self.base}, shape={self.shape}, value={self.value})"

    # -- order and base handling -----------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet by truncation")
        return Jet(self.c[: order + 1, : order + 1], self.base, order)

    def _check_base(self, other: "Jet") -> None:
        if not (np.isclose(self.base[0], other.base[0], rtol=0, atol=1e-12)
                and np.isclose(self.base[1], other.base[1], rtol=0, atol=1e-12)):
            raise JetMismatch(f"jet mismatch: base points {self.base} and {other.base}")

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check_base(other)
            return other
        return Jet.constant(other, self.base, self.order)

    def shift(self, base: Sequence[float], order: int | None = None) -> "Jet":
        """Re-expand the truncated polynomial about ``base``.

        Exact for polynomials; ``order`` may exceed ``self.order`` in which case
        the missing coefficients are taken to be zero.
        """
        order = self.order if order is None else order
        du = float(base[0]) - self.base[0]
        dv = float(base[1]) - self.base[1]
        su = _binomial_shift(self.order, order, du)
        sv = _binomial_shift(self.order, order, dv)
        c = np.einsum("ai,bj,ab...->ij...", su, sv, self.c)
        return Jet(c, base, order)

    def __call__(self, du: float, dv: float):
        """Evaluate the truncated polynomial at offset ``(du, dv)`` from the base."""
        pu = du ** np.arange(self.order + 1)
        pv = dv ** np.arange(self.order + 1)
        v = np.einsum("i,j,ij...->...", pu, pv, self.c)
        return float(v) if np.ndim(v) == 0 else v

    def at(self, point: Sequence[float]):
        return self(point[0] - self.base[0], point[1] - self.base[1])

    def u_part(self) -> "Jet":
        """The jet of ``u -> f(u, v0)``, viewed as a function of ``(u, v)``."""
        c = np.zeros_like(self.c)
        c[:, 0] = self.c[:, 0]
        return Jet(c, self.base, self.order)

    # -- calculus ---------------------------------------------------------
    def du(self) -> "Jet":
        n = self.order
        if n == 0:
            return Jet(np.zeros_like(self.c), self.base, 0)
        k = np.arange(1, n + 1).reshape((n, 1) + (1,) * len(self.shape))
        return Jet(self.c[1:, :n] * k, self.base, n - 1)

    def dv(self) -> "Jet":
        n = self.order
        if n == 0:
            return Jet(np.zeros_like(self.c), self.base, 0)
        k = np.arange(1, n + 1).reshape((1, n) + (1,) * len(self.shape))
        return Jet(self.c[:n, 1:] * k, self.base, n - 1)

    def along(self, field: "Jet") -> "Jet":
        """Directional derivative ``X f = X_u f_u + X_v f_v`` for a 2-vector field."""
        return field[0] * self.du() + field[1] * self.dv()

    def divide_by_v(self, tol: float = TAU_DIV, check_order: int | None = None) -> "Jet":
        """Return ``b`` with ``(v - 0) * b = self``; order drops by one.

        At base points on ``v = 0`` this is a coefficient shift and requires the
        ``dv**0`` row to vanish (only its terms of degree ``<= check_order`` when
        given; the rest is discarded).  Elsewhere ``1/v`` is expanded as a series.
        """
        n = self.order
        if n == 0:
            raise NotDivisible("not divisible by v: order-0 jet")
        if self.base[1] == 0.0:
            sc = self.scale()
            k = n + 1 if check_order is None else check_order + 1
            row = np.max(np.abs(self.c[:k, 0])) if sc > 0 else 0.0
            if sc > 0 and row > tol * sc:
                raise NotDivisible(f"not divisible by v: j=0 row of size {row:.3e}")
            return Jet(self.c[:n, 1:], self.base, n - 1)
        v = Jet.variable("v", self.base, n)
        return (self * reciprocal(v)).truncate(n - 1)

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "Jet":
        return Jet(-self.c, self.base, self.order)

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        n = min(self.order, other.order)
        a = self.c[: n + 1, : n + 1]
        b = other.c[: n + 1, : n + 1]
        return Jet(a + b, self.base, n)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if other.ndim == 0:
                return Jet(self.c * float(other), self.base, self.order)
            return self * Jet.constant(other, self.base, self.order)
        self._check_base(other)
        return _product(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * reciprocal(other)
        other = np.asarray(other, dtype=float)
        if other.ndim == 0:
            if other == 0:
                raise NonUnitDivisor("non-unit divisor: division by zero")
            return Jet(self.c / float(other), self.base, self.order)
        return self * (1.0 / other)

    def __rtruediv__(self, other) -> "Jet":
        return reciprocal(self) * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(1.0, self.base, self.order)
            for _ in range(p):
                out = out * self
            return out
        return power(self, float(p))


def _product(a: Jet, b: Jet) -> Jet:
    n = min(a.order, b.order)
    ti, tj, ai, aj, bi, bj, starts = _tables(n)
    xa = a.c[ai, aj]
    xb = b.c[bi, bj]
    sa, sb = a.shape, b.shape
    if sa != sb:
        if sa == ():
            xa = xa.reshape(xa.shape + (1,) * len(sb))
        elif sb == ():
            xb = xb.reshape(xb.shape + (1,) * len(sa))
        else:
            raise JetMismatch(f"jet mismatch: value shapes {sa} and {sb}")
    sums = np.add.reduceat(xa * xb, starts, axis=0)
    shape = np.broadcast_shapes(sa, sb)
    c = np.zeros((n + 1, n + 1) + shape)
    c[ti, tj] = sums
    return Jet(c, a.base, n)


def _nilpotent(a: Jet) -> tuple[float, Jet]:
    if a.shape != ():
        raise ValueError("series functions need a scalar jet")
    a0 = a.value
    c = a.c.copy()
    c[0, 0] = 0.0
    return a0, Jet(c, a.base, a.order)


def apply_series(a: Jet, taylor: Sequence[float]) -> Jet:
    """Compose a scalar jet with a 1-D function given by its Taylor coefficients.

    ``taylor[k] = g^{(k)}(a0) / k!``; needs at least ``a.order + 1`` entries.
    """
    _, r = _nilpotent(a)
    n = a.order
    acc = Jet.constant(taylor[n], a.base, n)
    for k in range(n - 1, -1, -1):
        acc = r * acc + taylor[k]
    return acc


def _unit_check(a: Jet, what: str) -> float:
    a0 = a.value
    # compare with the linear part only: high coefficients of a formal series may grow geometrically
    sc = a.truncate(min(a.order, 1)).scale()
    if a0 == 0.0 or abs(a0) <= 1e-15 * sc:
        raise NonUnitDivisor(f"non-unit divisor: {what} of a jet with vanishing constant term")
    return a0


def reciprocal(a: Jet) -> Jet:
    a0 = _unit_check(a, "reciprocal")
    return apply_series(a, [(-1.0) ** k / a0 ** (k + 1) for k in range(a.order + 1)])


def power(a: Jet, p: float) -> Jet:
    a0 = _unit_check(a, "power")
    if a0 < 0:
        raise NonUnitDivisor("non-unit divisor: fractional power of a negative constant term")
    coeffs = []
    binom = 1.0
    for k in range(a.order + 1):
        coeffs.append(binom * a0 ** (p - k))
        binom *= (p - k) / (k + 1)
    return apply_series(a, coeffs)


def sqrt(a: Jet) -> Jet:
    return power(a, 0.5)


def _trig_series(x0: float, n: int, start: int) -> list[float]:
    # derivatives of sin cycle sin, cos, -sin, -cos
    cyc = [np.sin(x0), np.cos(x0), -np.sin(x0), -np.cos(x0)]
    return [cyc[(k + start) % 4] / factorial(k) for k in range(n + 1)]


def sin(a: Jet) -> Jet:
    return apply_series(a, _trig_series(a.value, a.order, 0))


def cos(a: Jet) -> Jet:
    return apply_series(a, _trig_series(a.value, a.order, 1))


def exp(a: Jet) -> Jet:
    e = np.exp(a.value)
    return apply_series(a, [e / factorial(k) for k in range(a.order + 1)])


# -- vector helpers ---------------------------------------------------------
def stack(parts: Sequence[Jet]) -> Jet:
    base = parts[0].base
    n = min(p.order for p in parts)
    for p in parts[1:]:
        parts[0]._check_base(p)
    c = np.stack([p.c[: n + 1, : n + 1] for p in parts], axis=-1)
    return Jet(c, base, n)


def dot(a: Jet, b: Jet) -> Jet:
    p = a * b
    return Jet(p.c.sum(axis=-1), p.base, p.order)


def cross(a: Jet, b: Jet) -> Jet:
    ax, ay, az = a[0], a[1], a[2]
    bx, by, bz = b[0], b[1], b[2]
    return stack([ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx])


def det3(a: Jet, b: Jet, c: Jet) -> Jet:
    return dot(cross(a, b), c)


def det2(a: Jet, b: Jet) -> Jet:
    return a[0] * b[1] - a[1] * b[0]


def norm(a: Jet) -> Jet:
    return sqrt(dot(a, a))


def normalize(a: Jet) -> Jet:
    return a * reciprocal(norm(a))


def compose(f: Jet, theta: Jet, order: int | None = None) -> Jet:
    """Jet of ``f o theta`` at ``theta.base``.

    ``f`` is a jet at the point ``theta(q)``; ``theta`` a chart jet (shape
    ``(2,)``) at ``q``. The result has order at most ``f.order``.
    """
    if theta.shape != (2,):
        raise ValueError("inner map must be a chart jet of shape (2,)")
    t0 = theta.value
    if not (abs(t0[0] - f.base[0]) <= 1e-10 * max(1.0, abs(f.base[0]))
            and abs(t0[1] - f.base[1]) <= 1e-10 * max(1.0, abs(f.base[1]))):
        raise CompositionBaseMismatch(
            f"composition base mismatch: inner map hits {tuple(t0)}, outer base {f.base}")
    # coefficients of f o theta above the order of f are not determined by f
    n = min(f.order, theta.order) if order is None else min(order, f.order)
    th = theta.truncate(min(n, theta.order))
    du = th[0] - f.base[0]
    dv = th[1] - f.base[1]
    du.c[0, 0] = 0.0
    dv.c[0, 0] = 0.0
    pv = [Jet.constant(1.0, th.base, th.order)]
    for _ in range(n):
        pv.append(pv[-1] * dv)
    vshape = f.shape
    acc = None
    for i in range(n, -1, -1):
        inner_c = np.zeros((th.order + 1, th.order + 1) + vshape)
        for j in range(n - i + 1):
            coef = f.c[i, j]
            if np.any(coef):
                inner_c += pv[j].c.reshape(pv[j].c.shape + (1,) * len(vshape)) * coef
        inner = Jet(inner_c, th.base, th.order)
        acc = inner if acc is None else acc * du + inner
    return acc


def chart_jet(u: Jet, v: Jet) -> Jet:
    """A planar map ``(u, v) -> (theta_u, theta_v)`` packaged as a shape-(2,) jet."""
    return stack([u, v])


def polynomial_jet(coeffs: dict, base=(0.0, 0.0), order: int | None = None) -> Jet:
    """Jet of a polynomial given by monomial coefficients ``{(i, j): value}`` about 0.

    The polynomial is re-expanded about ``base``; ``order`` defaults to its degree.
    """
    deg = max(i + j for i, j in coeffs)
    sample = np.asarray(next(iter(coeffs.values())), dtype=float)
    c = np.zeros((deg + 1, deg + 1) + sample.shape)
    for (i, j), val in coeffs.items():
        c[i, j] += np.asarray(val, dtype=float)
    jet = Jet(c, (0.0, 0.0), deg)
    return jet.shift(base, deg if order is None else order)


def lift(fn: Callable[[Jet, Jet], Jet], base=(0.0, 0.0), order: int = 5) -> Jet:
    """Evaluate ``fn(u, v)`` on coordinate jets, giving the jet of ``fn`` at ``base``."""
    return fn(Jet.variable("u", base, order), Jet.variable("v", base, order))
