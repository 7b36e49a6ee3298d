"""Singular curves, null directions, adapted charts and the phi-frame.

The signed area density is ``lambda = det(f_u, f_v, nu)``; its zero set is the
singular curve.  An adapted chart puts that curve on the u-axis with the null
direction normalized to ``d/dv`` (first kind) or ``d/du + eps(u) d/dv``
(second kind), so that ``df(eta) = v * phi`` with ``phi`` nonvanishing.  The
frame ``{f_u, phi, nu}`` (first kind) or ``{phi, f_v, nu}`` (second kind)
replaces the degenerate ``{f_u, f_v, nu}``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .errors import (Corank2Point, DegeneratePoint, FrameCollapse, NormalUnavailable,
                     NotSingular, StraighteningFailed, TraceFailure)
from .jets import Jet, NotDivisible
from .surface import SurfaceSpec

TAU_TRACE = 1e-10   # corrector stop: |lambda| / |grad lambda|
TAU_RANK = 1e-8     # singular value threshold relative to the jet scale
TAU_KIND = 1e-7     # |det(gamma', eta)| below this counts as second kind
TAU_FIT = 1e-7      # residual bound for fitted curves and fitted charts
FIT_CHECK_ORDER = 2  # fitted charts: only the low-degree v**0 terms are reliable
TAU_ORTH = 1e-9
CHART_ORDER = 10
MAX_EXACT_ORDER = 16
MAX_FRAME_ORDER = 20
NEWTON_ITERS = 20


def derivative_scale(j: Jet) -> float:
    """Largest coefficient magnitude ignoring the constant term."""
    c = j.c.copy()
    c[0, 0] = 0.0
    return float(np.max(np.abs(c))) if c.size else 0.0


def partial_scale(j: Jet, m: int) -> float:
    """Largest ``|j(0)|`` or ``|partial|`` of order ``1..m``.

    Thresholds on derivatives of order ``m`` use this rather than the whole jet,
    whose high coefficients can grow geometrically with the order.
    """
    vals = [abs(float(j.value))] + [abs(float(j.partial(i, k - i)))
                                    for k in range(1, min(m, j.order) + 1) for i in range(k + 1)]
    return max(vals)


def _clockwise(g: np.ndarray) -> np.ndarray:
    return np.array([g[1], -g[0]])


# -- rank and kernel --------------------------------------------------------
def corank(surface: SurfaceSpec, point) -> int:
    f = surface.jet(point, 2)
    scale = max(derivative_scale(f), 1e-300)
    jac = np.column_stack([f.partial(1, 0), f.partial(0, 1)])
    s = np.linalg.svd(jac, compute_uv=False)
    return int(np.sum(s <= TAU_RANK * scale))


def _orient(d: np.ndarray, prev=None) -> np.ndarray:
    if prev is not None:
        return d if d @ prev >= 0 else -d
    k = int(np.argmax(np.abs(d)))
    if abs(abs(d[0]) - abs(d[1])) < 1e-12:
        k = 1
    return d if d[k] > 0 else -d


def null_direction(surface: SurfaceSpec, point, prev=None) -> np.ndarray:
    """Unit kernel vector of ``df`` at a corank-one singular point."""
    f = surface.jet(point, 2)
    scale = max(derivative_scale(f), 1e-300)
    jac = np.column_stack([f.partial(1, 0), f.partial(0, 1)])
    _, s, vt = np.linalg.svd(jac)
    if s[0] <= TAU_RANK * scale:
        raise Corank2Point(f"corank-2 point at {tuple(float(x) for x in point)}")
    if s[1] > 1e-6 * scale:
        raise NotSingular(f"not singular: df has rank 2 at {tuple(point)}")
    return _orient(vt[1], prev)


def kernel_field(f: Jet) -> Jet:
    """Algebraic extension of the null direction as a shape-(2,) jet.

    Uses ``(-<a,b>, |a|^2)`` or ``(|b|^2, -<a,b>)`` with ``a = f_u, b = f_v``;
    on the singular set either one spans ker df.  Normalized by its value at
    the base point.
    """
    a, b = f.du(), f.dv()
    ab = J.dot(a, b)
    aa, bb = J.dot(a, a), J.dot(b, b)
    if aa.value >= bb.value:
        eta = J.stack([-ab, aa])
    else:
        eta = J.stack([bb, -ab])
    size = float(np.linalg.norm(eta.value))
    if size == 0.0:
        raise Corank2Point(f"corank-2 point at {tuple(float(x) for x in f.base)}")
    return eta * (1.0 / size)


# -- normals and the signed area density ------------------------------------
def normal_jet(surface: SurfaceSpec, point, order: int) -> Jet:
    """Unit normal jet: explicit numerator if present, else the phi-frame normal."""
    if surface.normal is not None:
        return surface.unit_normal(point, order)
    if surface.declared_adapted:
        return adapted_chart(surface).frame(point, order).nu
    raise NormalUnavailable("normal unavailable: supply normal_coeffs or an adapted chart")


def signed_area_density(surface: SurfaceSpec, point, order: int | None = None) -> Jet:
    """Jet of ``lambda = det(f_u, f_v, nu)`` at ``point``."""
    if order is None:
        order = surface.truncation_order - 1
    f = surface.jet(point, order + 1)
    nu = normal_jet(surface, point, order)
    return J.det3(f.du(), f.dv(), nu)


def lambda_function(surface: SurfaceSpec) -> Callable:
    def fn(q):
        lam = signed_area_density(surface, q, 1)
        return lam.value, lam.grad()
    return fn


# -- implicit curve tracing -------------------------------------------------
def _inside(q, window) -> bool:
    return window[0] <= q[0] <= window[1] and window[2] <= q[1] <= window[3]


def newton_correct(fn, q, tol: float = TAU_TRACE, max_iter: int = NEWTON_ITERS) -> np.ndarray:
    """Project ``q`` onto ``{F = 0}`` with minimum-norm Newton steps (damped)."""
    q = np.asarray(q, dtype=float)
    for _ in range(max_iter):
        val, g = fn(q)
        gn2 = float(g @ g)
        if gn2 == 0.0:
            raise TraceFailure(f"trace failure: vanishing gradient at {tuple(q)}")
        if abs(val) / math.sqrt(gn2) <= tol:
            return q
        step = -val * g / gn2
        damp = 1.0
        while True:
            qn = q + damp * step
            vn, _ = fn(qn)
            if abs(vn) < abs(val) or damp < 1.0 / 64:
                break
            damp *= 0.5
        q = qn
    val, g = fn(q)
    if abs(val) / max(math.sqrt(float(g @ g)), 1e-300) <= tol:
        return q
    raise TraceFailure(f"trace failure: corrector did not converge near {tuple(q)}")


@dataclass
class Trace:
    points: np.ndarray
    tangents: np.ndarray
    closed: bool


def trace_implicit(fn, seed, h: float, window, max_points: int = 5000,
                   tol: float = TAU_TRACE) -> Trace:
    """Predictor-corrector polyline of ``{F = 0}`` through ``seed``.

    ``fn(q)`` returns ``(F(q), grad F(q))``.  The tangent is the gradient
    rotated clockwise, kept continuous along the march.  Both directions are
    traced until the window is left; a return to the seed closes the curve.
    """
    q0 = newton_correct(fn, seed, tol)
    _, g0 = fn(q0)
    if np.linalg.norm(g0) == 0.0:
        raise DegeneratePoint("degenerate seed")
    t0 = _clockwise(g0) / np.linalg.norm(g0)

    def march(direction):
        pts, tans = [q0], [direction]
        q, t = q0, direction
        far = 0.0
        while len(pts) < max_points:
            hh = h
            for _ in range(5):
                try:
                    q1 = newton_correct(fn, q + hh * t, tol)
                    if 0.2 * hh < np.linalg.norm(q1 - q) <= 2 * hh:
                        break
                except TraceFailure:
                    pass
                hh *= 0.5
            else:
                raise TraceFailure(f"trace failure: cannot continue past {tuple(q)}")
            _, g = fn(q1)
            t1 = _clockwise(g) / np.linalg.norm(g)
            if t1 @ t < 0:
                t1 = -t1
            if not _inside(q1, window):
                return pts, tans, False
            d0 = np.linalg.norm(q1 - q0)
            far = max(far, d0)
            if far > 3 * h and d0 < 1.5 * h:
                return pts, tans, True
            pts.append(q1)
            tans.append(t1)
            q, t = q1, t1
        return pts, tans, False

    fp, ft, closed = march(t0)
    if closed:
        return Trace(np.array(fp), np.array(ft), True)
    bp, bt, _ = march(-t0)
    pts = bp[:0:-1] + fp
    tans = [-t for t in bt[:0:-1]] + ft
    return Trace(np.array(pts), np.array(tans), False)


# -- singular curves --------------------------------------------------------
@dataclass
class SingularCurve:
    points: np.ndarray
    tangents: np.ndarray
    null_dirs: np.ndarray
    lam: np.ndarray
    kinds: list
    h: float
    closed: bool = False

    def __len__(self) -> int:
        return len(self.points)

    def nearest(self, point) -> int:
        return int(np.argmin(np.linalg.norm(self.points - np.asarray(point), axis=1)))

    def write_csv(self, fh, fmt=repr) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "lambda", "eta_u", "eta_v", "kind"])
        for q, lam, eta, kind in zip(self.points, self.lam, self.null_dirs, self.kinds):
            w.writerow([fmt(q[0]), fmt(q[1]), fmt(lam), fmt(eta[0]), fmt(eta[1]), kind])


def _box(seed, window, pad=0.1):
    if window is None:
        return (seed[0] - pad, seed[0] + pad, seed[1] - pad, seed[1] + pad)
    return tuple(float(x) for x in window)


def trace_singular_curve(surface: SurfaceSpec, seed, window=None, h: float = 1e-2) -> SingularCurve:
    fn = lambda_function(surface)
    seed = np.asarray(seed, dtype=float)
    lam = signed_area_density(surface, seed, 2)
    if np.linalg.norm(lam.grad()) <= 1e-8 * max(derivative_scale(lam), 1e-300):
        raise DegeneratePoint(f"degenerate seed: d lambda vanishes at {tuple(seed)}")
    tr = trace_implicit(fn, seed, h, _box(seed, window))
    etas, lams, kinds = [], [], []
    prev = None
    for q, t in zip(tr.points, tr.tangents):
        eta = null_direction(surface, q, prev)
        prev = eta
        etas.append(eta)
        lams.append(fn(q)[0])
        kinds.append("first" if abs(t[0] * eta[1] - t[1] * eta[0]) > TAU_KIND else "second")
    return SingularCurve(tr.points, tr.tangents, np.array(etas), np.array(lams), kinds, h, tr.closed)


def classify_kind(surface: SurfaceSpec, point) -> str:
    """``first``, ``second-admissible`` or ``second-non-admissible``."""
    point = np.asarray(point, dtype=float)
    if corank(surface, point) >= 2:
        raise Corank2Point(f"corank-2 point at {tuple(float(x) for x in point)}")
    lam = signed_area_density(surface, point, 2)
    g = lam.grad()
    if np.linalg.norm(g) <= 1e-7 * max(derivative_scale(lam), 1e-300):
        raise DegeneratePoint(f"degenerate singular point at ({point[0]:.6g}, {point[1]:.6g})")
    eta = null_direction(surface, point)
    t = _clockwise(g) / np.linalg.norm(g)
    if abs(t[0] * eta[1] - t[1] * eta[0]) > TAU_KIND:
        return "first"
    r, h = 0.03, 2e-3
    curve = trace_singular_curve(surface, point, (point[0] - r, point[0] + r,
                                                  point[1] - r, point[1] + r), h)
    far = np.linalg.norm(curve.points - point, axis=1) >= 2.5 * h
    dets = np.abs(curve.tangents[:, 0] * curve.null_dirs[:, 1]
                  - curve.tangents[:, 1] * curve.null_dirs[:, 0])
    if np.any(far) and np.all(dets[far] > 10 * TAU_KIND):
        return "second-admissible"
    return "second-non-admissible"


# -- curve parametrizations -------------------------------------------------
def _curve_frame(lam: Jet):
    g = lam.grad()
    n = np.linalg.norm(g)
    if n == 0.0:
        raise DegeneratePoint("degenerate point: d lambda vanishes")
    return _clockwise(g) / n, g / n


def _curve_jet(p, tang, nrm, h: Jet) -> Jet:
    s = Jet.variable("u", (0.0, 0.0), h.order)
    return J.stack([p[0] + s * tang[0] + h * nrm[0], p[1] + s * tang[1] + h * nrm[1]])


def curve_series(lam: Jet, order: int) -> Jet:
    """Taylor series ``gamma(s) = p + s T + h(s) N`` of ``{lambda = 0}``.

    ``lam`` must have order ``order + 1``; ``h`` is found by Newton iteration
    on power series, which doubles the number of correct coefficients per step.
    """
    tang, nrm = _curve_frame(lam)
    p = lam.base
    lam_n = lam.du() * nrm[0] + lam.dv() * nrm[1]
    h = Jet.constant(0.0, (0.0, 0.0), order)
    for _ in range(int(math.ceil(math.log2(order + 1))) + 3):
        gamma = _curve_jet(p, tang, nrm, h)
        big = J.compose(lam, gamma, order).u_part()
        slope = J.compose(lam_n, gamma, order).u_part()
        step = (big / slope).u_part()
        h = h - step
        h.c[0, 0] = 0.0
        if step.scale() <= 1e-15 * max(1.0, h.scale()):
            break
    return _curve_jet(p, tang, nrm, h)


def curve_fit(curve: SingularCurve, point, lam: Jet, order: int, degree: int = 7,
              radius: float | None = None) -> Jet:
    """Least-squares polynomial ``gamma(s) = p + s T + h(s) N`` through traced points."""
    tang, nrm = _curve_frame(lam)
    p = np.asarray(point, dtype=float)
    d = curve.points - p
    s = d @ tang
    y = d @ nrm
    radius = radius if radius is not None else 10 * curve.h
    sel = np.abs(s) <= radius
    if np.count_nonzero(sel) < degree + 2:
        raise StraighteningFailed("straightening failed: too few traced points near the base point")
    basis = np.stack([s[sel] ** k for k in range(1, degree + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, y[sel], rcond=None)
    resid = float(np.max(np.abs(basis @ coef - y[sel])))
    if resid > TAU_FIT:
        raise StraighteningFailed(f"straightening failed: fit residual {resid:.2e}")
    hc = np.zeros((order + 1, order + 1))
    for k in range(1, min(degree, order) + 1):
        hc[k, 0] = coef[k - 1]
    return _curve_jet(p, tang, nrm, Jet(hc, (0.0, 0.0), order))


def _effective_degree(j: Jet, rel: float = 1e-13) -> int:
    sc = j.scale()
    deg = 0
    for i in range(j.order + 1):
        for k in range(j.order + 1 - i):
            if np.any(np.abs(j.c[i, k]) > rel * sc):
                deg = max(deg, i + k)
    return deg


# -- adapted charts and frames ----------------------------------------------
@dataclass
class Frame:
    """phi-frame jets at a point of an adapted chart."""

    base: tuple
    kind: str
    f: Jet
    fu: Jet
    fv: Jet
    phi: Jet
    nu: Jet
    eps: Jet | None
    sigma: int

    @property
    def v(self) -> Jet:
        return Jet.variable("v", self.base, self.phi.order)


@dataclass
class AdaptedChart:
    surface: SurfaceSpec
    kind: str
    theta: Jet | None = None
    source: SurfaceSpec | None = None
    exact: bool = True
    div_tol: float = J.TAU_DIV
    origin: tuple = (0.0, 0.0)
    sigma: int = field(default=0)
    # highest degree of the v**0 row that must vanish before dividing by v
    div_check: int | None = None

    def __post_init__(self):
        if self.sigma == 0:
            self.sigma = self.frame((0.0, 0.0), 0).sigma

    def frame(self, point=(0.0, 0.0), order: int = 3) -> Frame:
        """Frame jets of order ``order + 1`` (``nu`` included) at ``point``."""
        u0, v0 = float(point[0]), float(point[1])
        g = self.surface
        extra = 0
        if v0 != 0.0 and g.exact and isinstance(g.map, Jet):
            extra = g.degree or 0
        n_axis = min(order + 3 + extra, MAX_FRAME_ORDER)
        axis = (u0, 0.0)
        f = g.jet(axis, n_axis)
        fu, fv = f.du(), f.dv()
        eps = None
        try:
            if self.kind == "first":
                phi = fv.divide_by_v(self.div_tol, self.div_check)
            else:
                a, b = fu.u_part(), fv.u_part()
                eps = (-(J.dot(a, b) / J.dot(b, b))).u_part()
                phi = (fu + eps * fv).divide_by_v(self.div_tol, self.div_check)
        except NotDivisible as exc:
            raise StraighteningFailed(f"not a frontal decomposition: {exc}") from exc
        if v0 != 0.0:
            m = order + 1
            f = f.shift((u0, v0), min(m + 1, f.order))
            fu = fu.shift((u0, v0), min(m, fu.order))
            fv = fv.shift((u0, v0), min(m, fv.order))
            phi = phi.shift((u0, v0), min(m, phi.order))
            if eps is not None:
                eps = eps.shift((u0, v0), min(m, eps.order))
        base = (u0, v0)
        m = order + 1
        fu, fv, phi = (x.truncate(min(m, x.order)) for x in (fu, fv, phi))
        if self.kind == "first":
            cr = J.cross(fu, phi)
        else:
            cr = J.cross(phi, fv)
        if np.linalg.norm(cr.value) <= 1e-12 * max(1.0, fu.scale(), fv.scale(), phi.scale()):
            raise FrameCollapse(f"frame collapse at {base}")
        if g.normal is not None:
            nu = g.unit_normal(base, m)
        else:
            nu = J.normalize(cr) * float(g.normal_sign)
        sigma = 1 if float(cr.value @ nu.value) > 0 else -1
        return Frame(base, self.kind, f, fu, fv, phi, nu, eps, sigma)

    def eps_profile(self, us: Sequence[float]) -> np.ndarray:
        if self.kind == "first":
            return np.zeros(len(us))
        return np.array([self.frame((u, 0.0), 0).eps.value for u in us])

    def to_source(self, point) -> np.ndarray:
        """Parameter point of the source surface for a chart point."""
        if self.theta is None:
            return np.asarray(point, dtype=float)
        return np.asarray(self.theta.at(point), dtype=float)


def _adapted_kind(surface: SurfaceSpec) -> str:
    f = surface.jet((0.0, 0.0), 1)
    sc = max(derivative_scale(f), 1e-300)
    fu, fv = np.linalg.norm(f.partial(1, 0)), np.linalg.norm(f.partial(0, 1))
    if fv <= 1e-9 * sc and fu > 1e-9 * sc:
        return "first"
    if fu <= 1e-9 * sc and fv > 1e-9 * sc:
        return "second"
    raise StraighteningFailed("declared adapted chart is not adapted at the origin")


def adapted_chart(surface: SurfaceSpec) -> AdaptedChart:
    """Wrap a surface whose parametrization is already adapted."""
    return AdaptedChart(surface, _adapted_kind(surface), None, surface, surface.exact,
                        J.TAU_DIV if surface.exact else TAU_FIT)


def validate_adapted(surface: SurfaceSpec, window=(-0.1, 0.1), samples: int = 11) -> AdaptedChart:
    """Check the adapted-chart conditions along the u-axis; returns the chart."""
    chart = adapted_chart(surface)
    for u in np.linspace(window[0], window[1], samples):
        fr = chart.frame((u, 0.0), 1)
        if surface.normal is not None:
            n = surface.normal_numerator((u, 0.05), 1)
            f = surface.jet((u, 0.05), 1)
            for d in (f.partial(1, 0), f.partial(0, 1)):
                if abs(d @ n.value) > 1e-7 * max(1.0, np.linalg.norm(d) * np.linalg.norm(n.value)):
                    raise StraighteningFailed("normal numerator is not orthogonal to the surface")
        if chart.kind == "second" and abs(u) < 1e-15 and abs(fr.eps.value) > 1e-9:
            raise StraighteningFailed("eps(0) must vanish on a second-kind chart")
    return chart


def straighten(surface: SurfaceSpec, at=(0.0, 0.0), curve: SingularCurve | None = None,
               method: str = "series", order: int = CHART_ORDER) -> AdaptedChart:
    """Adapted chart ``theta(s, t) = gamma(s) + t w(s)`` centred at ``at``.

    ``gamma`` parametrizes the singular curve (power series from the lambda
    jet, or a least-squares fit of ``curve`` when ``method='fit'``); ``w`` is
    the kernel field along ``gamma`` for first-kind points and the rotated
    tangent for second-kind points.
    """
    at = np.asarray(at, dtype=float)
    if surface.declared_adapted:
        if abs(at[1]) > 1e-12:
            raise StraighteningFailed("point is off the u-axis of an adapted chart")
        return adapted_chart(surface)
    kind = classify_kind(surface, at)
    kind = "first" if kind == "first" else "second"
    f = surface.jet(at, order + 2)
    # the chart must not depend on the choice of nu, so undo the orientation flip
    lam = J.det3(f.du(), f.dv(), normal_jet(surface, at, order + 1)) * float(surface.normal_sign)
    if method == "series":
        gamma = curve_series(lam, order)
    elif method == "fit":
        if curve is None:
            curve = trace_singular_curve(surface, at, None, 1e-3)
        gamma = curve_fit(curve, at, lam, order)
    else:
        raise ValueError(f"unknown straightening method {method!r}")
    if kind == "first":
        w = J.compose(kernel_field(f.truncate(order + 1)), gamma, order).u_part()
        gp = gamma.du().value
        if gp[0] * w.value[1] - gp[1] * w.value[0] < 0:
            w = -w
    else:
        gp = gamma.du()
        w = J.stack([-gp[1], gp[0]])
    t = Jet.variable("v", (0.0, 0.0), w.order)
    theta = gamma.truncate(w.order) + t * w

    deg_f = surface.degree
    exact = False
    n_out = order
    if method == "series" and deg_f is not None:
        deg_t = _effective_degree(theta)
        if deg_t * deg_f <= MAX_EXACT_ORDER and deg_t < theta.order:
            exact = True
            n_out = deg_t * deg_f
    th = theta.shift((0.0, 0.0), n_out) if exact else theta
    g = J.compose(surface.jet(at, n_out), th, n_out)
    n = None
    if surface.normal is not None:
        nn = surface.normal_numerator(at, n_out)
        if exact:
            n_deg = _effective_degree(nn) * _effective_degree(theta)
            nn = surface.normal_numerator(at, max(n_deg, 1))
            th_n = theta.shift((0.0, 0.0), max(n_deg, 1))
            n = J.compose(nn, th_n, max(n_deg, 1))
        else:
            n = J.compose(nn, th, n_out)
    chart_surface = SurfaceSpec(map=g, normal=n, declared_adapted=True, exact=exact,
                                truncation_order=surface.truncation_order, kind="chart",
                                normal_sign=surface.normal_sign)
    if method == "series":
        return AdaptedChart(chart_surface, kind, theta, surface, exact, J.TAU_DIV, tuple(at))
    return AdaptedChart(chart_surface, kind, theta, surface, exact, TAU_FIT, tuple(at),
                        div_check=FIT_CHECK_ORDER)


def unit_normal_jet(chart: AdaptedChart, point=(0.0, 0.0), order: int = 3) -> Jet:
    return chart.frame(point, order).nu
