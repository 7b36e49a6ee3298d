"""Parallel surfaces ``f + t nu``, their singularities, CPC lines and landmarks.

``f^t`` is singular exactly where ``t * kappa = 1`` for the bounded branch
``kappa``.  The singularity type at such a point is read off two ways: from
the ridge order and Hessian of ``kappa`` on ``f``, and by applying the lambda
criteria to ``f^t`` itself.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import invariants as I
from .chart import (AdaptedChart, corank, normal_jet, partial_scale,
                    straighten, trace_implicit, trace_singular_curve)
from .classify import classify_singular_point
from .errors import BranchAmbiguity, GeometryError, NoFocalPoint, NothingFound
from .jets import Jet
from .surface import SurfaceSpec, from_function

TAU_CRIT = 1e-7


class WrongParallelType(GeometryError):
    pass


class CriticalSeed(GeometryError):
    """The CPC level set is singular at the seed."""


def parallel_surface(surface: SurfaceSpec, t: float) -> SurfaceSpec:
    """``f^t = f + t nu`` as an analytic surface; ``nu`` stays its unit normal."""

    def fmap(u: Jet, v: Jet) -> Jet:
        base, n = u.base, u.order
        return surface.jet(base, n) + float(t) * normal_jet(surface, base, n)

    def fnormal(u: Jet, v: Jet) -> Jet:
        return normal_jet(surface, u.base, u.order)

    return from_function(fmap, fnormal, model_name="parallel",
                         params={"t": float(t), "of": surface.model_name})


def parallel_jet(surface: SurfaceSpec, t: float, point, order: int = 4) -> Jet:
    return surface.jet(point, order) + float(t) * normal_jet(surface, point, order)


def chart_at(surface: SurfaceSpec, point) -> tuple[AdaptedChart, tuple]:
    """Adapted chart around ``point`` and the chart coordinates of ``point``."""
    chart = straighten(surface, point)
    if surface.declared_adapted:
        return chart, (float(point[0]), float(point[1]))
    return chart, (0.0, 0.0)


def focal_offset(chart: AdaptedChart, point=(0.0, 0.0)) -> float:
    bb = I.bounded_branch(chart, point)
    if abs(bb.value) <= 1e-12:
        raise NoFocalPoint("no finite focal offset: bounded principal curvature vanishes")
    return 1.0 / bb.value


# -- singularities of parallels ---------------------------------------------
@dataclass
class ParallelReport:
    t: float
    point: tuple
    kappa: float
    which: str
    ridge_order: int
    gradient_kappa: list
    hessian_det: float | None
    label_from_ridge: str
    label_from_criteria: str
    agree: bool | None
    edge_invariants: dict | None = None
    oracles: dict | None = None
    remarks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = list(self.point)
        return d


def label_from_ridge(chart: AdaptedChart, point=(0.0, 0.0), source: SurfaceSpec | None = None,
                     t: float | None = None) -> tuple[str, int, np.ndarray, float | None]:
    """Singularity type of ``f^t`` at ``p`` predicted from ``kappa`` on ``f``."""
    kappa = I.bounded_kappa_jet(chart, point)
    g = kappa.grad()
    rid = I.ridge_order(chart, point)
    scale = max(partial_scale(kappa, 2), 1e-300)
    if np.linalg.norm(g) > TAU_CRIT * scale:
        label = {-1: "cuspidal-edge", 0: "swallowtail", 1: "cuspidal-butterfly"}.get(
            rid.order, "unresolved")
        return label, rid.order, g, None
    det = float(np.linalg.det(kappa.hessian()))
    rank_one = True
    if source is not None and t is not None:
        src_point = chart.to_source(point)
        rank_one = corank(parallel_surface(source, t), src_point) == 1
    if not rank_one:
        return "unresolved", rid.order, g, det
    tau = TAU_CRIT * scale * scale
    if det > tau:
        return "cuspidal-lips", rid.order, g, det
    if det < -tau and rid.order == 0:
        return "cuspidal-beaks", rid.order, g, det
    return "unresolved", rid.order, g, det


def second_order_ridge_tuned(c, key=(0, 0)):
    """Ridge-tuned coefficients with the ``h5`` entry ``key`` solved so that
    ``v^(2) kappa_+ (0) = 0`` as well (``v^(2) kappa_+`` is affine in it)."""
    from dataclasses import replace
    from .models import make_normal_form, ridge_tuned

    c = ridge_tuned(c)

    def second(x):
        h5 = dict(c.h5)
        h5[key] = x
        chart = straighten(make_normal_form(replace(c, h5=h5)))
        return I.ridge_order(chart).derivatives[1]

    y0, y1 = second(0.0), second(1.0)
    if y1 == y0:
        raise GeometryError("tail entry does not move the second ridge derivative")
    h5 = dict(c.h5)
    h5[key] = -y0 / (y1 - y0)
    return replace(c, h5=h5)


def parallel_singularity(surface: SurfaceSpec, point=(0.0, 0.0), t: float | None = None,
                         edge: bool = True) -> ParallelReport:
    """Report on the singular point of ``f^t`` at ``p``, ``t = 1 / kappa(p)``."""
    point = (float(point[0]), float(point[1]))
    chart, cp = chart_at(surface, point)
    bb = I.bounded_branch(chart, cp)
    t_focal = focal_offset(chart, cp)
    if t is None:
        t = t_focal
    elif abs(t - t_focal) > 1e-9 * max(1.0, abs(t_focal)):
        raise GeometryError(f"f^t is regular at the point: focal offset is {t_focal:.12g}")
    lab_r, r, g, det = label_from_ridge(chart, cp, surface, t)
    ft = parallel_surface(surface, t)
    rep = classify_singular_point(ft, point, check_admissible=False)
    lab_c = rep.label
    resolved = not (lab_r.startswith("unresolved") or lab_c.startswith("unresolved"))
    report = ParallelReport(t, point, bb.value, bb.which, r, [float(x) for x in g], det,
                            lab_r, lab_c, (lab_r == lab_c) if resolved else None)
    report.remarks.append("a D4 singularity of f^t at p is excluded by an external criterion (not tested)")
    if edge and lab_c == "cuspidal-edge":
        e = parallel_edge_invariants(surface, point, t)
        report.edge_invariants = asdict(e)
    if surface.model_name == "normal-form" and point == (0.0, 0.0):
        from .models import NormalFormCoeffs, normal_form_oracles
        try:
            o = normal_form_oracles(NormalFormCoeffs.from_dict(surface.params))
            report.oracles = {"kappa_nu_t": o.kappa_nu_t, "kappa_s_t": o.kappa_s_t,
                              "kappa_t_t": o.kappa_t_t}
        except GeometryError:
            pass
    return report


@dataclass(frozen=True)
class ParallelEdgeInvariants:
    """Invariants of the parallel cuspidal edge ``f^t`` at ``p``.

    ``kappa_s_t`` is the raw determinant ``det(s', s'', nu) / |s'|^3`` along
    the singular curve ``s`` of ``f^t`` parametrized by ``v`` (by ``u`` when
    ``(kappa_+)_u = 0``) in the adapted coordinates of ``f``; this is the sign
    convention of the closed form, where ``epsilon = sgn(v kappa_+) sgn((kappa_+)_u)``
    appears.  ``kappa_s_t_intrinsic`` carries the ``sgn(lambda_eta)`` factor of
    the definition of singular curvature and does not depend on orientations;
    on normal forms it equals ``-sgn((kappa_+)_u) kappa_s_t``.
    """

    kappa_nu_t: float
    kappa_s_t: float
    kappa_t_t: float
    kappa_s_t_intrinsic: float
    epsilon: int

    def __iter__(self):
        return iter((self.kappa_nu_t, self.kappa_s_t, self.kappa_t_t))


def parallel_edge_invariants(surface: SurfaceSpec, point=(0.0, 0.0), t: float | None = None,
                             method: str = "series", h: float = 1e-3) -> ParallelEdgeInvariants:
    """``(kappa_nu^t, kappa_s^t, kappa_t^t)`` of the parallel cuspidal edge at ``p``.

    ``method='trace'`` traces the singular curve of ``f^t`` with step ``h`` and
    straightens along a polynomial fit of it; ``'series'`` straightens along
    the power series of the curve.
    """
    point = (float(point[0]), float(point[1]))
    base_chart, cp = chart_at(surface, point)
    if t is None:
        t = focal_offset(base_chart, cp)
    ft = parallel_surface(surface, t)
    rep = classify_singular_point(ft, point, check_admissible=False)
    if rep.label != "cuspidal-edge":
        raise WrongParallelType(f"wrong parallel type: f^t has {rep.label} at the point")
    if method == "trace":
        r = 20 * h
        curve = trace_singular_curve(ft, point, (point[0] - r, point[0] + r,
                                                 point[1] - r, point[1] + r), h)
        chart = straighten(ft, point, curve, method="fit")
    elif method == "series":
        chart = straighten(ft, point)
    else:
        raise ValueError(f"unknown method {method!r}")
    e = I.edge_invariants(chart)
    raw = e.sigma * e.kappa_s       # det(s', s'', nu) / |s'|^3 along the chart's u-direction

    # direction of the singular curve of f^t in the adapted coordinates of f
    d = np.asarray(chart.theta.partial(1, 0)) if chart.theta is not None else np.array([1.0, 0.0])
    if base_chart.theta is not None:
        jac = np.column_stack([base_chart.theta.partial(1, 0),
                               base_chart.theta.partial(0, 1)])
        d = np.linalg.solve(jac, d)
    kappa = I.bounded_kappa_jet(base_chart, cp, 1)
    ku, kv = kappa.grad()
    vk = I.ridge_order(base_chart, cp).derivatives[0]
    scale = max(abs(ku), abs(kv))
    by_v = abs(ku) > TAU_CRIT * scale
    ref = ku if by_v else kv
    orient = np.sign(d[1] if by_v else d[0])
    eps = 1 if np.sign(vk) == np.sign(ref) else -1
    return ParallelEdgeInvariants(e.kappa_nu, float(orient * raw), e.kappa_t,
                                  e.kappa_s, eps)


# -- CPC lines --------------------------------------------------------------
def kappa_function(surface: SurfaceSpec):
    """``q -> (kappa(q), grad kappa(q))`` for the bounded branch (or ``kappa_plus``
    on regular surfaces) in the surface's own parameters."""
    if surface.declared_adapted:
        chart = straighten(surface)

        def fn(q):
            k = I.bounded_kappa_jet(chart, (float(q[0]), float(q[1])), 1)
            return k.value, k.grad()
        return fn

    def fn(q):
        q = (float(q[0]), float(q[1]))
        k = I.regular_kappa_jet(surface.jet(q, 3), normal_jet(surface, q, 2))
        return k.value, k.grad()
    return fn


@dataclass
class CpcPolyline:
    value: float
    points: np.ndarray
    closed: bool
    landmarks: list = field(default_factory=list)

    def write_csv(self, fh, fmt=repr) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "kappa"])
        for q in self.points:
            w.writerow([fmt(q[0]), fmt(q[1]), fmt(self.value)])


def trace_cpc(surface: SurfaceSpec, value: float, seed, window=None, h: float = 5e-3) -> CpcPolyline:
    """Level curve ``kappa = value`` through (a point near) ``seed``."""
    kf = kappa_function(surface)
    seed = np.asarray(seed, dtype=float)

    def fn(q):
        k, g = kf(q)
        return k - value, g

    try:
        k0, g0 = kf(seed)
    except BranchAmbiguity as exc:
        raise NothingFound(f"no CPC line at level {value}: {exc}") from exc
    if np.linalg.norm(g0) <= TAU_CRIT * max(abs(k0), 1.0):
        if abs(k0 - value) > 1e-12 * max(abs(value), 1.0):
            raise NothingFound(f"no CPC line at level {value}: kappa is stationary at the seed")
        raise CriticalSeed("CPC through critical point")
    if window is None:
        window = (seed[0] - 0.1, seed[0] + 0.1, seed[1] - 0.1, seed[1] + 0.1)
    tr = trace_implicit(fn, seed, h, window)
    return CpcPolyline(value, tr.points, tr.closed)


# -- landmarks ---------------------------------------------------------------
@dataclass
class Landmark:
    kind: str          # exactly-cusped | kappa-nu-extremum | ridge
    u: float
    interval: tuple
    data: dict = field(default_factory=dict)


def axis_derivatives(chart: AdaptedChart, u: float) -> tuple[float, float, float]:
    """``(kappa_v, kappa_u, v kappa)`` at ``(u, 0)`` on a first-kind chart."""
    fd = I.fundamental_data(chart, (u, 0.0), 2)
    k = I.bounded_kappa_jet(chart, (u, 0.0), 2, fd)
    vec = I.principal_vector_jet(chart, (u, 0.0), 2, fd, k)
    g = k.grad()
    return float(g[1]), float(g[0]), float(k.along(vec).value)


def find_landmarks(surface: SurfaceSpec, window=(-0.1, 0.1), samples: int = 41,
                   check_parallel: bool = True) -> list[Landmark]:
    """Zeros of ``eta kappa``, ``kappa_u`` and ``v kappa`` along the u-axis."""
    chart = straighten(surface)
    if chart.kind != "first":
        raise GeometryError("landmarks need a first-kind singular curve")
    us = np.linspace(window[0], window[1], samples)
    vals = np.array([axis_derivatives(chart, u) for u in us])
    h = float(us[1] - us[0])
    kinds = ("exactly-cusped", "kappa-nu-extremum", "ridge")
    out = []
    for col, kind in enumerate(kinds):
        f = lambda u, c=col: axis_derivatives(chart, u)[c]
        y = vals[:, col]
        roots = []
        for i in range(samples - 1):
            if y[i] == 0.0:
                roots.append(us[i])
            elif y[i] * y[i + 1] < 0:
                roots.append(brentq(f, us[i], us[i + 1], xtol=1e-14, rtol=1e-14))
        if y[-1] == 0.0:
            roots.append(us[-1])
        for r in roots:
            lm = Landmark(kind, float(r), (float(r - h), float(r + h)))
            if kind == "exactly-cusped":
                e = I.edge_invariants(chart, (r, 0.0))
                lm.data["kappa_s"] = e.kappa_s
                lm.data["kappa_s_nonpositive"] = bool(e.kappa_s <= 1e-8)
                rid = I.ridge_order(chart, (r, 0.0))
                lm.data["ridge_order"] = rid.order
                if check_parallel and rid.order == -1:
                    q = tuple(chart.to_source((r, 0.0)))
                    kt = parallel_edge_invariants(surface, q).kappa_t_t
                    lm.data["kappa_t_t"] = kt
            out.append(lm)
    out.sort(key=lambda lm: lm.u)
    return out


def write_landmarks_csv(landmarks, fh, fmt=repr) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["kind", "u", "u_low", "u_high", "kappa_s", "kappa_t_t"])
    for lm in landmarks:
        ks = lm.data.get("kappa_s")
        kt = lm.data.get("kappa_t_t")
        w.writerow([lm.kind, fmt(lm.u), fmt(lm.interval[0]), fmt(lm.interval[1]),
                    "" if ks is None else fmt(ks), "" if kt is None else fmt(kt)])


def image_cusps(points3d: np.ndarray, threshold: float = -0.5) -> list[int]:
    """Vertices where consecutive unit tangents reverse (dot product below threshold)."""
    d = np.diff(points3d, axis=0)
    n = np.linalg.norm(d, axis=1)
    d = d / np.where(n > 0, n, 1.0)[:, None]
    dots = np.einsum("ij,ij->i", d[:-1], d[1:])
    return [i + 1 for i in np.flatnonzero(dots < threshold)]


def cpc_image(surface: SurfaceSpec, point, h: float = 1e-3, radius: float = 0.02):
    """CPC line through ``p`` (the singular set of the focal parallel) and its image by ``f``."""
    kf = kappa_function(surface)
    k0, _ = kf(point)
    line = trace_cpc(surface, k0, point, (point[0] - radius, point[0] + radius,
                                          point[1] - radius, point[1] + radius), h)
    img = np.array([surface.jet(q, 0).value for q in line.points])
    return line, img


def mesh_grid(surface: SurfaceSpec, center, half: float, n: int, t: float | None = None):
    """Vertices of a ``(2n+1)^2`` grid and quad faces (1-based indices)."""
    us = np.linspace(center[0] - half, center[0] + half, 2 * n + 1)
    vs = np.linspace(center[1] - half, center[1] + half, 2 * n + 1)
    verts = []
    for u in us:
        for v in vs:
            x = surface.jet((u, v), 0).value
            if t is not None:
                x = x + t * normal_jet(surface, (u, v), 0).value
            verts.append(x)
    m = 2 * n + 1
    faces = []
    for i in range(m - 1):
        for j in range(m - 1):
            a = i * m + j + 1
            faces.append((a, a + m, a + m + 1, a + 1))
    return np.array(verts), faces


def curve_points_to_source(chart: AdaptedChart, pts) -> np.ndarray:
    return np.array([chart.to_source(q) for q in pts])


__all__ = ["parallel_surface", "parallel_jet", "parallel_singularity", "parallel_edge_invariants",
           "trace_cpc", "find_landmarks", "image_cusps", "cpc_image", "mesh_grid",
           "ParallelReport", "CpcPolyline", "Landmark"]
