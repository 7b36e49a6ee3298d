"""Extended distance squared function ``psi = -(|x0 - f|^2 - t0^2) / 2`` at focal points.

With ``x0 = f(p) + nu(p) / kappa(p)`` and ``t0 = 1 / kappa(p)`` for the
bounded principal curvature ``kappa``, the 2-jet of ``psi`` vanishes at ``p``
and ``psi`` has a D4 singularity iff the cubic discriminant ``delta`` of its
3-jet is nonzero.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import invariants as I
from . import jets as J
from .chart import AdaptedChart, normal_jet
from .errors import GeometryError, NoFocalPoint
from .jets import Jet
from .parallel import chart_at
from .surface import SurfaceSpec

TAU_DELTA = 1e-7
TAU_JET = 1e-9

D4_LABELS = ("D4-positive-sign", "D4-negative-sign", "not-D4", "frontal-degenerate")
# representatives of the two R-classes
D4_NORMAL_FORMS = {"D4-positive-sign": "u^3 + u v^2", "D4-negative-sign": "u^3 - u v^2"}


def psi_jet(surface: SurfaceSpec, x0, t0: float, point, order: int = 3) -> Jet:
    f = surface.jet(point, order)
    d = f - np.asarray(x0, dtype=float)
    return -0.5 * (J.dot(d, d) - t0 * t0)


def cubic_discriminant(p30: float, p21: float, p12: float, p03: float) -> float:
    """``delta`` in terms of the third derivatives ``psi_uuu, psi_uuv, psi_uvv, psi_vvv``."""
    return (p30 ** 2 * p03 ** 2 - 6 * p30 * p21 * p12 * p03 - 3 * p21 ** 2 * p12 ** 2
            + 4 * p21 ** 3 * p03 + 4 * p30 * p12 ** 3)


def third_derivatives(psi: Jet) -> tuple[float, float, float, float]:
    return tuple(float(psi.partial(3 - k, k)) for k in range(4))


def two_jet_norm(psi: Jet) -> float:
    return max(abs(float(psi.partial(i, j))) for i in range(3) for j in range(3 - i))


@dataclass
class FocalData:
    x0: np.ndarray
    t0: float
    kappa: float
    frontal: bool
    chart: AdaptedChart
    chart_point: tuple


def focal_center(surface: SurfaceSpec, point) -> FocalData:
    """Focal point of ``f`` at ``p`` for the bounded principal curvature.

    When ``f`` is a frontal but not a front at a second-kind point the
    limiting normal curvature takes its place.
    """
    point = (float(point[0]), float(point[1]))
    chart, cp = chart_at(surface, point)
    frontal = False
    try:
        kappa = I.bounded_branch(chart, cp).value
    except I.FrontalPoint:
        if chart.kind != "second":
            raise
        kappa = I.second_kind_invariants(chart, cp).kappa_nu
        frontal = True
    if abs(kappa) <= 1e-12:
        raise NoFocalPoint("no focal point: the principal curvature vanishes")
    t0 = 1.0 / kappa
    x0 = surface.jet(point, 0).value + t0 * normal_jet(surface, point, 0).value
    return FocalData(x0, t0, kappa, frontal, chart, cp)


def delta_psi(surface: SurfaceSpec, point) -> float:
    fc = focal_center(surface, point)
    psi = psi_jet(surface, fc.x0, fc.t0, point)
    return cubic_discriminant(*third_derivatives(psi))


@dataclass
class DsqReport:
    center: list
    t0: float
    two_jet_norm: float
    delta_psi: float
    d4_label: str
    ridge_consistency: bool
    ridge_order: int | None
    kind: str
    tau_delta: float
    tau_jet: float
    normal_form: str | None = None
    remarks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def d4_classify(surface: SurfaceSpec, point) -> DsqReport:
    point = (float(point[0]), float(point[1]))
    fc = focal_center(surface, point)
    psi = psi_jet(surface, fc.x0, fc.t0, point)
    third = third_derivatives(psi)
    delta = cubic_discriminant(*third)
    scale = max(max(abs(x) for x in third), 1e-300)
    tau_d, tau_j = TAU_DELTA * scale ** 4, TAU_JET * scale
    jet2 = two_jet_norm(psi)
    remarks = []
    ridge = None
    if fc.frontal:
        label = "frontal-degenerate"
    elif abs(delta) <= tau_d:
        label = "not-D4"
    elif jet2 > tau_j:
        label = "not-D4"
        remarks.append("2-jet of psi does not vanish")
    else:
        label = "D4-positive-sign" if delta > 0 else "D4-negative-sign"
    if not fc.frontal:
        ridge = I.ridge_order(fc.chart, fc.chart_point).order
    consistent = (ridge == -1) == (abs(delta) > tau_d) if ridge is not None else abs(delta) <= tau_d
    if fc.chart.kind == "first":
        remarks.append("cuspidal edge: D4 also needs a nonzero edge inflectional curvature")
    return DsqReport(list(map(float, fc.x0)), fc.t0, jet2, delta, label, bool(consistent), ridge,
                     fc.chart.kind, tau_d, tau_j, D4_NORMAL_FORMS.get(label), remarks)


# -- strongly adapted charts --------------------------------------------------
def strongly_adapted(chart: AdaptedChart) -> AdaptedChart:
    """Second-kind chart sheared by ``u -> u + c v`` so that ``<f_uv, f_v> = 0`` at 0.

    The shear keeps the singular curve on the u-axis and keeps the null field of
    the form ``d_u + eps d_v``.
    """
    if chart.kind != "second":
        raise I.WrongKind("wrong kind: strongly adapted charts are for second-kind points")
    g = chart.surface
    n = g.map.order if isinstance(g.map, Jet) else 6
    f = g.jet((0.0, 0.0), n)
    fuv, fv, fuu = f.partial(1, 1), f.partial(0, 1), f.partial(2, 0)
    den = float(fuu @ fv)
    if abs(den) <= 1e-12 * max(np.linalg.norm(fuu) * np.linalg.norm(fv), 1e-300):
        raise GeometryError("cannot shear to a strongly adapted chart: <f_uu, f_v> = 0")
    c = -float(fuv @ fv) / den
    u = Jet.variable("u", (0.0, 0.0), n)
    v = Jet.variable("v", (0.0, 0.0), n)
    shear = J.stack([u + c * v, v])
    gm = J.compose(f, shear, n)
    nn = None
    if g.normal is not None:
        nn = J.compose(g.normal_numerator((0.0, 0.0), n), shear, n)
    surf = SurfaceSpec(map=gm, normal=nn, declared_adapted=True, exact=g.exact,
                       truncation_order=g.truncation_order, kind="chart",
                       normal_sign=g.normal_sign)
    theta = shear if chart.theta is None else J.compose(chart.theta, shear, chart.theta.order)
    return AdaptedChart(surf, "second", theta, chart.source, g.exact, chart.div_tol, chart.origin,
                        div_check=chart.div_check)


@dataclass(frozen=True)
class StronglyAdaptedCheck:
    lhs: float           # 4 psi_uuv psi_vvv - 3 psi_uvv^2
    rhs: float           # 4G/N^2 (L (G N_v - G_v N) - G M (N_u + M))
    psi_uuu: float
    psi_uuv: float
    gl_over_n: float     # G L / N
    fuv_fv: float        # <f_uv, f_v>, zero in a strongly adapted chart


def strongly_adapted_identity(surface: SurfaceSpec, point=(0.0, 0.0)) -> StronglyAdaptedCheck:
    """Both sides of the third-order identity for ``psi`` in a strongly adapted chart."""
    chart, cp = chart_at(surface, point)
    if cp != (0.0, 0.0):
        raise GeometryError("strongly adapted charts are built at the chart origin")
    sa = strongly_adapted(chart)
    fd = I.fundamental_data(sa, (0.0, 0.0), 2)
    G, L, M, N = (x.value for x in (fd.G, fd.L, fd.M, fd.N))
    Gv, Nu, Nv = float(fd.G.partial(0, 1)), float(fd.N.partial(1, 0)), float(fd.N.partial(0, 1))
    kappa = I.bounded_branch(sa).value
    t0 = 1.0 / kappa
    f = sa.surface.jet((0.0, 0.0), 3)
    x0 = f.value + t0 * fd.frame.nu.value
    psi = psi_jet(sa.surface, x0, t0, (0.0, 0.0))
    p30, p21, p12, p03 = third_derivatives(psi)
    lhs = 4 * p21 * p03 - 3 * p12 ** 2
    rhs = 4 * G / N ** 2 * (L * (G * Nv - Gv * N) - G * M * (Nu + M))
    fuv_fv = float(f.partial(1, 1) @ f.partial(0, 1))
    return StronglyAdaptedCheck(lhs, rhs, p30, p21, G * L / N, fuv_fv)


__all__ = ["psi_jet", "delta_psi", "d4_classify", "DsqReport", "cubic_discriminant",
           "focal_center", "strongly_adapted", "strongly_adapted_identity", "two_jet_norm"]
