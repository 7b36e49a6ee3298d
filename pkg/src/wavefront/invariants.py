"""Fundamental quantities, edge invariants, principal branches and ridges.

All quantities are jets on an adapted chart.  On the first kind the frame is
``{f_u, phi, nu}`` with ``f_v = v phi``; on the second kind it is
``{phi, f_v, nu}`` with ``f_u + eps(u) f_v = v phi``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .chart import AdaptedChart, Frame, derivative_scale, partial_scale
from .errors import BranchAmbiguity, GeometryError, NoBoundedBranch, WrongKind
from .jets import Jet

TAU_UMBILIC = 1e-10
ROUNDING = 64 * np.finfo(float).eps  # noise floor of H^2 - K
TAU_LOC = 1e-8
TAU_RIDGE = 1e-7
TAU_FRONT = 1e-9
RIDGE_ORDER_JET = 5


class FrontalPoint(NoBoundedBranch):
    """``mu_c`` or ``N~`` vanishes: a frontal, no bounded branch guarantee."""


@dataclass
class FundamentalData:
    kind: str
    E: Jet
    F: Jet
    G: Jet
    L: Jet
    M: Jet
    N: Jet
    eps: Jet | None
    frame: Frame

    @property
    def v(self) -> Jet:
        return Jet.variable("v", self.E.base, self.E.order)

    @property
    def P(self) -> Jet:
        """``L`` on the first kind, ``L + eps M`` on the second."""
        if self.kind == "first":
            return self.L
        return self.L + self.eps.truncate(min(self.eps.order, self.M.order)) * self.M

    @property
    def D(self) -> Jet:
        return self.E * self.G - self.F * self.F

    def numerator(self) -> Jet:
        """``v (E G - F^2) K``, equal to ``P N - v M^2``."""
        if self.kind == "first":
            return self.L * self.N - self.v * self.M * self.M
        return self.P * self.N - self.v * self.M * self.M

    def trace(self) -> Jet:
        """``2 v (E G - F^2) H``."""
        v = self.v
        if self.kind == "first":
            return self.E * self.N - 2.0 * v * self.F * self.M + v * self.G * self.L
        return self.G * self.P - 2.0 * v * self.F * self.M + v * self.E * self.N

    def weingarten(self) -> tuple[Jet, Jet]:
        """``nu_u`` and ``nu_v`` recomposed from the fundamental quantities."""
        E, F, G, L, M, N, D, v = self.E, self.F, self.G, self.L, self.M, self.N, self.D, self.v
        fr = self.frame
        if self.kind == "first":
            a, b = fr.fu, fr.phi
            nu_u = ((F * M - G * L) * a + (F * L - E * M) * b) / D
            nu_v = ((F * N - v * G * M) * a + (v * F * M - E * N) * b) / D
            return nu_u, nu_v
        eps = self.eps
        a, b = fr.phi, fr.fv
        w = v * M - eps * N
        nu_u = ((F * w - G * L) * a + (F * L - E * w) * b) / D
        nu_v = ((F * N - G * M) * a + (F * M - E * N) * b) / D
        return nu_u, nu_v


def fundamental_data(chart: AdaptedChart, point=(0.0, 0.0), order: int = 3) -> FundamentalData:
    fr = chart.frame(point, order)
    nu_u, nu_v = fr.nu.du(), fr.nu.dv()
    if chart.kind == "first":
        a, b = fr.fu, fr.phi
        E, F, G = J.dot(a, a), J.dot(a, b), J.dot(b, b)
        L, M, N = -J.dot(a, nu_u), -J.dot(b, nu_u), -J.dot(b, nu_v)
    else:
        a, b = fr.phi, fr.fv
        E, F, G = J.dot(a, a), J.dot(a, b), J.dot(b, b)
        L, M, N = -J.dot(a, nu_u), -J.dot(a, nu_v), -J.dot(b, nu_v)
    n = min(x.order for x in (E, F, G, L, M, N))
    E, F, G, L, M, N = (x.truncate(n) for x in (E, F, G, L, M, N))
    eps = fr.eps.truncate(min(n, fr.eps.order)) if fr.eps is not None else None
    return FundamentalData(chart.kind, E, F, G, L, M, N, eps, fr)


# -- first-kind invariants --------------------------------------------------
@dataclass(frozen=True)
class EdgeInvariants:
    kappa_s: float
    kappa_nu: float
    kappa_c: float
    kappa_t: float
    # cuspidal curvature and torsion through N, M, L relative to the given nu;
    # kappa_c = sigma * kappa_c_nu and kappa_t = sigma * kappa_t_nu, and unlike the
    # determinant forms these two change sign with nu
    kappa_c_nu: float
    kappa_t_nu: float
    sigma: int


def edge_invariants(chart: AdaptedChart, point=(0.0, 0.0)) -> EdgeInvariants:
    """``kappa_s, kappa_nu, kappa_c, kappa_t`` at a first-kind point ``(u0, 0)``."""
    if chart.kind != "first":
        raise WrongKind("wrong kind: edge invariants need a first-kind chart")
    u0 = float(point[0])
    fd = fundamental_data(chart, (u0, 0.0), 1)
    fr = fd.frame
    fu = fr.fu.value
    fuu = fr.fu.du().value
    phi = fr.phi.value
    phi_u, phi_v = fr.phi.du().value, fr.phi.dv().value
    nu = fr.nu.value
    E, F, Dv = fd.E.value, fd.F.value, fd.D.value
    sigma = fr.sigma  # sign of lambda_v = det(f_u, phi, nu)
    det = lambda a, b, c: float(np.linalg.det(np.array([a, b, c])))
    kappa_s = sigma * det(fu, fuu, nu) / E ** 1.5
    kappa_nu = float(fuu @ nu) / E
    kappa_c = E ** 0.75 * det(fu, phi, 2.0 * phi_v) / Dv ** 1.25
    kappa_t = det(fu, phi, phi_u) / Dv - det(fu, phi, fuu) * F / (E * Dv)
    kc_nu = 2.0 * E ** 0.75 * fd.N.value / Dv ** 0.75
    kt_nu = (E * fd.M.value - F * fd.L.value) / (E * math.sqrt(Dv))
    return EdgeInvariants(kappa_s, kappa_nu, kappa_c, kappa_t, kc_nu, kt_nu, sigma)


@dataclass(frozen=True)
class SecondKindInvariants:
    mu_c: float
    kappa_nu: float
    front: bool


def second_kind_invariants(chart: AdaptedChart, point=(0.0, 0.0)) -> SecondKindInvariants:
    if chart.kind != "second":
        raise WrongKind("wrong kind: second-kind invariants need a second-kind chart")
    fd = fundamental_data(chart, (float(point[0]), 0.0), 0)
    cr = np.cross(fd.frame.phi.value, fd.frame.fv.value)
    mu_c = fd.G.value * fd.L.value / float(cr @ cr)
    scale = max(abs(fd.N.value), abs(fd.M.value), abs(fd.L.value), 1.0)
    front = abs(fd.L.value) > TAU_FRONT * scale
    return SecondKindInvariants(mu_c, fd.N.value / fd.G.value, front)


# -- principal curvatures ---------------------------------------------------
@dataclass(frozen=True)
class Branches:
    kappa_plus: float
    kappa_minus: float
    K: float
    H: float


def _split(A: float, num: float, vD: float) -> tuple[float, float, float]:
    disc = A * A - 4.0 * vD * num
    floor = ROUNDING * (A * A + abs(4.0 * vD * num))
    if disc < 0:
        disc = 0.0
    B = math.sqrt(disc)
    if B < TAU_UMBILIC * abs(A) or disc <= floor or (A == 0.0 and B == 0.0):
        raise BranchAmbiguity("branch ambiguity: principal curvatures coincide")
    return A, B, disc


def principal_branches(chart: AdaptedChart, point) -> Branches:
    """``kappa_plus = 2 num / (A + B)`` and ``kappa_minus = 2 num / (A - B)`` off the axis."""
    u0, v0 = float(point[0]), float(point[1])
    if v0 == 0.0:
        raise GeometryError("principal branches need v != 0")
    fd = fundamental_data(chart, (u0, v0), 0)
    A, num, vD = fd.trace().value, fd.numerator().value, v0 * fd.D.value
    A, B, _ = _split(A, num, vD)
    # one root by the stable quotient, the other through the product num / vD
    if A > 0:
        kp = 2.0 * num / (A + B)
        km = (A + B) / (2.0 * vD)
    else:
        km = 2.0 * num / (A - B)
        kp = (A - B) / (2.0 * vD)
    return Branches(kp, km, num / vD, A / (2.0 * vD))


def regular_branches(f: Jet, nu: Jet) -> Branches:
    """``kappa_pm = H -+ sqrt(H^2 - K)`` at a regular point from jets of ``f`` and ``nu``."""
    fu, fv = f.partial(1, 0), f.partial(0, 1)
    n = nu.value
    E, F, G = fu @ fu, fu @ fv, fv @ fv
    L, M, N = f.partial(2, 0) @ n, f.partial(1, 1) @ n, f.partial(0, 2) @ n
    D = E * G - F * F
    K = (L * N - M * M) / D
    H = (E * N - 2 * F * M + G * L) / (2 * D)
    disc = H * H - K
    if disc <= max((TAU_UMBILIC * abs(H)) ** 2, ROUNDING * (H * H + abs(K))):
        raise BranchAmbiguity("branch ambiguity: umbilic point")
    r = math.sqrt(disc)
    return Branches(H - r, H + r, K, H)


def regular_kappa_jet(f: Jet, nu: Jet, sign: int = -1) -> Jet:
    """Jet of ``H + sign sqrt(H^2 - K)`` on a regular patch (``sign=-1``: kappa_plus)."""
    fu, fv = f.du(), f.dv()
    fuu, fuv, fvv = fu.du(), fu.dv(), fv.dv()
    n = min(fuu.order, nu.order)
    nu = nu.truncate(n)
    E, F, G = J.dot(fu, fu), J.dot(fu, fv), J.dot(fv, fv)
    L, M, N = J.dot(fuu, nu), J.dot(fuv, nu), J.dot(fvv, nu)
    D = E * G - F * F
    K = (L * N - M * M) / D
    H = (E * N - 2.0 * F * M + G * L) / (2.0 * D)
    disc = H * H - K
    if disc.value <= max((TAU_UMBILIC * abs(H.value)) ** 2, ROUNDING * (H.value ** 2 + abs(K.value))):
        raise BranchAmbiguity("branch ambiguity: umbilic point")
    return H + float(sign) * J.sqrt(disc)


@dataclass(frozen=True)
class BoundedBranch:
    exists: bool
    value: float
    which: str  # "plus" or "minus", in the given orientation of nu


def _orientation_sign(fd: FundamentalData) -> float:
    """Sign of ``A`` on the axis: ``N~`` (first kind) or ``L^ + eps M^`` (second kind)."""
    a0 = fd.trace().value
    scale = max(abs(fd.E.value * fd.N.value), abs(fd.G.value * fd.L.value),
                abs(fd.G.value * fd.M.value), 1e-300)
    if abs(a0) <= TAU_FRONT * max(scale, 1.0):
        kind = "N~" if fd.kind == "first" else "mu_c"
        raise FrontalPoint(f"frontal, no bounded branch guarantee: {kind} vanishes")
    return 1.0 if a0 > 0 else -1.0


def bounded_branch(chart: AdaptedChart, point=(0.0, 0.0)) -> BoundedBranch:
    fd = fundamental_data(chart, (float(point[0]), 0.0), 0)
    s = _orientation_sign(fd)
    if chart.kind == "first":
        value = fd.L.value / fd.E.value
    else:
        value = fd.N.value / fd.G.value
    return BoundedBranch(True, value, "plus" if s > 0 else "minus")


def bounded_kappa_jet(chart: AdaptedChart, point=(0.0, 0.0), order: int = RIDGE_ORDER_JET,
                      fd: FundamentalData | None = None) -> Jet:
    """Jet of the bounded principal curvature, ``2 num / (A (1 + sqrt(1 - 4 v D num / A^2)))``.

    The square root is expanded about a point where ``A != 0``, which makes the
    branch smooth across the singular curve.
    """
    if fd is None:
        fd = fundamental_data(chart, point, order)
    A = fd.trace()
    if abs(A.value) <= TAU_FRONT * max(derivative_scale(A), abs(fd.E.value), 1.0) and point[1] == 0:
        _orientation_sign(fundamental_data(chart, (point[0], 0.0), 0))
    num = fd.numerator()
    x = 4.0 * fd.v * fd.D * num / (A * A)
    if x.value >= 1.0 - TAU_UMBILIC:
        raise BranchAmbiguity("branch ambiguity: principal curvatures coincide")
    return 2.0 * num / (A * (1.0 + J.sqrt(1.0 - x)))


def principal_vector_jet(chart: AdaptedChart, point=(0.0, 0.0), order: int = RIDGE_ORDER_JET,
                         fd: FundamentalData | None = None, kappa: Jet | None = None) -> Jet:
    """Principal vector field of the bounded branch as a shape-(2,) jet.

    First kind ``(N - v k G, -M + k F)``, second kind
    ``(-M + k F, P' )`` with ``P' = L - k (v E - eps F)``; multiplied by the sign
    of ``A`` on the axis so that it does not depend on the choice of ``nu``.
    """
    if fd is None:
        fd = fundamental_data(chart, point, order)
    if kappa is None:
        kappa = bounded_kappa_jet(chart, point, order, fd)
    s = _orientation_sign(fundamental_data(chart, (point[0], 0.0), 0))
    v = fd.v
    if fd.kind == "first":
        vec = J.stack([fd.N - v * kappa * fd.G, -fd.M + kappa * fd.F])
    else:
        eps = fd.eps
        vec = J.stack([-fd.M + kappa * fd.F, fd.L - kappa * (v * fd.E - eps * fd.F)])
    if np.linalg.norm(vec.value) == 0.0:
        raise NoBoundedBranch("no bounded branch: principal vector vanishes")
    return vec * s


def principal_vector(chart: AdaptedChart, point=(0.0, 0.0)) -> np.ndarray:
    return principal_vector_jet(chart, point, 1).value


# -- ridges -----------------------------------------------------------------
@dataclass(frozen=True)
class RidgeInfo:
    order: int
    derivatives: tuple     # v^m kappa at the point, m = 1..4
    fd_first: float        # v kappa by central differences
    fd_agrees: bool


def ridge_order(chart: AdaptedChart, point=(0.0, 0.0), order: int = RIDGE_ORDER_JET,
                h: float = 1e-4) -> RidgeInfo:
    """Order of contact of the bounded branch with its own principal direction.

    Returns ``-1`` when ``v kappa != 0``; otherwise ``k`` in ``0..2`` when
    ``v^m kappa`` vanishes for ``m <= k + 1`` and not for ``m = k + 2``;
    ``3`` when all four tested derivatives vanish.
    """
    fd = fundamental_data(chart, point, order)
    kappa = bounded_kappa_jet(chart, point, order, fd)
    vec = principal_vector_jet(chart, point, order, fd, kappa)
    derivs = []
    cur = kappa
    for _ in range(4):
        if cur.order == 0:
            break
        cur = cur.along(vec)
        derivs.append(cur.value)
    vn = max(np.linalg.norm(vec.value), 1e-300)
    r = 3
    for m, d in enumerate(derivs, start=1):
        scale = max(partial_scale(kappa, m), 1e-300)
        if abs(d) > TAU_RIDGE * scale * max(1.0, vn) ** m:
            r = m - 2
            break
    # central difference of kappa along the principal direction
    p = np.asarray(point, dtype=float)
    step = h * vec.value / vn
    kp = _pointwise_bounded(chart, p + step)
    km = _pointwise_bounded(chart, p - step)
    fd1 = (kp - km) / (2 * h) * vn
    agrees = abs(fd1 - derivs[0]) <= 1e-5 * max(1.0, abs(derivs[0]))
    return RidgeInfo(r, tuple(derivs), fd1, agrees)


def _pointwise_bounded(chart: AdaptedChart, q) -> float:
    q = (float(q[0]), float(q[1]))
    if q[1] == 0.0:
        return bounded_branch(chart, q).value
    b = principal_branches(chart, q)
    which = bounded_branch(chart, (q[0], 0.0)).which
    return b.kappa_plus if which == "plus" else b.kappa_minus


def line_of_curvature_test(chart: AdaptedChart, window=(-0.05, 0.05), samples: int = 11) -> bool:
    if chart.kind != "first":
        return False
    inv = [edge_invariants(chart, (u, 0.0)) for u in np.linspace(window[0], window[1], samples)]
    kt = max(abs(i.kappa_t) for i in inv)
    kc = max(abs(i.kappa_c) for i in inv)
    return kt <= TAU_LOC * max(kc, 1.0)


# -- profiles ---------------------------------------------------------------
PROFILE_COLUMNS = ["u", "kappa_s", "kappa_nu", "kappa_c", "kappa_t", "mu_c", "kappa_plus",
                   "pv_u", "pv_v", "ridge_order", "bounded"]


@dataclass
class InvariantProfile:
    rows: list

    def write_csv(self, fh, fmt=repr) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for r in self.rows:
            w.writerow([fmt(r[c]) if isinstance(r[c], float) else r[c] for c in PROFILE_COLUMNS])


def invariant_profile(chart: AdaptedChart, us) -> InvariantProfile:
    nan = float("nan")
    rows = []
    for u in us:
        u = float(u)
        row = dict.fromkeys(PROFILE_COLUMNS, nan)
        row["u"] = u
        if chart.kind == "first":
            e = edge_invariants(chart, (u, 0.0))
            row.update(kappa_s=e.kappa_s, kappa_nu=e.kappa_nu, kappa_c=e.kappa_c, kappa_t=e.kappa_t)
        else:
            s = second_kind_invariants(chart, (u, 0.0))
            row.update(mu_c=s.mu_c, kappa_nu=s.kappa_nu)
        try:
            bb = bounded_branch(chart, (u, 0.0))
            pv = principal_vector(chart, (u, 0.0))
            rid = ridge_order(chart, (u, 0.0))
            row.update(kappa_plus=bb.value, pv_u=float(pv[0]), pv_v=float(pv[1]),
                       ridge_order=rid.order, bounded=int(bb.which == "plus"))
        except NoBoundedBranch:
            row.update(ridge_order=-1, bounded=0)
        rows.append(row)
    return InvariantProfile(rows)
