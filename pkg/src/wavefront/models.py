"""Built-in surfaces: the cuspidal-edge normal form, the A-models and helpers.

Every corank-one model ships an explicit normal numerator so the unit normal
is available away from adapted charts.  The D4 models ship none; they are
only used to exercise the corank-2 rejection path.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from . import jets as J
from .errors import GeometryError, NoFocalPoint
from .jets import Jet
from .surface import SurfaceSpec, from_coeffs, from_function


class UnknownModel(GeometryError):
    exit_code = 64


@dataclass(frozen=True)
class NormalFormCoeffs:
    """Coefficients of the cuspidal-edge normal form.

    ``f = (u, a20 u^2/2 + a30 u^3/6 + v^2/2,
           b20 u^2/2 + b30 u^3/6 + b12 u v^2/2 + b03 v^3/6) + h`` with tail
    ``h = (0, u^4 h1(u), u^4 h2(u) + u^2 v^2 h3(u) + u v^3 h4(u) + v^4 h5(u, v))``.
    ``h1..h4`` are coefficient lists in ``u``; ``h5`` maps ``(i, j)`` to the
    coefficient of ``u^i v^j``.
    """

    a20: float = 0.0
    a30: float = 0.0
    b20: float = 0.0
    b30: float = 0.0
    b12: float = 0.0
    b03: float = 1.0
    h1: tuple = ()
    h2: tuple = ()
    h3: tuple = ()
    h4: tuple = ()
    h5: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "NormalFormCoeffs":
        names = {f.name for f in fields(cls)}
        bad = set(d) - names
        if bad:
            raise UnknownModel(f"unknown normal-form parameters: {sorted(bad)}")
        kw = dict(d)
        for k in ("h1", "h2", "h3", "h4"):
            if k in kw:
                kw[k] = tuple(float(x) for x in kw[k])
        if "h5" in kw and not isinstance(kw["h5"], dict):
            kw["h5"] = {(int(i), int(j)): float(c) for i, j, c in kw["h5"]}
        return cls(**kw)

    @property
    def running(self) -> bool:
        return (self.a20, self.a30, self.b20, self.b30, self.b12, self.b03) == (1, 0, 2, 5, 2, 1)


RUNNING_EXAMPLE = NormalFormCoeffs(a20=1.0, a30=0.0, b20=2.0, b30=5.0, b12=2.0, b03=1.0)


def ridge_tuned(c: NormalFormCoeffs) -> NormalFormCoeffs:
    """Same coefficients with ``b30`` chosen so that 0 is a ridge point."""
    from dataclasses import replace
    return replace(c, b30=-4.0 * c.b12 ** 3 / c.b03 ** 2)


def focal_degenerate(b20: float, b12: float, b03: float, **tails) -> NormalFormCoeffs:
    """Coefficients with ``d kappa_+ = 0`` at 0: ``a20 = -4 b12^2 / b03^2``, ``b30 = a20 b12``.

    The tails (and ``a30``) then set the Hessian of ``kappa_+``.
    """
    a20 = -4.0 * b12 ** 2 / b03 ** 2
    return NormalFormCoeffs(a20=a20, b20=b20, b30=a20 * b12, b12=b12, b03=b03, **tails)


def _add(coeffs: dict, key, vec):
    coeffs[key] = np.asarray(coeffs.get(key, np.zeros(3)), dtype=float) + np.asarray(vec, dtype=float)


def normal_form_coeffs(c: NormalFormCoeffs) -> dict:
    """Monomial coefficients ``{(i, j): (x, y, z)}`` of the normal form map."""
    m: dict = {}
    _add(m, (1, 0), (1, 0, 0))
    _add(m, (2, 0), (0, c.a20 / 2, c.b20 / 2))
    _add(m, (3, 0), (0, c.a30 / 6, c.b30 / 6))
    _add(m, (0, 2), (0, 0.5, 0))
    _add(m, (1, 2), (0, 0, c.b12 / 2))
    _add(m, (0, 3), (0, 0, c.b03 / 6))
    for k, a in enumerate(c.h1):
        _add(m, (4 + k, 0), (0, a, 0))
    for k, a in enumerate(c.h2):
        _add(m, (4 + k, 0), (0, 0, a))
    for k, a in enumerate(c.h3):
        _add(m, (2 + k, 2), (0, 0, a))
    for k, a in enumerate(c.h4):
        _add(m, (1 + k, 3), (0, 0, a))
    for (i, j), a in c.h5.items():
        _add(m, (i, j + 4), (0, 0, a))
    return m


def _exact_cross(a: Jet, b: Jet) -> Jet:
    n = a.order + b.order
    return J.cross(a.shift((0.0, 0.0), n), b.shift((0.0, 0.0), n))


def _trim(j: Jet) -> dict:
    out = {}
    for i in range(j.order + 1):
        for k in range(j.order + 1 - i):
            if np.any(np.abs(j.c[i, k]) > 0):
                out[(i, k)] = j.c[i, k]
    return out


def make_normal_form(c: NormalFormCoeffs) -> SurfaceSpec:
    """Adapted polynomial surface with explicit normal numerator ``f_u x phi``."""
    if c.b03 == 0:
        raise GeometryError("not a cuspidal edge normal form: b03 = 0")
    if c.b20 < 0:
        raise GeometryError("not a cuspidal edge normal form: b20 < 0 (use flipped() for the mirror)")
    coeffs = normal_form_coeffs(c)
    f = J.polynomial_jet(coeffs)
    phi = f.dv().divide_by_v()
    normal = _trim(_exact_cross(f.du(), phi))
    return from_coeffs(coeffs, normal, adapted=True, truncation_order=5,
                       kind="builtin-model", model_name="normal-form",
                       params={k.name: getattr(c, k.name) for k in fields(c)})


@dataclass(frozen=True)
class NormalFormOracles:
    kappa_plus: float
    kappa_plus_u: float
    kappa_plus_v: float
    ridge_quantity: float
    v_kappa_plus: float
    kappa_s: float
    kappa_nu: float
    kappa_c: float
    kappa_t: float
    kappa_nu_t: float
    kappa_s_t: float
    kappa_t_t: float
    epsilon: int


def normal_form_oracles(c: NormalFormCoeffs) -> NormalFormOracles:
    """Closed-form values at the origin of a normal form with ``b20, b03 > 0``.

    Only the leading coefficients enter; tails do not affect these values.
    """
    if c.b20 == 0:
        raise NoFocalPoint("kappa_plus(0) = 0, focal oracles undefined")
    if c.b03 < 0:
        raise GeometryError("oracles assume b03 > 0; b03 < 0 is the mirror image under v -> -v")
    a20, b20, b30, b12, b03 = (float(x) for x in (c.a20, c.b20, c.b30, c.b12, c.b03))
    ku = b30 - a20 * b12
    q = 4 * b12 ** 2 + a20 * b03 ** 2
    kv = -q / (2 * b03)
    ridge = 4 * b12 ** 3 + b30 * b03 ** 2
    vk = ridge / (2 * b03)
    ref = ku if ku != 0 else kv
    eps = 1 if np.sign(vk) == np.sign(ref) else -1
    with np.errstate(divide="ignore", invalid="ignore"):
        ks_t = eps * b20 * (-4 * b12 * ku + a20 * q) / ridge if ridge else np.nan
        kt_t = b20 ** 2 * q / ridge if ridge else np.nan
    return NormalFormOracles(b20, ku, kv, ridge, vk, a20, b20, b03, b12, -b20, ks_t, kt_t, eps)


# -- A-models and other built-ins -------------------------------------------
def _poly(mapc: dict, normal: dict | None, name: str, params: dict, **kw) -> SurfaceSpec:
    return from_coeffs(mapc, normal, kind="builtin-model", model_name=name, params=params,
                       truncation_order=5, **kw)


def cuspidal_edge() -> SurfaceSpec:
    return _poly({(1, 0): (1, 0, 0), (0, 2): (0, 1, 0), (0, 3): (0, 0, 1)},
                 {(0, 0): (0, 0, 2), (0, 1): (0, -3, 0)}, "cuspidal-edge", {})


def swallowtail(k: float = 0.0, alpha: float = 0.0, beta: float = 0.0,
                gamma: float = 0.0) -> SurfaceSpec:
    """``(u, 3v^4 + u v^2 + k u^2, 4v^3 + 2uv)`` and a perturbation of it.

    ``k`` bends the surface so that the limiting normal curvature at the origin
    is nonzero.  ``alpha, beta, gamma`` give ``f = (u, Y, Z)`` with
    ``Z = 4v^3 + 2uv + gamma u^2`` and ``Y_v = m Z_v``, ``m = v + alpha u + beta v^2``,
    so that ``(Y_u - m Z_u, -1, m)`` stays a normal.
    """
    m: dict = {}
    for key, vec in [((1, 0), (1, 0, 0)), ((0, 4), (0, 3, 0)), ((1, 2), (0, 1, 0)),
                     ((0, 3), (0, 0, 4)), ((1, 1), (0, 0, 2)), ((2, 0), (0, k, gamma)),
                     ((1, 3), (0, 4 * alpha + 2 * beta / 3, 0)), ((2, 1), (0, 2 * alpha, 0)),
                     ((0, 5), (0, 12 * beta / 5, 0))]:
        _add(m, key, vec)
    n: dict = {}
    for key, vec in [((0, 2), (-1, 0, beta)), ((1, 0), (2 * k, 0, alpha)), ((0, 0), (0, -1, 0)),
                     ((0, 1), (0, 0, 1)), ((0, 3), (4 * alpha - 4 * beta / 3, 0, 0)),
                     ((1, 1), (2 * alpha - 2 * gamma, 0, 0)), ((2, 0), (-2 * alpha * gamma, 0, 0)),
                     ((1, 2), (-2 * beta * gamma, 0, 0))]:
        _add(n, key, vec)
    params = {"k": k}
    params.update({name: val for name, val in (("alpha", alpha), ("beta", beta), ("gamma", gamma))
                   if val})
    return _poly(m, n, "swallowtail", params)


def cuspidal_butterfly() -> SurfaceSpec:
    m = {(1, 0): (1, 0, 0), (0, 5): (0, 4, 0), (1, 2): (0, 1, 0), (0, 4): (0, 0, 5),
         (1, 1): (0, 0, 2)}
    n = {(0, 2): (-1, 0, 0), (0, 0): (0, -1, 0), (0, 1): (0, 0, 1)}
    return _poly(m, n, "cuspidal-butterfly", {})


def cuspidal_lips() -> SurfaceSpec:
    m = {(1, 0): (1, 0, 0), (0, 4): (0, 3, 0), (2, 2): (0, 2, 0), (0, 3): (0, 0, 1),
         (2, 1): (0, 0, 1)}
    n = {(1, 2): (4, 0, 0), (0, 0): (0, 1, 0), (0, 1): (0, 0, -4)}
    return _poly(m, n, "cuspidal-lips", {})


def cuspidal_beaks() -> SurfaceSpec:
    m = {(1, 0): (1, 0, 0), (0, 4): (0, 3, 0), (2, 2): (0, -2, 0), (0, 3): (0, 0, 1),
         (2, 1): (0, 0, -1)}
    n = {(1, 2): (-4, 0, 0), (0, 0): (0, 1, 0), (0, 1): (0, 0, -4)}
    return _poly(m, n, "cuspidal-beaks", {})


def d4(sign: int) -> SurfaceSpec:
    s = 1.0 if sign > 0 else -1.0
    m = {(1, 1): (1, 0, 0), (2, 0): (0, 1, 0), (0, 2): (0, 3 * s, 0), (2, 1): (0, 0, 1),
         (0, 3): (0, 0, s)}
    return _poly(m, None, "d4-plus" if s > 0 else "d4-minus", {})


def plane() -> SurfaceSpec:
    return _poly({(1, 0): (1, 0, 0), (0, 1): (0, 1, 0)}, {(0, 0): (0, 0, 1)}, "plane", {})


def frontal_second_kind(k: float = 1.0) -> SurfaceSpec:
    """A frontal that is not a front at the origin, with a second-kind singular point.

    ``f = (u, 12v^5/5 + 2uv^3/3 + k u^2, 4v^3 + 2uv)``: ``f_v`` is a multiple of
    ``(0, v^2, 1)`` so the singular curve is ``u = -6 v^2`` with null direction
    ``d/dv``, but the normal ``(4v^3/3 - 2ku, 1, -v^2)`` has ``nu_v(0) = 0``.
    """
    m = {(1, 0): (1, 0, 0), (0, 5): (0, 12 / 5, 0), (1, 3): (0, 2 / 3, 0), (2, 0): (0, k, 0),
         (0, 3): (0, 0, 4), (1, 1): (0, 0, 2)}
    n = {(0, 3): (4 / 3, 0, 0), (1, 0): (-2 * k, 0, 0), (0, 0): (0, 1, 0), (0, 2): (0, 0, -1)}
    return _poly(m, n, "frontal-second-kind", {"k": k})


def revolution_graph(a: float = 1.0, b: float = 1.0) -> SurfaceSpec:
    """Regular graph ``z = a r^2/2 + b r^4/4`` over the ``(x, y)`` plane."""
    m = {(1, 0): (1, 0, 0), (0, 1): (0, 1, 0), (2, 0): (0, 0, a / 2), (0, 2): (0, 0, a / 2),
         (4, 0): (0, 0, b / 4), (2, 2): (0, 0, b / 2), (0, 4): (0, 0, b / 4)}
    # normal numerator (-z_x, -z_y, 1)
    n = {(0, 0): (0, 0, 1), (1, 0): (-a, 0, 0), (0, 1): (0, -a, 0), (3, 0): (-b, 0, 0),
         (1, 2): (-b, 0, 0), (2, 1): (0, -b, 0), (0, 3): (0, -b, 0)}
    return _poly(m, n, "revolution-graph", {"a": a, "b": b})


def revolution_graph_curvatures(a: float, b: float, r: np.ndarray):
    """Meridian and parallel curvatures of :func:`revolution_graph` at radius ``r``."""
    fp = a * r + b * r ** 3
    fpp = a + 3 * b * r ** 2
    w = np.sqrt(1 + fp ** 2)
    return fpp / w ** 3, (a + b * r ** 2) / w


def rotational_cusp(a: float = 2.0) -> SurfaceSpec:
    """Cusp ``(a + v^2, v^3)`` rotated about the z-axis; a circle of cuspidal edges.

    Parametrized as ``((a + v^2) cos u, (a + v^2) sin u, v^3)``, already adapted.
    """

    def fmap(u: Jet, v: Jet) -> Jet:
        r = v * v + a
        return J.stack([r * J.cos(u), r * J.sin(u), v * v * v])

    def fnormal(u: Jet, v: Jet) -> Jet:
        return J.stack([3.0 * v * J.cos(u), 3.0 * v * J.sin(u), v * 0.0 - 2.0])

    return from_function(fmap, fnormal, adapted=True, model_name="rotational-cusp",
                         params={"a": a})


def sphere(radius: float = 1.0) -> SurfaceSpec:
    """Upper unit-sphere patch over the disc, outward normal."""

    def fmap(u: Jet, v: Jet) -> Jet:
        return J.stack([u, v, J.sqrt(radius ** 2 - u * u - v * v)])

    return from_function(fmap, fmap, model_name="sphere", params={"radius": radius})


STANDARD = {
    "cuspidal-edge": cuspidal_edge,
    "swallowtail": swallowtail,
    "cuspidal-butterfly": cuspidal_butterfly,
    "cuspidal-lips": cuspidal_lips,
    "cuspidal-beaks": cuspidal_beaks,
    "d4-plus": lambda: d4(+1),
    "d4-minus": lambda: d4(-1),
}

EXTRA = {
    "plane": plane,
    "sphere": sphere,
    "frontal-second-kind": frontal_second_kind,
    "revolution-graph": revolution_graph,
    "rotational-cusp": rotational_cusp,
}


def make_standard_model(name: str, **params) -> SurfaceSpec:
    if name not in STANDARD:
        raise UnknownModel(f"unknown model {name!r}")
    return STANDARD[name](**params)


def make_model(name: str, params: dict | None = None) -> SurfaceSpec:
    """Any built-in surface by name, including the normal form."""
    params = dict(params or {})
    if name == "normal-form":
        return make_normal_form(NormalFormCoeffs.from_dict(params))
    table = {**STANDARD, **EXTRA}
    if name not in table:
        raise UnknownModel(f"unknown model {name!r}")
    try:
        return table[name](**params)
    except TypeError as exc:
        raise UnknownModel(f"bad parameters for model {name!r}: {exc}") from exc
