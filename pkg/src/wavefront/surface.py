"""Surface specifications: polynomial maps, jet-defined maps and analytic maps.

A :class:`SurfaceSpec` answers one question, "what is the jet of the map
(and of its normal numerator, if one was supplied) at this parameter point?".
Three flavours share that interface:

* exact polynomials (``map`` is a :class:`~wavefront.jets.Jet` whose order
  equals the polynomial degree; jets at other points are exact re-expansions),
* truncated jets (``exact=False``; re-expansion elsewhere is a Taylor
  approximation, used for parallel surfaces built from a jet at one point),
* analytic maps given as a callable acting on coordinate jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import jets as J
from .errors import NormalUnavailable
from .jets import Jet

JetFn = Callable[[Jet, Jet], Jet]


@dataclass(frozen=True)
class SurfaceSpec:
    map: Jet | JetFn
    normal: Jet | JetFn | None = None
    declared_adapted: bool = False
    exact: bool = True
    truncation_order: int = 5
    kind: str = "polynomial"
    model_name: str | None = None
    params: dict = field(default_factory=dict)
    #: multiplies every derived or explicit unit normal (orientation flip)
    normal_sign: int = 1

    # -- jets -------------------------------------------------------------
    def _eval(self, obj, point, order: int) -> Jet:
        point = (float(point[0]), float(point[1]))
        if not isinstance(obj, Jet):
            return J.lift(obj, point, order)
        if self.exact:
            return obj.shift(point, order)
        return obj.shift(point, min(order, obj.order))

    def jet(self, point, order: int) -> Jet:
        """Jet of the surface map at ``point``."""
        return self._eval(self.map, point, order)

    def normal_numerator(self, point, order: int) -> Jet | None:
        if self.normal is None:
            return None
        return self._eval(self.normal, point, order)

    def unit_normal(self, point, order: int) -> Jet:
        """Explicit unit normal jet; raises if the surface carries no normal."""
        n = self.normal_numerator(point, order)
        if n is None:
            raise NormalUnavailable("normal unavailable: no explicit normal numerator")
        return J.normalize(n) * float(self.normal_sign)

    def value(self, point) -> np.ndarray:
        return self.jet(point, 0).value

    def jacobian(self, point) -> np.ndarray:
        """3x2 matrix ``[f_u | f_v]`` at ``point``."""
        j = self.jet(point, 1)
        return np.column_stack([j.partial(1, 0), j.partial(0, 1)])

    @property
    def degree(self) -> int | None:
        """Polynomial degree for exact polynomial maps, else ``None``."""
        if not isinstance(self.map, Jet) or not self.exact:
            return None
        c = self.map.c
        nz = [i + j for i in range(c.shape[0]) for j in range(c.shape[1]) if np.any(c[i, j] != 0)]
        return max(nz) if nz else 0

    # -- transformations --------------------------------------------------
    def flipped(self) -> "SurfaceSpec":
        """The same surface with the opposite unit normal."""
        return replace(self, normal_sign=-self.normal_sign)

    def moved(self, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> "SurfaceSpec":
        """Apply the rigid motion ``x -> R x + t`` to the target."""
        R = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)

        def rot(obj, shift):
            if obj is None:
                return None
            if not isinstance(obj, Jet):
                return lambda u, v: _rigid(obj(u, v), R, shift)
            return _rigid(obj, R, shift)

        return replace(self, map=rot(self.map, t), normal=rot(self.normal, np.zeros(3)))

    def reoriented(self) -> "SurfaceSpec":
        """Reparametrize by ``(u, v) -> (u, -v)`` (reverses the source orientation)."""

        def flip(obj):
            if obj is None:
                return None
            if not isinstance(obj, Jet):
                return lambda u, v: obj(u, -v)
            sign = (-1.0) ** np.arange(obj.order + 1)
            c = obj.c * sign.reshape((1, -1) + (1,) * len(obj.shape))
            return Jet(c, (obj.base[0], -obj.base[1]), obj.order)

        return replace(self, map=flip(self.map), normal=flip(self.normal))


def _rigid(j: Jet, R: np.ndarray, t: np.ndarray) -> Jet:
    c = np.einsum("ij...k,lk->ij...l", j.c, R)
    c[0, 0] += t
    return Jet(c, j.base, j.order)


def from_coeffs(coeffs: dict, normal_coeffs: dict | None = None, adapted: bool = False,
                truncation_order: int = 5, **kw) -> SurfaceSpec:
    """Polynomial surface from monomial coefficients ``{(i, j): (x, y, z)}``."""
    m = J.polynomial_jet(coeffs)
    n = J.polynomial_jet(normal_coeffs) if normal_coeffs else None
    return SurfaceSpec(map=m, normal=n, declared_adapted=adapted,
                       truncation_order=truncation_order, **kw)


def from_function(fn: JetFn, normal: JetFn | None = None, adapted: bool = False,
                  **kw) -> SurfaceSpec:
    """Analytic surface evaluated through jet arithmetic on ``(u, v)``."""
    return SurfaceSpec(map=fn, normal=normal, declared_adapted=adapted, kind="function", **kw)


def from_jet(map_jet: Jet, normal_jet: Jet | None = None, **kw) -> SurfaceSpec:
    """Surface known only through its truncated jet at one point."""
    return SurfaceSpec(map=map_jet, normal=normal_jet, exact=False, kind="jet", **kw)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
