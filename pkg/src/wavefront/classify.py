"""Singularity type of corank-one singular points from derivatives of lambda.

With ``eta`` extended off the singular set as a kernel field of ``df``:

* ``d lambda != 0``: cuspidal edge iff ``eta lambda != 0``; swallowtail iff
  additionally ``eta eta lambda != 0``; cuspidal butterfly iff
  ``eta lambda = eta eta lambda = 0`` and ``eta eta eta lambda != 0``.
* ``d lambda = 0``: cuspidal lips iff ``det Hess(lambda) > 0``; cuspidal beaks
  iff ``eta eta lambda != 0`` and ``det Hess(lambda) < 0``.

These criteria presume a front, so frontals that are not fronts at the point
are reported as unresolved.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import jets as J
from .chart import (classify_kind, corank, kernel_field, normal_jet, null_direction,
                    signed_area_density)
from .errors import DegeneratePoint, GeometryError, TraceFailure
from .jets import Jet
from .surface import SurfaceSpec

TAU_VANISH = 1e-7
ETA_ORDER = 4

LABELS = ("cuspidal-edge", "swallowtail", "cuspidal-butterfly", "cuspidal-lips",
          "cuspidal-beaks", "unresolved", "unresolved (frontal)", "unsupported-corank-2")


@dataclass
class SingularPointReport:
    location: tuple
    corank: int
    kind: str            # first | second | degenerate
    admissible: bool | None
    label: str
    front: bool | None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["location"] = list(self.location)
        return d


def eta_extension(surface: SurfaceSpec, point, order: int = ETA_ORDER,
                  method: str = "kernel") -> Jet:
    """Extension of the null direction to a neighbourhood of ``point``.

    ``kernel`` is the algebraic kernel field of ``df``; ``perturbed`` adds
    ``lambda * X`` for a fixed polynomial field ``X``, another admissible
    extension used to check that the criteria do not depend on the choice.
    """
    f = surface.jet(point, order + 1)
    eta = kernel_field(f)
    if method == "kernel":
        return eta
    if method == "perturbed":
        lam = signed_area_density(surface, point, order)
        u = Jet.variable("u", point, order) - point[0]
        v = Jet.variable("v", point, order) - point[1]
        x = J.stack([0.7 + 0.3 * v, -0.4 + 0.5 * u])
        return eta + lam * x
    raise ValueError(f"unknown eta extension {method!r}")


def eta_samples(surface: SurfaceSpec, points) -> np.ndarray:
    """Unit kernel-field directions at traced curve points (matches null_direction)."""
    out = []
    for q in points:
        e = kernel_field(surface.jet(q, 1)).value
        out.append(e / np.linalg.norm(e))
    return np.array(out)


def lambda_evidence(surface: SurfaceSpec, point, method: str = "kernel") -> dict:
    lam = signed_area_density(surface, point, ETA_ORDER)
    eta = eta_extension(surface, point, ETA_ORDER, method)
    d1 = lam.along(eta)
    d2 = d1.along(eta)
    d3 = d2.along(eta)
    hess = lam.hessian()
    return {
        "lambda": float(lam.value),
        "grad_lambda": [float(x) for x in lam.grad()],
        "eta_lambda": float(d1.value),
        "eta_eta_lambda": float(d2.value),
        "eta_eta_eta_lambda": float(d3.value),
        "det_hessian": float(np.linalg.det(hess)),
        "scale": lam.scale(),
    }


def is_front(surface: SurfaceSpec, point) -> bool:
    """``(f, nu)`` is an immersion at a corank-one point iff ``d nu(eta) != 0``."""
    eta = null_direction(surface, point)
    nu = normal_jet(surface, point, 1)
    d = eta[0] * nu.partial(1, 0) + eta[1] * nu.partial(0, 1)
    f = surface.jet(point, 1)
    scale = max(np.linalg.norm(f.partial(1, 0)), np.linalg.norm(f.partial(0, 1)), 1e-300)
    return bool(np.linalg.norm(d) > 1e-7 * max(scale, 1.0))


def label_from_evidence(ev: dict) -> tuple[str, str]:
    """``(kind, label)`` from the lambda derivatives, using relative thresholds."""
    tau = TAU_VANISH * max(ev["scale"], 1e-300)
    zero = lambda x: abs(x) <= tau
    if np.linalg.norm(ev["grad_lambda"]) > tau:
        if not zero(ev["eta_lambda"]):
            return "first", "cuspidal-edge"
        if not zero(ev["eta_eta_lambda"]):
            return "second", "swallowtail"
        if not zero(ev["eta_eta_eta_lambda"]):
            return "second", "cuspidal-butterfly"
        return "second", "unresolved"
    det = ev["det_hessian"]
    tau2 = TAU_VANISH * max(ev["scale"], 1e-300) ** 2
    if det > tau2:
        return "degenerate", "cuspidal-lips"
    if det < -tau2 and not zero(ev["eta_eta_lambda"]):
        return "degenerate", "cuspidal-beaks"
    return "degenerate", "unresolved"


def classify_singular_point(surface: SurfaceSpec, point, method: str = "kernel",
                            check_admissible: bool = True) -> SingularPointReport:
    point = (float(point[0]), float(point[1]))
    cr = corank(surface, point)
    if cr >= 2:
        return SingularPointReport(point, 2, "degenerate", None, "unsupported-corank-2", None, {})
    if cr == 0:
        lam = signed_area_density(surface, point, 1)
        raise GeometryError(f"not singular: lambda = {lam.value:.3e} at {point}")
    ev = lambda_evidence(surface, point, method)
    kind, label = label_from_evidence(ev)
    front = is_front(surface, point)
    admissible = None
    if kind == "second" and check_admissible:
        try:
            admissible = classify_kind(surface, point) == "second-admissible"
        except (TraceFailure, DegeneratePoint):
            admissible = None
    elif kind == "first":
        admissible = True
    if not front:
        label = "unresolved (frontal)"
    return SingularPointReport(point, cr, kind, admissible, label, front, ev)


def locate_degenerate(surface: SurfaceSpec, seed, tol: float = 1e-12) -> np.ndarray:
    """Common zero of ``lambda_u, lambda_v`` near ``seed`` by 2-D Newton."""
    q = np.asarray(seed, dtype=float)
    for _ in range(50):
        lam = signed_area_density(surface, q, 2)
        g, h = lam.grad(), lam.hessian()
        step = np.linalg.lstsq(h, -g, rcond=None)[0]
        q = q + step
        if np.linalg.norm(step) <= tol:
            break
    lam = signed_area_density(surface, q, 1)
    if abs(lam.value) > 1e-8 * max(lam.scale(), 1.0):
        raise DegeneratePoint(f"critical point of lambda at {tuple(q)} is not singular")
    return q


__all__ = ["SingularPointReport", "classify_singular_point", "eta_extension", "eta_samples",
           "label_from_evidence", "lambda_evidence", "locate_degenerate", "is_front"]
