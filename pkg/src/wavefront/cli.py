"""Command-line front end.

Exit codes: 0 ok, 1 numerical failure, 2 unsupported geometry, 3 nothing
found, 64 usage or malformed input.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import invariants as I
from .chart import corank, straighten
from .classify import classify_singular_point
from .distsq import d4_classify
from .errors import GeometryError, NothingFound, NotSingular
from .models import UnknownModel, make_model
from .parallel import (chart_at, find_landmarks, focal_offset, mesh_grid, parallel_singularity,
                       trace_cpc, write_landmarks_csv)
from .surface import SurfaceSpec, from_coeffs

EXIT_USAGE = 64
MAX_ORDER = 5


class UsageError(Exception):
    exit_code = EXIT_USAGE


def fmt(x) -> str:
    """Shortest round-trip decimal of ``x`` rounded to 12 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    r = float(f"{x:.12g}")
    return "0" if r == 0 else repr(r)


def _clean(obj):
    """Round floats for JSON output; NaN becomes null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}") + 0.0
    return obj


def dump_json(obj, fh) -> None:
    json.dump(_clean(obj), fh, indent=2)
    fh.write("\n")


# -- surface files -----------------------------------------------------------
def _coeff_table(entries, order: int, what: str) -> dict:
    if not isinstance(entries, list):
        raise UsageError(f"{what} must be a list")
    out: dict = {}
    for e in entries:
        try:
            i, j = int(e["i"]), int(e["j"])
            vec = (float(e["x"]), float(e["y"]), float(e["z"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad {what} entry {e!r}") from exc
        if not all(math.isfinite(x) for x in vec):
            raise UsageError(f"{what} entry ({i}, {j}) is not finite")
        if i < 0 or j < 0 or i + j > order:
            raise UsageError(f"{what} entry ({i}, {j}) exceeds order {order}")
        out[(i, j)] = np.add(out.get((i, j), np.zeros(3)), vec)
    return out


def surface_from_dict(doc: dict) -> SurfaceSpec:
    if not isinstance(doc, dict):
        raise UsageError("surface file must hold a JSON object")
    kind = doc.get("type")
    if kind == "model":
        m = doc.get("model")
        if not isinstance(m, dict) or not isinstance(m.get("name"), str):
            raise UsageError("model surfaces need {\"model\": {\"name\": ..., \"params\": {...}}}")
        params = m.get("params", {})
        if not isinstance(params, dict):
            raise UsageError("model params must be an object")
        try:
            return make_model(m["name"], params)
        except (UnknownModel, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    if kind == "polynomial":
        order = doc.get("order")
        if not isinstance(order, int) or isinstance(order, bool) or not 0 < order <= MAX_ORDER:
            raise UsageError(f"order must be an integer in 1..{MAX_ORDER}")
        coeffs = _coeff_table(doc.get("coeffs"), order, "coeffs")
        normal = None
        if doc.get("normal_coeffs") is not None:
            normal = _coeff_table(doc["normal_coeffs"], order, "normal_coeffs")
        adapted = doc.get("adapted", False)
        if not isinstance(adapted, bool):
            raise UsageError("adapted must be a boolean")
        return from_coeffs(coeffs, normal, adapted, truncation_order=order, kind="polynomial")
    raise UsageError("type must be \"polynomial\" or \"model\"")


def load_surface(path: str, flip_normal: bool = False, reverse: bool = False) -> SurfaceSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc
    s = surface_from_dict(doc)
    if reverse:
        s = s.reoriented()
    if flip_normal:
        s = s.flipped()
    return s


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from exc
    if not (math.isfinite(a) and math.isfinite(b)):
        raise argparse.ArgumentTypeError("coordinates must be finite")
    return a, b


# -- commands ----------------------------------------------------------------
def cmd_classify(args, surface, out) -> int:
    rep = classify_singular_point(surface, args.point)
    dump_json(rep.to_dict(), out)
    return 2 if rep.label == "unsupported-corank-2" else 0


def cmd_profile(args, surface, out) -> int:
    if corank(surface, args.seed) == 0:
        raise NothingFound("no singular curve in window: the seed point is regular")
    try:
        chart = straighten(surface, args.seed)
    except NotSingular as exc:
        raise NothingFound(f"no singular curve in window: {exc}") from exc
    us = np.linspace(args.window[0], args.window[1], args.samples)
    I.invariant_profile(chart, us).write_csv(out, fmt)
    return 0


def cmd_parallel(args, surface, out) -> int:
    t = None
    if args.t != "auto":
        try:
            t = float(args.t)
        except ValueError as exc:
            raise UsageError(f"--t must be a number or 'auto', got {args.t!r}") from exc
    rep = parallel_singularity(surface, args.point, t)
    dump_json(rep.to_dict(), out)
    return 0


def cmd_cpc(args, surface, out) -> int:
    window = None
    if args.window is not None:
        window = tuple(args.window)
    line = trace_cpc(surface, args.value, args.seed, window, args.step)
    line.write_csv(out, fmt)
    return 0


def cmd_landmarks(args, surface, out) -> int:
    lms = find_landmarks(surface, args.window, args.samples)
    write_landmarks_csv(lms, out, fmt)
    return 0


def cmd_dsq(args, surface, out) -> int:
    dump_json(d4_classify(surface, args.point).to_dict(), out)
    return 0


def cmd_mesh(args, surface, out) -> int:
    t = None
    if args.t == "auto":
        chart, cp = chart_at(surface, args.center)
        t = focal_offset(chart, cp)
    elif args.t is not None:
        try:
            t = float(args.t)
        except ValueError as exc:
            raise UsageError(f"--t must be a number or 'auto', got {args.t!r}") from exc
    verts, faces = mesh_grid(surface, args.center, args.range, args.n, t)
    lines = [f"v {fmt(x)} {fmt(y)} {fmt(z)}" for x, y, z in verts]
    lines += ["f " + " ".join(str(k) for k in face) for face in faces]
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wavefront", description="Invariants and singularities of wave fronts.")
    common = _Parser(add_help=False)
    common.add_argument("--surface", required=True, help="surface JSON file")
    common.add_argument("--flip-normal", action="store_true", help="use -nu as the unit normal")
    common.add_argument("--reverse-orientation", action="store_true",
                        help="reparametrize by v -> -v")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="classify a singular point (JSON)")
    c.add_argument("--point", type=_pair, default=(0.0, 0.0))
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("profile", parents=[common], help="invariants along the singular curve (CSV)")
    c.add_argument("--window", type=_pair, default=(-0.1, 0.1))
    c.add_argument("--samples", type=int, default=21)
    c.add_argument("--seed", type=_pair, default=(0.0, 0.0),
                   help="singular point the chart is centred at")
    c.set_defaults(func=cmd_profile)

    c = sub.add_parser("parallel", parents=[common], help="singularity of the parallel surface (JSON)")
    c.add_argument("--point", type=_pair, default=(0.0, 0.0))
    c.add_argument("--t", default="auto", help="offset, or 'auto' for 1/kappa at the point")
    c.set_defaults(func=cmd_parallel)

    c = sub.add_parser("cpc", parents=[common], help="constant principal curvature line (CSV)")
    c.add_argument("--value", type=float, required=True)
    c.add_argument("--seed", type=_pair, required=True)
    c.add_argument("--window", type=float, nargs=4, metavar=("UMIN", "UMAX", "VMIN", "VMAX"))
    c.add_argument("--step", type=float, default=5e-3)
    c.set_defaults(func=cmd_cpc)

    c = sub.add_parser("landmarks", parents=[common], help="exactly cusped points, extrema, ridges (CSV)")
    c.add_argument("--window", type=_pair, default=(-0.1, 0.1))
    c.add_argument("--samples", type=int, default=41)
    c.set_defaults(func=cmd_landmarks)

    c = sub.add_parser("dsq", parents=[common], help="D4 test of the distance squared function (JSON)")
    c.add_argument("--point", type=_pair, default=(0.0, 0.0))
    c.set_defaults(func=cmd_dsq)

    c = sub.add_parser("mesh", parents=[common], help="OBJ grid of f or of a parallel f^t")
    c.add_argument("--t", default=None, help="offset of the parallel surface, or 'auto'")
    c.add_argument("--center", type=_pair, default=(0.0, 0.0))
    c.add_argument("--range", type=float, default=0.1, help="half-width of the parameter square")
    c.add_argument("--n", type=int, default=10, help="grid has (2n+1)^2 vertices")
    c.add_argument("--out", required=True, help="output file, '-' for stdout")
    c.set_defaults(func=cmd_mesh)
    return p


PAIR_OPTIONS = ("--point", "--window", "--seed", "--center")
_NEGATIVE = re.compile(r"^-[\d.]")


def _join_negative_pairs(argv: list) -> list:
    """``--window -0.1,0.1`` -> ``--window=-0.1,0.1`` so argparse does not read an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in PAIR_OPTIONS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]) \
                and "," in argv[i + 1]:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_negative_pairs(argv))
    except SystemExit as exc:   # usage errors (64) and --help (0)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "samples", 2) < 2 or getattr(args, "n", 1) < 1:
        print("wavefront: error: --samples must be >= 2 and --n >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        surface = load_surface(args.surface, args.flip_normal, args.reverse_orientation)
        return args.func(args, surface, out)
    except UsageError as exc:
        print(f"wavefront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"wavefront: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
