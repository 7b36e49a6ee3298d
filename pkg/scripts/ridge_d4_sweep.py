#!/usr/bin/env python3
"""Sweep a normal form into a first-order ridge and record the D4 test of psi.

b30(s) = s * (-4 b12^3 / b03^2) + (1 - s) * b30_start, s in [0, 1]. Writes CSV.
"""
import argparse
import csv
import sys

import numpy as np

from wavefront import distsq as D
from wavefront import models as M
from wavefront.cli import fmt


def sweep(a20, b20, b12, b03, b30_start, steps):
    target = -4 * b12 ** 3 / b03 ** 2
    for s in np.linspace(0.0, 1.0, steps):
        b30 = s * target + (1 - s) * b30_start
        c = M.NormalFormCoeffs(a20=a20, b20=b20, b30=b30, b12=b12, b03=b03)
        r = D.d4_classify(M.make_normal_form(c), (0, 0))
        yield {"s": s, "b30": b30, "delta_psi": r.delta_psi, "tau_delta": r.tau_delta,
               "d4_label": r.d4_label, "ridge_order": r.ridge_order,
               "two_jet_norm": r.two_jet_norm, "ridge_consistency": r.ridge_consistency}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--a20", type=float, default=1.0)
    p.add_argument("--b20", type=float, default=2.0)
    p.add_argument("--b12", type=float, default=2.0)
    p.add_argument("--b03", type=float, default=1.0)
    p.add_argument("--b30-start", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", default="-", help="CSV file, '-' for stdout")
    args = p.parse_args(argv)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    rows = list(sweep(args.a20, args.b20, args.b12, args.b03, args.b30_start, args.steps))
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in r.items()})
    if fh is not sys.stdout:
        fh.close()
    not_d4 = [r["d4_label"] == "not-D4" for r in rows]
    crossings = [k for k in range(1, len(rows)) if not_d4[k] != not_d4[k - 1]]
    signs = [k for k in range(1, len(rows)) if not (not_d4[k] or not_d4[k - 1])
             and rows[k]["d4_label"] != rows[k - 1]["d4_label"]]
    print(f"|delta| <= tau crossings at steps {crossings}; D4 sign changes at {signs}; "
          f"ridge consistency at every step: {all(r['ridge_consistency'] for r in rows)}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
