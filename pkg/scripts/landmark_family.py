#!/usr/bin/env python3
"""Exactly cusped points along a family with u-dependent b12.

The u^2 v^2 tail h3 = (c,) makes the effective b12 depend on u. For each c the
script lists the exactly cusped points in a window, kappa_s there, and whether
the image of the parallel singular curve has a discrete cusp. Writes CSV.
"""
import argparse
import csv
import sys

import numpy as np

from wavefront import models as M
from wavefront import parallel as P
from wavefront.cli import fmt


def scan(c, window, samples):
    s = M.make_normal_form(c)
    for lm in P.find_landmarks(s, window, samples):
        if lm.kind != "exactly-cusped":
            continue
        p = (lm.u, 0.0)
        line, img = P.cpc_image(s, p, h=1e-3, radius=0.02)
        i = int(np.argmin(np.linalg.norm(line.points - p, axis=1)))
        cusps = P.image_cusps(img)
        yield {"u": lm.u, "kappa_s": lm.data["kappa_s"], "kappa_t_t": lm.data["kappa_t_t"],
               "image_cusp": bool(cusps) and min(abs(k - i) for k in cusps) <= 1}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--h3", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    p.add_argument("--window", type=float, nargs=2, default=(-0.1, 0.1))
    p.add_argument("--samples", type=int, default=41)
    p.add_argument("--out", default="-", help="CSV file, '-' for stdout")
    args = p.parse_args(argv)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["h3", "u", "kappa_s", "kappa_t_t", "image_cusp"])
    for h3 in args.h3:
        c = M.NormalFormCoeffs(a20=-4.0, b20=1.0, b30=0.5, b12=0.9, b03=1.0, h3=(h3,))
        for r in scan(c, tuple(args.window), args.samples):
            w.writerow([fmt(h3), fmt(r["u"]), fmt(r["kappa_s"]), fmt(r["kappa_t_t"]), r["image_cusp"]])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
