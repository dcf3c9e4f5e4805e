"""Mathieu stability chart: trace classification and growth rate over an (E, q) grid."""

import argparse
import csv
import sys

import numpy as np

from anosovq.dichotomy import MonodromyData, classify_gap
from anosovq.cocycle import integrate_cocycle
from anosovq.hull import DrivingSpec, TrigPolynomial
from anosovq.lyapunov import classical_lyapunov


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--E", type=float, nargs=3, default=(-1.0, 5.0, 121), metavar=("MIN", "MAX", "N"))
    ap.add_argument("--q", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ap.add_argument("--horizon", type=float, default=100.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    energies = np.linspace(args.E[0], args.E[1], int(args.E[2]))
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["q", "E", "trace", "classification", "lambda_monodromy", "lambda_c", "stderr"])
    for q in args.q:
        for E in energies:
            spec = DrivingSpec(TrigPolynomial.cosine(2.0 * q), E, [1.0])
            M = integrate_cocycle(spec, [0.0], 0.0, 2 * np.pi).F
            m = MonodromyData.from_matrix(M, 2 * np.pi)
            est = classical_lyapunov(spec, [0.0], args.horizon)
            w.writerow([q, f"{E:.6g}", f"{m.trace:.10g}", classify_gap(m),
                        f"{max(m.lambda_plus.real, 0.0):.8g}", f"{est.value:.8g}", f"{est.slope_stderr:.3g}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
