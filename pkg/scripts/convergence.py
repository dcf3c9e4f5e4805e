"""Convergence of the growth-rate estimator against the monodromy value at a tongue point."""

import argparse

import numpy as np

from anosovq.cocycle import IntegratorConfig
from anosovq.dichotomy import monodromy
from anosovq.hull import DrivingSpec, TrigPolynomial
from anosovq.lyapunov import classical_lyapunov, stable_exponent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--E", type=float, default=1.1)
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--horizons", type=float, nargs="+", default=[25, 50, 100, 200, 400, 800])
    args = ap.parse_args(argv)

    spec = DrivingSpec(TrigPolynomial.cosine(2.0 * args.q), args.E, [1.0])
    ref = monodromy(spec, [0.0], 2 * np.pi).lambda_plus.real
    print(f"monodromy exponent {ref:.10f}")
    print(f"{'H':>6} {'lambda_c':>12} {'err':>9} {'stderr':>9} {'stable':>12}")
    for H in args.horizons:
        est = classical_lyapunov(spec, [0.0], H)
        st = stable_exponent(spec, [0.0], horizon=H).value
        print(f"{H:6g} {est.value:12.8f} {abs(est.value - ref):9.2e} {est.slope_stderr:9.2e} {st:12.8f}")

    print("\nrenormalisation interval at H=200")
    for dt in (4.0, 2.0, 1.0, 0.5):
        est = classical_lyapunov(spec, [0.0], 200.0, IntegratorConfig(renorm_interval=dt))
        print(f"{dt:6g} {est.value:12.8f} {abs(est.value - ref):9.2e}")


if __name__ == "__main__":
    main()
