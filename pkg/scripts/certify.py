"""Anosov certificates for periodic tongue points and a two-frequency driving."""

import argparse

import numpy as np

from anosovq.dichotomy import certify_periodic, certify_quasiperiodic
from anosovq.hull import DrivingSpec, TrigPolynomial, TrigTerm


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--energies", type=float, nargs="+", default=[1.1, 0.25, -1.0])
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--qp-horizon", type=float, default=200.0)
    ap.add_argument("--skip-qp", action="store_true")
    args = ap.parse_args(argv)

    for E in args.energies:
        spec = DrivingSpec(TrigPolynomial.cosine(2.0 * args.q), E, [1.0])
        cert = certify_periodic(spec, [0.0], 2 * np.pi)
        lam = complex(cert.exponents[1])
        print(f"periodic E={E:g}: lambda+ = {lam.real:.6f}{lam.imag:+.6f}i, "
              f"residual {cert.residual_max:.2e} -> {cert.verdict}")

    if not args.skip_qp:
        golden = (1 + 5 ** 0.5) / 2
        V = TrigPolynomial(0.0, (TrigTerm((1, 0), 0.3, 0.0), TrigTerm((0, 1), 0.3, 0.0)), 2)
        cert = certify_quasiperiodic(DrivingSpec(V, -1.0, [1.0, golden]), [0.0, 0.0], args.qp_horizon)
        print(f"two-frequency E=-1: lambda = {cert.exponents[1].real:.6f}, "
              f"residual {cert.residual_max:.2e} -> {cert.verdict}")
        for note in cert.notes:
            print("  note:", note)


if __name__ == "__main__":
    main()
