"""Cat-system coefficient eigenvectors, residuals and inner/outer labels across kick periods."""

import argparse

from anosovq.catmap import CatSystem, build_cat_coefficient_map, cat_anosov_directions, eigen_residual, run_cat


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.5])
    args = ap.parse_args(argv)

    for T in args.T:
        rep = run_cat(T)
        print(f"T={T:g}  lambda={rep.lam:.15f}  verdict={rep.verdict}")
        for d, r, kind in zip(rep.directions, rep.residuals, rep.derivations):
            print(f"  {d.label}  exponent {d.exponent:+.6f}  residual {r:.1e}  {kind}")
        plus = build_cat_coefficient_map(CatSystem(T), sign=+1)
        flipped = [eigen_residual(plus, d) for d in cat_anosov_directions(CatSystem(T))]
        print(f"  flipped-sign map: symplectic deviation {plus.phase_deviation():.1e}, "
              f"eigen residuals {', '.join(f'{r:.2g}' for r in flipped)}")


if __name__ == "__main__":
    main()
