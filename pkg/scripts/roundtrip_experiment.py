"""Deform model spectra by a polynomial g1, optionally add noise, and reconstruct.

Prints, per library polytope, whether the polytope comes back exactly, the
fitted residual constant C (d_H ~ C/k) and the sup of |g1| over the polytope.

    python3 scripts/roundtrip_experiment.py --ks 16 32 64 128 --noise 0.5 --seed 1
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from toricspec import library
from toricspec.errors import ToricError
from toricspec.inverse import ReconstructionConfig, canonical_equal, limit_polytope
from toricspec.quantum import TWO_PI, DeformationSeries, Polynomial, apply_deformation, inject_noise, model_spectrum

G1 = {
    1: DeformationSeries(1, ((Polynomial(((Fraction(1, 400), (2,)), (Fraction(-1, 100), (1,)))),),)),
    2: DeformationSeries(2, ((Polynomial(((Fraction(1, 2000), (2, 0)), (Fraction(-1, 200), (0, 1)))),
                              Polynomial(((Fraction(1, 1000), (1, 1)),))),)),
}


def sup_on(g, P, k=256):
    return g.sup_norm(model_spectrum(P, k).points)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ks", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--noise", type=float, default=0.0, help="noise radius C in C/k (absolute units)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--denominator-bound", type=int, default=32)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = ReconstructionConfig(denominator_bound=args.denominator_bound)
    for name in library.LIBRARY:
        P = library.get(name)
        g = G1[P.dim]
        clouds = [apply_deformation(model_spectrum(P, k), g) for k in args.ks]
        if args.noise:
            clouds = [inject_noise(c, args.noise, 1, rng) for c in clouds]
        t0 = time.perf_counter()
        try:
            res = limit_polytope(clouds, cfg)
        except ToricError as exc:
            print(f"{name:<8} FAILED ({type(exc).__name__}): {str(exc).splitlines()[0]}")
            continue
        dt = time.perf_counter() - t0
        sup = sup_on(g, P, 64 if P.dim > 1 else 256)
        print(f"{name:<8} exact={canonical_equal(res.polytope, P)!s:<5} C={res.constrained_C:.4f} "
              f"sup|g1|={sup:.4f} exponent={res.rate_fit[1]:.3f} tolerance={cfg.tolerance(max(args.ks)):.4f} "
              f"({dt:.2f} s)")
    print(f"(absolute units; lattice spacing at k_max is {TWO_PI / max(args.ks):.4f})")


if __name__ == "__main__":
    main()
