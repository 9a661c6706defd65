"""Write CSV plot data for joint spectra: plain, metaplectic and deformed.

One file per (polytope, k, variant) in --out-dir, header x1,...,xn.  Any
plotting tool can scatter them; the interesting pictures are the square and
H2 at k = 8 (plain vs metaplectic) and CP1 against k.

    python3 scripts/spectrum_figures.py --out-dir figures --ks 4 8 16
"""

import argparse
import os

from toricspec import io, library
from toricspec.errors import NoHalfForm
from toricspec.quantum import apply_deformation, metaplectic_spectrum, model_spectrum

from roundtrip_experiment import G1


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--ks", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--polytopes", nargs="+", default=list(library.LIBRARY))
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    written = 0
    for name in args.polytopes:
        P = library.get(name)
        for k in args.ks:
            variants = {"model": model_spectrum(P, k)}
            try:
                variants["metaplectic"] = metaplectic_spectrum(P, k)
            except NoHalfForm:
                pass
            variants["deformed"] = apply_deformation(variants["model"], G1[P.dim])
            for label, cloud in variants.items():
                path = os.path.join(args.out_dir, f"{name}_k{k}_{label}.csv")
                io.atomic_write(path, io.points_csv(cloud.points))
                written += 1
    print(f"{written} files in {args.out_dir}/")


if __name__ == "__main__":
    main()
