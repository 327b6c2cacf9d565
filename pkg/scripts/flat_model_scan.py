#!/usr/bin/env python3
"""Scan the flat-model spectrum over intersection angles.

For each angle the boundary pair is (R^n x 0, e^{alpha J} R^n x 0) with
sigma = 0; the table lists the eigenvalues near zero and the spectral gap,
which should follow the progression alpha + pi k with gap min(alpha, pi-alpha).
"""

import argparse

import numpy as np

from floerss import spectrum as sp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--angles", type=int, default=9,
                    help="number of angles in (0, pi/2]")
    ap.add_argument("--window", type=float, default=7.0)
    args = ap.parse_args()

    print(f"{'alpha':>10} | {'gap':>10} | eigenvalues in window")
    print("-" * 64)
    for alpha in np.linspace(np.pi / 2 / args.angles, np.pi / 2, args.angles):
        rep = sp.eigenvalues(sp.flat_model(float(alpha)), window=args.window)
        eigs = ", ".join(f"{r:+.4f}" for r, _ in rep.eigenvalues)
        print(f"{alpha:10.4f} | {rep.gap:10.6f} | {eigs}")


if __name__ == "__main__":
    main()
