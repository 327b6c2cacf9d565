#!/usr/bin/env python3
"""Survey displaceability verdicts for small Betti patterns.

Enumerates Z2 Betti vectors of closed connected manifolds up to the given
dimension and rank and prints the verdict of the single-component
displaceability constraints for each minimal Maslov number N.
"""

import argparse

from floerss import obstruct as ob


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=3)
    ap.add_argument("--max-rank", type=int, default=6)
    ap.add_argument("--max-N", type=int, default=5)
    args = ap.parse_args()

    print(f"{'betti':>16} | {'N':>2} | verdict")
    print("-" * 48)
    for dim in range(0, args.max_dim + 1):
        for betti in ob._closed_manifold_profiles(dim, args.max_rank):
            for N in range(2, args.max_N + 1):
                v = ob.displaceable_constraints(list(betti), N)
                tag = {"MustIntersect": "must intersect",
                       "ConsistentWithVanishing": "may vanish",
                       "Inconclusive": "inconclusive"}[v.kind]
                print(f"{str(list(betti)):>16} | {N:>2} | {tag}")


if __name__ == "__main__":
    main()
