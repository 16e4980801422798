"""Variance of the dyadic Lévy area of planar Brownian motion on [0, 1].

Usage: python scripts/brownian_area_variance.py --seeds 2000 --levels 12
"""

import argparse

import numpy as np

from levyrough.area import area_dyadic
from levyrough.levy import LevyModel, sample_path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=2000)
    ap.add_argument("--levels", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = LevyModel.brownian(2)
    n = 2**args.levels
    A = np.array([area_dyadic(sample_path(model, 1.0, n + 1, 1.0, (args.seed, k)), 0.0, 1.0, args.levels).matrix[0, 1]
                  for k in range(args.seeds)])
    var = A.var(ddof=1)
    c = A - A.mean()
    se = np.sqrt(max(np.mean(c**4) - var**2, 0.0) / args.seeds)
    exact = 0.25 * (1 - 1 / n)  # variance of the 2^n-chord polygon area
    print(f"seeds={args.seeds} levels={args.levels}")
    print(f"Var(A) = {var:.5f} +- {se:.5f}   limit 0.25   finite-level value {exact:.5f}")
    print(f"z vs limit = {(var - 0.25) / se:+.2f}")


if __name__ == "__main__":
    main()
