"""(p/2)-variation bound of Brownian area: tail of the bound across max_level."""

import argparse

from levyrough.area import area_pvar_bound
from levyrough.levy import LevyModel, sample_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=2.5)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--skeleton-level", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    path = sample_path(LevyModel.brownian(2), 1.0, 2**args.skeleton_level + 1, 1.0, args.seed)
    prev = None
    for L in range(8, 15):
        r = area_pvar_bound(path, args.p, args.gamma, L, seed=args.seed, proposals=2000)
        change = "" if prev is None else f"  change {abs(r['bound'] - prev) / r['bound']:.3%}"
        print(f"max_level={L:2d}  bound={r['bound']:.5g}  lower={r['lower']:.5g}{change}")
        prev = r["bound"]


if __name__ == "__main__":
    main()
