"""Blumenthal-Getoor index of the banded eta measure and its partial integrals."""

import argparse

import numpy as np

from levyrough.levy import bg_index, eta_measure, eta_partial_sums


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=100_000)
    args = ap.parse_args()

    spec = eta_measure(args.m_max)
    print(f"bg_index = {bg_index(spec):.4f}")
    checkpoints = [m for m in (10, 100, 1_000, 10_000, 100_000) if m <= args.m_max]
    for alpha in (2.0, 1.9):
        s = eta_partial_sums(args.m_max, alpha)
        row = "  ".join(f"m={m}: {s[m - 1]:.4g}" for m in checkpoints)
        print(f"alpha={alpha}: {row}")
    print(f"alpha=2 cap pi^2/3 = {np.pi**2 / 3:.4g}")


if __name__ == "__main__":
    main()
