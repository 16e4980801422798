"""Geometric vs forward solutions of dy = y dx on a pure-jump driver.

The geometric solution multiplies by exp(h) at each jump of size h, the
forward one by (1 + h). Prints both against their closed forms.
"""

import argparse

import numpy as np

from levyrough.fields import linear_field
from levyrough.paths import Jump, SamplePath
from levyrough.solver import solve_forward, solve_geometric


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jumps", type=float, nargs="+", default=[0.4, -0.3, 0.25, -0.5])
    ap.add_argument("--initial", type=float, default=1.0)
    args = ap.parse_args()

    h = np.asarray(args.jumps)
    n = 2 * h.size + 1
    idx = np.arange(1, n, 2)
    x = np.zeros(n)
    for i, hh in zip(idx, h):
        x[i:] += hh
    driver = SamplePath(np.linspace(0, 1, n), x, tuple(Jump(int(i), x[i] - hh, x[i]) for i, hh in zip(idx, h)))
    f = linear_field(1.0, radius=1e3)
    a = args.initial
    geo = solve_geometric(f, driver, [a], 1.5).path.values[-1, 0]
    fwd = solve_forward(f, driver, [a], 1.5).path.values[-1, 0]
    print(f"jumps {h.tolist()}")
    print(f"geometric {geo:.15g}   a*prod(exp(h)) {a * np.exp(h.sum()):.15g}")
    print(f"forward   {fwd:.15g}   a*prod(1+h)    {a * np.prod(1 + h):.15g}")


if __name__ == "__main__":
    main()
