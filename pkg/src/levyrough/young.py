"""Young integration of discrete paths by left-point Riemann-Stieltjes sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .paths import SamplePath
from .pvar import pvar_exact

__all__ = ["YoungEstimate", "riemann_stieltjes", "young_constant", "young_integral"]


@dataclass(frozen=True, eq=False)
class YoungEstimate:
    value: np.ndarray | float
    mesh_levels: tuple[tuple[float, np.ndarray | float], ...]  # coarse to fine
    error_bound: float
    extrapolated: np.ndarray | float | None = None  # Richardson on dyadic levels; meaningful for C^1 data


def young_constant(p: float, q: float) -> float:
    """``2^theta zeta(theta)`` with ``theta = 1/p + 1/q``."""
    theta = 1.0 / p + 1.0 / q
    if theta <= 1:
        raise ValueError(f"Young condition violated: 1/p + 1/q = {theta:.6g} <= 1")
    return float(2.0**theta * zeta(theta))


def riemann_stieltjes(integrand, increments, rule: str = "left") -> np.ndarray:
    """Cumulative sums of ``integrand_k . increments_k``.

    ``integrand`` has shape (N, n, d) (or (N, d) for a scalar output) and
    ``increments`` shape (N-1, d). Returns the N running values starting at 0.
    """
    F = np.asarray(integrand, dtype=float)
    dX = np.asarray(increments, dtype=float)
    if rule == "left":
        G = F[:-1]
    elif rule == "trapezoid":
        G = 0.5 * (F[:-1] + F[1:])
    else:
        raise ValueError(f"unknown rule {rule!r}")
    steps = np.einsum("k...d,kd->k...", G, dX)
    out = np.zeros((F.shape[0],) + steps.shape[1:])
    np.cumsum(steps, axis=0, out=out[1:])
    return out


def _left_sum(fv: np.ndarray, gv: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return np.einsum("ka,kb->ab", fv[idx[:-1]], np.diff(gv[idx], axis=0))


def young_integral(f: SamplePath, g: SamplePath, p: float, q: float, interval=None) -> YoungEstimate:
    """``int f dg`` over the grid (or the index ``interval``) by left-point sums.

    The sums are evaluated on every dyadic coarsening of the grid, finest
    last; the finest one is the value. The bound is
    ``2^theta zeta(theta) ||f||_p ||g||_q``.
    """
    c = young_constant(p, q)
    if not np.array_equal(f.times, g.times):
        raise ValueError("f and g must share a grid")
    common = set(f.jump_map()) & set(g.jump_map())
    if common:
        t = sorted(float(f.times[i]) for i in common)
        raise ValueError(f"common discontinuities at times {t[:5]}")
    i0, i1 = (0, len(f) - 1) if interval is None else interval
    if not 0 <= i0 < i1 < len(f):
        raise ValueError("interval must satisfy 0 <= i0 < i1 < len(path)")
    if (i0, i1) != (0, len(f) - 1):
        f, g = f.restrict(i0, i1), g.restrict(i0, i1)
    fv, gv = f.values, g.values
    n = len(f) - 1
    levels = []
    stride = 1
    while True:
        idx = np.unique(np.concatenate([np.arange(0, n + 1, stride), [n]]))
        val = _left_sum(fv, gv, idx)
        levels.append((float(np.max(np.diff(f.times[idx]))), _squeeze(val)))
        if idx.size <= 2:
            break
        stride *= 2
    levels.reverse()
    bound = c * pvar_exact(f, p).value * pvar_exact(g, q).value
    return YoungEstimate(levels[-1][1], tuple(levels), bound, _richardson(levels, n))


def _richardson(levels, n: int, depth: int = 4):
    """Eliminate the ``h, h^2, ...`` terms of the left-sum error on exact dyadic levels."""
    k = 0
    while n % 2 ** (k + 1) == 0 and k + 1 < depth:
        k += 1
    if k == 0:
        return None
    col = [np.asarray(v, dtype=float) for _, v in levels[-(k + 1):]]  # strides 2^k .. 1
    for j in range(1, k + 1):
        col = [(2**j * col[i + 1] - col[i]) / (2**j - 1) for i in range(len(col) - 1)]
    return _squeeze(col[0])


def _squeeze(m: np.ndarray):
    if m.size == 1:
        return float(m.reshape(()))
    return m.squeeze()
