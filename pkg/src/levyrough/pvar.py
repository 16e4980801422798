"""Strong p-variation of discrete paths and the controls built from it.

For a sampled path we take the supremum over partitions of its own point
set (left limits included at jump times). The dynamic program
``M[j] = max_i M[i] + |x_j - x_i|^p`` ranges over every partition of that
point set, so it attains the supremum exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .paths import SamplePath

__all__ = [
    "BRUTE_MAX_POINTS",
    "ControlFunction",
    "PVarResult",
    "partition_sum",
    "powp",
    "pvar_brute",
    "pvar_control",
    "pvar_exact",
]

BRUTE_MAX_POINTS = 14


def powp(x, p: float):
    """``x**p`` for ``x >= 0`` as ``exp(p log x)``, exact zero at ``x == 0``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(p * np.log(x[pos]))
    return out


@dataclass(frozen=True)
class PVarResult:
    value: float
    witness_partition: tuple[int, ...]
    p: float

    @property
    def p_sum(self) -> float:
        return self.value**self.p


def _points(path) -> np.ndarray:
    if isinstance(path, SamplePath):
        return path.skeleton()[1]
    pts = np.asarray(path, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def _check_p(p: float) -> None:
    if not p >= 1:
        raise ValueError(f"p-variation needs p >= 1, got {p}")


def partition_sum(points, partition, p: float) -> float:
    """Left-to-right sum of ``|x_k - x_{k-1}|^p`` over the given indices."""
    pts = _points(points)
    idx = np.asarray(partition)
    inc = powp(np.linalg.norm(np.diff(pts[idx], axis=0), axis=1), p)
    total = 0.0
    for v in inc:
        total += v
    return total


def _dp(pts: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    n = pts.shape[0]
    best = np.zeros(n)
    pred = np.full(n, -1)
    for j in range(1, n):
        cand = best[:j] + powp(np.linalg.norm(pts[:j] - pts[j], axis=1), p)
        i = int(np.argmax(cand))  # first maximiser: smaller predecessor wins ties
        best[j] = cand[i]
        pred[j] = i
    return best, pred


def _backtrack(pred: np.ndarray, end: int) -> tuple[int, ...]:
    out = [end]
    while pred[out[-1]] >= 0:
        out.append(int(pred[out[-1]]))
    return tuple(reversed(out))


def pvar_exact(path, p: float) -> PVarResult:
    """Exact discrete p-variation by dynamic programming, O(n^2)."""
    _check_p(p)
    pts = _points(path)
    if pts.shape[0] == 0:
        raise ValueError("empty path")
    if pts.shape[0] == 1:
        return PVarResult(0.0, (0,), p)
    best, pred = _dp(pts, p)
    n = pts.shape[0]
    return PVarResult(float(best[-1] ** (1.0 / p)), _backtrack(pred, n - 1), p)


@lru_cache(maxsize=None)
def _subset_edges(n: int):
    # every subset of interior points, as (subset id, i, j) edges in
    # left-to-right order within each subset
    sid, ii, jj = [], [], []
    for mask in range(1 << (n - 2)):
        prev = 0
        for k in range(1, n - 1):
            if mask >> (k - 1) & 1:
                sid.append(mask)
                ii.append(prev)
                jj.append(k)
                prev = k
        sid.append(mask)
        ii.append(prev)
        jj.append(n - 1)
    return np.asarray(sid), np.asarray(ii), np.asarray(jj)


def pvar_brute(path, p: float) -> PVarResult:
    """Oracle: enumerate every partition of a path with at most 14 points."""
    _check_p(p)
    pts = _points(path)
    n = pts.shape[0]
    if n > BRUTE_MAX_POINTS:
        raise ValueError(f"oracle scale exceeded: {n} points > {BRUTE_MAX_POINTS}")
    if n == 0:
        raise ValueError("empty path")
    if n == 1:
        return PVarResult(0.0, (0,), p)
    sid, ii, jj = _subset_edges(n)
    w = powp(np.linalg.norm(pts[jj] - pts[ii], axis=1), p)
    sums = np.bincount(sid, weights=w, minlength=1 << (n - 2))
    mask = int(np.argmax(sums))
    witness = (0,) + tuple(k for k in range(1, n - 1) if mask >> (k - 1) & 1) + (n - 1,)
    return PVarResult(float(sums[mask] ** (1.0 / p)), witness, p)


class ControlFunction:
    """Superadditive control ``omega(i, j)`` on a grid of indices.

    Built either lazily from a point sequence, where row ``i`` is the
    p-variation dynamic program started at ``i`` (raised to the p), or
    from an explicit matrix.
    """

    def __init__(self, times, points=None, p: float | None = None, matrix=None, scale: float = 1.0):
        self.times = np.asarray(times, dtype=float)
        self.p = p
        self.scale = float(scale)
        self._points = None if points is None else _points(points)
        self._rows: dict[int, np.ndarray] = {}
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        if self._matrix is None and (self._points is None or p is None):
            raise ValueError("need either points and p, or an explicit matrix")

    def __len__(self) -> int:
        return self.times.shape[0]

    def row(self, i: int) -> np.ndarray:
        """``omega(i, j)`` for all ``j`` (zero for ``j <= i``)."""
        if self._matrix is not None:
            return self.scale * self._matrix[i]
        r = self._rows.get(i)
        if r is None:
            r = np.zeros(len(self))
            best, _ = _dp(self._points[i:], self.p)
            r[i:] = best
            self._rows[i] = r
        return self.scale * r

    def __call__(self, i: int, j: int) -> float:
        if j < i:
            raise ValueError("omega(s, t) needs s <= t")
        return float(self.row(i)[j])

    def matrix(self) -> np.ndarray:
        return np.stack([self.row(i) for i in range(len(self))])

    def scaled(self, k: float) -> "ControlFunction":
        out = ControlFunction.__new__(ControlFunction)
        out.__dict__.update(self.__dict__)
        out.scale = self.scale * float(k)
        return out

    def _first_exceedance(self, s: int, threshold: float, max_steps: int) -> int:
        # grow the dynamic program from s until omega(s, u) > threshold
        n = len(self)
        if self._matrix is not None or s in self._rows:
            over = np.nonzero(self.row(s)[s + 1 : s + 1 + max_steps] > threshold)[0]
            return s + 1 + int(over[0]) if over.size else min(n, s + 1 + max_steps)
        pts = self._points
        best = [0.0]
        for u in range(s + 1, min(n, s + 1 + max_steps)):
            d = powp(np.linalg.norm(pts[s:u] - pts[u], axis=1), self.p)
            b = float(np.max(np.asarray(best) + d))
            if self.scale * b > threshold:
                return u
            best.append(b)
        return min(n, s + 1 + max_steps)

    def greedy_partition(self, threshold: float = 1.0, max_steps: int | None = None) -> list[int]:
        """Cut points ``t_j = inf{u > t_{j-1} : omega(t_{j-1}, u) > threshold}``.

        Every piece satisfies ``omega <= threshold`` unless it is a single
        step, which cannot be split further. ``max_steps`` caps the piece
        length (superadditivity keeps the bound on shorter pieces).
        """
        n = len(self)
        cap = n if max_steps is None else int(max_steps)
        cuts = [0]
        while cuts[-1] < n - 1:
            s = cuts[-1]
            u = self._first_exceedance(s, threshold, cap)
            # the piece ends just before the first exceeding point
            cuts.append(max(s + 1, u - 1))
        return cuts


def pvar_control(path, p: float) -> ControlFunction:
    """``omega(s, t) = ||x||_{p,[s,t]}^p`` on the path skeleton."""
    _check_p(p)
    if isinstance(path, SamplePath):
        times, pts, _ = path.skeleton()
    else:
        pts = _points(path)
        times = np.arange(pts.shape[0], dtype=float)
    return ControlFunction(times, pts, p)
