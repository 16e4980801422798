"""Dyadic Lévy area, its moments, Chen composition and dyadic covers.

Areas of sampled paths are taken along the polygon through the left
limits ``X(u-)`` at the chosen points, so a jump is absorbed into the
chord that follows it. ``a ^ b = a b^T - b a^T``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .levy import LevyMeasureSpec, LevyModel, rng_stream, sample_path
from .paths import SamplePath
from .pvar import powp

__all__ = [
    "AreaMatrix",
    "DyadicCover",
    "area_by_levels",
    "area_c0",
    "area_dyadic",
    "area_moment_check",
    "area_norm",
    "area_pvar_bound",
    "area_pvar_constants",
    "chen_compose",
    "dyadic_cover",
    "polygon_area",
    "PolygonAreas",
    "series_constant",
    "step_areas",
    "wedge",
]


def wedge(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.einsum("...i,...j->...ij", a, b) - np.einsum("...i,...j->...ij", b, a)


def area_norm(A) -> np.ndarray:
    """``sqrt(sum_{i<j} A_ij^2)``; satisfies ``|a ^ b| / 2 <= |a| |b| / 2``."""
    A = np.asarray(A, dtype=float)
    return np.sqrt(0.5 * np.sum(A**2, axis=(-2, -1)))


@dataclass(frozen=True, eq=False)
class AreaMatrix:
    interval: tuple[float, float]
    matrix: np.ndarray
    levels_used: int = 0

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("area must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
        if np.max(np.abs(M + M.T), initial=0.0) > 1e-12 * scale:
            raise ValueError("area matrix is not antisymmetric")
        object.__setattr__(self, "matrix", M)


def polygon_area(points) -> np.ndarray:
    """``1/2 sum_k (X_k - X_0) ^ (X_{k+1} - X_k)`` along a point sequence."""
    Z = np.asarray(points, dtype=float)
    Z = Z - Z[0]
    M = 0.5 * np.einsum("ki,kj->ij", Z[:-1], Z[1:])
    return M - M.T


class PolygonAreas:
    """O(1) polygon areas between any two indices of a fixed point sequence."""

    def __init__(self, points):
        self.X = np.asarray(points, dtype=float)
        # centre first to limit cancellation in the prefix sums
        self.X = self.X - self.X[0]
        self.P = np.zeros((self.X.shape[0],) + (self.X.shape[1],) * 2)
        np.cumsum(wedge(self.X[:-1], self.X[1:]), axis=0, out=self.P[1:])

    def __call__(self, i, j) -> np.ndarray:
        i = np.asarray(i)
        j = np.asarray(j)
        return 0.5 * (self.P[j] - self.P[i] - wedge(self.X[i], self.X[j]))


def _grid_index(times: np.ndarray, u: np.ndarray) -> np.ndarray:
    T = times[-1]
    idx = np.clip(np.searchsorted(times, u - 1e-12 * T), 0, times.size - 1)
    if np.any(np.abs(times[idx] - u) > 1e-12 * T):
        raise ValueError("insufficient resolution: dyadic points are not on the path grid")
    return idx


def _dyadic_points(path: SamplePath, s: float, t: float, levels: int) -> np.ndarray:
    if not s < t:
        raise ValueError("need s < t")
    if levels < 0:
        raise ValueError("levels >= 0")
    u = s + (t - s) * np.arange(2**levels + 1) / 2**levels
    idx = _grid_index(path.times, u)
    if np.any(np.diff(idx) <= 0):
        raise ValueError("insufficient resolution: grid too coarse for this level")
    return path.left_values()[idx]


def area_dyadic(path: SamplePath, s: float, t: float, levels: int) -> AreaMatrix:
    """``A_{s,t}(n)``: the area of the dyadic polygon with ``2^n`` chords."""
    return AreaMatrix((s, t), polygon_area(_dyadic_points(path, s, t, levels)), levels)


def area_by_levels(path: SamplePath, s: float, t: float, levels: int) -> np.ndarray:
    """Per-level triangle sums; row ``m-1`` holds the level-``m`` term.

    The level-``m`` term is ``1/2 sum_{k odd} (X_k - X_{k-1}) ^ (X_{k+1} - X_k)``
    over the level-``m`` points; level 0 is the empty sum. The rows add up
    to :func:`area_dyadic`.
    """
    X = _dyadic_points(path, s, t, levels)
    out = np.zeros((levels, X.shape[1], X.shape[1]))
    for m in range(1, levels + 1):
        step = 2 ** (levels - m)
        P = X[::step]
        out[m - 1] = 0.5 * wedge(P[1:-1:2] - P[0:-2:2], P[2::2] - P[1:-1:2]).sum(axis=0)
    return out


def chen_compose(A_st: AreaMatrix, A_tu: AreaMatrix, X_st, X_tu) -> AreaMatrix:
    """``A_su = A_st + A_tu + [X_st, X_tu] / 2``."""
    s, t = A_st.interval
    t2, u = A_tu.interval
    if not np.isclose(t, t2, rtol=1e-12, atol=1e-15):
        raise ValueError(f"intervals do not abut: {A_st.interval} and {A_tu.interval}")
    M = A_st.matrix + A_tu.matrix + 0.5 * wedge(X_st, X_tu)
    return AreaMatrix((s, u), M, max(A_st.levels_used, A_tu.levels_used))


# ----------------------------------------------------------- dyadic covers

@dataclass(frozen=True)
class DyadicCover:
    interval: tuple[float, float]
    pieces: tuple[tuple[int, int], ...]  # (level, index): [index, index+1] * T / 2^level
    horizon: float

    def bounds(self) -> np.ndarray:
        return np.array([[k * self.horizon / 2**n, (k + 1) * self.horizon / 2**n] for n, k in self.pieces])

    def per_level(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for n, _ in self.pieces:
            out[n] = out.get(n, 0) + 1
        return out


def _cover_units(a: int, b: int, L: int, min_level: int) -> list[tuple[int, int]]:
    pieces = []
    top = L - min_level
    while a < b:
        j = top
        while j > 0 and (a % (1 << j) or a + (1 << j) > b):
            j -= 1
        pieces.append((L - j, a >> j))
        a += 1 << j
    return pieces


def dyadic_cover(u: float, v: float, T: float, max_level: int, min_level: int = 0) -> DyadicCover:
    """Greedy decomposition of ``[u, v]`` into maximal dyadic intervals.

    Endpoints are rounded to the ``T / 2^max_level`` grid. At most two
    pieces share a level.
    """
    if not u < v:
        raise ValueError("need u < v")
    if u < 0 or v > T * (1 + 1e-12):
        raise ValueError("interval must lie in [0, T]")
    L = int(max_level)
    a, b = round(u / T * 2**L), round(v / T * 2**L)
    if a >= b:
        raise ValueError("interval shorter than the grid resolution")
    return DyadicCover((u, v), tuple(_cover_units(a, b, L, min_level)), T)


# ---------------------------------------------------------------- moments

def series_constant(levels: int | None = None) -> float:
    """``sum_{m>=1} sum_{k odd <= 2^m} 2^{-2m+1}`` (``levels`` terms, or the limit 1)."""
    if levels is None:
        return 1.0
    m = np.arange(1, levels + 1)
    return float(np.sum(2.0 ** (m - 1) * 2.0 ** (-2 * m + 1)))


def area_c0(spec, rtol: float = 1e-10) -> float:
    """``C_0 = Q11 Q22 - Q12^2`` for the second moments ``Q`` on ``|x| <= 1``.

    ``spec`` may be a :class:`LevyMeasureSpec` or a :class:`LevyModel`; for
    a model the Gaussian covariance is added to ``Q``.
    """
    if isinstance(spec, LevyModel):
        Q = spec.gaussian_cov + spec.levy_measure.second_moments(rtol)
    elif isinstance(spec, LevyMeasureSpec):
        Q = spec.second_moments(rtol)
    else:
        raise TypeError("area_c0 takes a LevyMeasureSpec or a LevyModel")
    if Q.shape[0] < 2:
        raise ValueError("area needs dimension >= 2")
    if not np.all(np.isfinite(Q)):
        raise ValueError("second moment of the measure diverges")
    return float(max(0.0, Q[0, 0] * Q[1, 1] - Q[0, 1] ** 2))


def area_moment_check(model: LevyModel, s: float, t: float, trials: int, seed: int, *,
                      levels: int = 10, eps: float = 1e-3) -> dict:
    """Monte Carlo ``E[(A^12_{s,t})^2]`` against ``C(nu) (t-s)^2``.

    ``C(nu) = C_0 * series_constant() = C_0``. The exact value of the
    dyadic approximation, ``C_0 (t-s)^2 (1 - 2^-n) / 4``, is reported too.
    """
    if not model.is_centred_small_jump_form:
        raise ValueError("moment check needs a model with no drift and no jumps above 1")
    if model.dimension < 2:
        raise ValueError("area needs dimension >= 2")
    if not 0 <= s < t:
        raise ValueError("need 0 <= s < t")
    if trials < 2:
        raise ValueError("need at least two trials")
    n = 2**levels
    h = (t - s) / n
    grid = int(round(t / h)) + 1
    A = np.empty(trials)
    for k in range(trials):
        path = sample_path(model, h * (grid - 1), grid, eps, (seed, k))
        A[k] = area_dyadic(path, s, t, levels).matrix[0, 1]
    c0 = area_c0(model)
    C = c0 * series_constant()
    sq = A**2
    mean, se = float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(trials))
    bound = C * (t - s) ** 2
    oracle = c0 * (t - s) ** 2 * (1 - 2.0**-levels) / 4
    return {
        "s": s, "t": t, "trials": trials, "levels": levels,
        "mean": mean, "se": se, "C0": c0, "C": C, "bound": bound,
        "pass": bool(mean <= bound + 3 * se),
        "oracle": oracle, "oracle_z": (mean - oracle) / se if se > 0 else 0.0,
        "mean_area": float(A.mean()), "se_area": float(A.std(ddof=1) / np.sqrt(trials)),
        "variance": float(A.var(ddof=1)),
    }


# ------------------------------------------------- (p/2)-variation of area

def area_pvar_constants(p: float, gamma: float) -> tuple[float, float]:
    """Constants ``(C1, C2)`` of the dyadic (p/2)-variation bound.

    With ``r = p/2`` and a cover of at most two dyadics per level,
    ``|A_uv|^r <= 2^{r-1} (|sum A_D|^r + |sum_{i<j} [X_Di, X_Dj] / 2|^r)``;
    Hölder against the weights ``n^gamma`` gives
    ``C1 = 2^{r-1} 2^{r-1} zeta(gamma / (r-1))^{r-1}`` and
    ``C2 = 2^{r-1} 2^{-r} 2^{p-1} zeta(gamma / (p-1))^{p-1}``.
    """
    if not p > 2:
        raise ValueError("need p > 2")
    if not gamma > p - 1:
        raise ValueError("need gamma > p - 1 for the Hölder weights")
    r = p / 2
    c1 = 2 ** (r - 1) * 2 ** (r - 1) * zeta(gamma / (r - 1)) ** (r - 1)
    c2 = 2 ** (r - 1) * 2**-r * 2 ** (p - 1) * zeta(gamma / (p - 1)) ** (p - 1)
    return float(c1), float(c2)


def _pair_value(areas: PolygonAreas, r: float):
    # scalar |A_ij|^r from plain floats; numpy call overhead dominates otherwise
    d = areas.X.shape[1]
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    X = [areas.X[:, a].tolist() for a in range(d)]
    P = [areas.P[:, a, b].tolist() for a, b in pairs]

    def val(i, j):
        tot = 0.0
        for (a, b), Pab in zip(pairs, P):
            m = 0.5 * (Pab[j] - Pab[i] - (X[a][i] * X[b][j] - X[b][i] * X[a][j]))
            tot += m * m
        return tot ** (0.5 * r)

    return val


def _anneal(areas: PolygonAreas, r: float, rng, proposals: int, start) -> float:
    N = areas.X.shape[0] - 1
    val = _pair_value(areas, r)
    cuts = sorted(set(start) | {0, N})
    total = sum(val(a, b) for a, b in zip(cuts[:-1], cuts[1:]))
    best = total
    temp0 = max(total, 1e-12) * 0.05
    moves = rng.integers(3, size=proposals).tolist()
    us = rng.random(proposals).tolist()
    picks = rng.random(proposals).tolist()
    targets = rng.random(proposals).tolist()
    for it in range(proposals):
        temp = temp0 * (1 - it / proposals) + 1e-15
        move, u, pick = moves[it], us[it], picks[it]
        if move == 0 or len(cuts) == 2:  # insert a cut
            c = 1 + int(pick * (N - 1))
            k = bisect.bisect_left(cuts, c)
            if cuts[k] == c:
                continue
            a, b = cuts[k - 1], cuts[k]
            delta = val(a, c) + val(c, b) - val(a, b)
            if delta >= 0 or u < math.exp(delta / temp):
                cuts.insert(k, c)
                total += delta
        elif move == 1:  # remove a cut
            k = 1 + int(pick * (len(cuts) - 2))
            a, c, b = cuts[k - 1], cuts[k], cuts[k + 1]
            delta = val(a, b) - val(a, c) - val(c, b)
            if delta >= 0 or u < math.exp(delta / temp):
                del cuts[k]
                total += delta
        else:  # move a cut between its neighbours
            k = 1 + int(pick * (len(cuts) - 2))
            a, c, b = cuts[k - 1], cuts[k], cuts[k + 1]
            if b - a < 3:
                continue
            c2 = a + 1 + int(targets[it] * (b - a - 1))
            if c2 == c:
                continue
            delta = val(a, c2) + val(c2, b) - val(a, c) - val(c, b)
            if delta >= 0 or u < math.exp(delta / temp):
                cuts[k] = c2
                total += delta
        best = max(best, total)
    return best


def area_pvar_bound(path: SamplePath, p: float, gamma: float, max_level: int = 14, *,
                    seed: int = 0, proposals: int = 10_000) -> dict:
    """Dyadic upper bound on ``sup_pi sum |A|^{p/2}`` and a search-based lower estimate.

    The path is read on the ``2^max_level`` dyadic grid of ``[0, T]`` by
    piecewise-linear interpolation (left limits at jump times). The bound is
    ``C1 sum_n n^gamma sum_k |A_{l,r}|^{p/2} + C2 sum_n n^gamma sum_k |X_r - X_l|^p``
    over levels ``n = 1..max_level``. The lower estimate is the best sum found
    by simulated annealing over partitions of the same grid.
    """
    c1, c2 = area_pvar_constants(p, gamma)
    L = int(max_level)
    T = path.horizon
    u = T * np.arange(2**L + 1) / 2**L
    X = path.value_at(u)
    areas = PolygonAreas(X)
    r = p / 2
    n = np.arange(1, L + 1)
    sa, sx = np.zeros(L), np.zeros(L)
    for lvl in n:
        idx = np.arange(0, 2**L + 1, 2 ** (L - lvl))
        sa[lvl - 1] = float(np.sum(powp(area_norm(areas(idx[:-1], idx[1:])), r)))
        sx[lvl - 1] = float(np.sum(powp(np.linalg.norm(np.diff(X[idx], axis=0), axis=1), p)))
    w = n.astype(float) ** gamma
    area_term, incr_term = c1 * float(w @ sa), c2 * float(w @ sx)
    rng = rng_stream(seed, 0xA7EA)
    # start from the best uniform dyadic partition
    best_level = int(np.argmax(sa)) + 1
    start = list(range(0, 2**L + 1, 2 ** (L - best_level)))
    lower = max(float(sa.max()), _anneal(areas, r, rng, proposals, start))
    bound = area_term + incr_term
    return {
        "p": p, "gamma": gamma, "max_level": L, "C1": c1, "C2": c2,
        "area_sums": sa.tolist(), "increment_sums": sx.tolist(),
        "area_term": area_term, "increment_term": incr_term,
        "bound": bound, "lower": lower, "pass": bool(lower <= bound),
    }


# ------------------------------------------------------------ enhancement

def step_areas(path: SamplePath, stride: int):
    """Coarsen a path and attach the exact polygon area of every coarse step.

    Coarse nodes are every ``stride``-th index plus all jump indices and the
    last index. Each coarse step's area runs along the fine points from the
    right value at its start to the left limit at its end. Returns
    ``(coarse_path, areas)`` with ``areas`` of shape (M-1, d, d).
    """
    if stride < 1:
        raise ValueError("stride >= 1")
    N = len(path)
    nodes = np.unique(np.concatenate([np.arange(0, N, stride), [N - 1], list(path.jump_map())]).astype(int))
    _, pts, right = path.skeleton()
    pa = PolygonAreas(pts)
    jm = path.jump_map()
    ends = np.array([right[c] - 1 if c in jm else right[c] for c in nodes[1:]])
    areas = pa(right[nodes[:-1]], ends)
    coarse = SamplePath(path.times[nodes], path.values[nodes],
                        tuple(type(j)(int(np.searchsorted(nodes, j.index)), j.left, j.right) for j in path.jumps))
    return coarse, areas
