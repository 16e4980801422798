"""Degree-2 multiplicative functionals and rough integration for ``2 <= p < 3``.

A functional on a grid is stored by its step increments ``(dX_k, S_k)``;
every pair ``(i, j)`` is then obtained by Chen's relation through prefix
sums, so stored functionals are multiplicative by construction. Explicit
pair tables (which need not be) can be attached for checking.
"""

from __future__ import annotations

import json
import math
from math import gamma as gamma_fn
from pathlib import Path

import numpy as np

from ._io import write_json
from .fields import VectorField
from .paths import SamplePath, read_csv, write_csv
from .pvar import ControlFunction, pvar_control
from .solver import Solution, _check_areas, _scheme_for, _solve_extended

__all__ = [
    "MultiplicativeFunctional2",
    "check_pvar_bound",
    "default_beta",
    "enhance",
    "read_enhanced",
    "rough_integral_deg2",
    "signature2_linear",
    "solve_geometric_rough",
    "write_enhanced",
]

CHEN_TOL = 1e-10


class MultiplicativeFunctional2:
    """``(1, X^1, X^2)`` on a grid, built from step increments.

    ``level2(i, j) = sum_{i<=k<j} S_k + (X_k - X_i) (x) dX_k``.
    """

    def __init__(self, times, values, steps2, p: float = 2.5, control: ControlFunction | None = None, table=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        self.steps2 = np.asarray(steps2, dtype=float)
        N, d = self.values.shape
        if self.times.shape != (N,) or self.steps2.shape != (N - 1, d, d):
            raise ValueError("need N times, N values and N-1 level-2 steps")
        self.p = float(p)
        self.control = control
        self.table = table  # optional (level1[N,N,d], level2[N,N,d,d])
        dX = np.diff(self.values, axis=0)
        self._Q = np.zeros((N, d, d))
        np.cumsum(self.steps2 + np.einsum("ki,kj->kij", self.values[:-1], dX), axis=0, out=self._Q[1:])

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.times.shape[0]

    def level1(self, i, j) -> np.ndarray:
        if self.table is not None:
            return self.table[0][i, j]
        return self.values[j] - self.values[i]

    def level2(self, i, j) -> np.ndarray:
        if self.table is not None:
            return self.table[1][i, j]
        i = np.asarray(i)
        j = np.asarray(j)
        Xi = self.values[i]
        return self._Q[j] - self._Q[i] - np.einsum("...a,...b->...ab", Xi, self.values[j] - Xi)

    def area(self, i, j) -> np.ndarray:
        L = self.level2(i, j)
        return 0.5 * (L - np.swapaxes(L, -1, -2))

    def chen_residual(self, i: int, j: int, k: int) -> float:
        """``|X_ik - X_ij (x) X_jk|`` over levels 1 and 2."""
        a1, b1 = self.level1(i, j), self.level1(j, k)
        r1 = self.level1(i, k) - a1 - b1
        r2 = self.level2(i, k) - self.level2(i, j) - self.level2(j, k) - np.outer(a1, b1)
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))

    def max_chen_residual(self, rng=None, samples: int = 2000) -> float:
        N = len(self)
        if N < 3:
            return 0.0
        if N <= 40:
            triples = [(i, j, k) for i in range(N) for j in range(i + 1, N) for k in range(j + 1, N)]
        else:
            rng = np.random.default_rng(0) if rng is None else rng
            triples = [tuple(sorted(rng.choice(N, 3, replace=False))) for _ in range(samples)]
        return max(self.chen_residual(*t) for t in triples)

    def sub(self, i0: int, i1: int) -> "MultiplicativeFunctional2":
        return MultiplicativeFunctional2(self.times[i0 : i1 + 1], self.values[i0 : i1 + 1], self.steps2[i0:i1], self.p)

    def coarsen(self, nodes) -> "MultiplicativeFunctional2":
        nodes = np.asarray(nodes)
        S = self.level2(nodes[:-1], nodes[1:])
        return MultiplicativeFunctional2(self.times[nodes], self.values[nodes], S, self.p)

    def scaled(self, phi: float) -> "MultiplicativeFunctional2":
        """Dilation: level 1 by ``phi``, level 2 by ``phi^2``."""
        return MultiplicativeFunctional2(self.times, phi * self.values, phi**2 * self.steps2, self.p)

    def with_control(self, control: ControlFunction) -> "MultiplicativeFunctional2":
        out = MultiplicativeFunctional2(self.times, self.values, self.steps2, self.p, control, self.table)
        return out


def signature2_linear(path: SamplePath, p: float = 2.5) -> MultiplicativeFunctional2:
    """Exact level-2 signature of a piecewise-linear path: ``S_k = dX dX^T / 2``."""
    if not path.is_continuous:
        raise ValueError("classical signatures need a continuous path (jumps registered)")
    dX = np.diff(path.values, axis=0)
    return MultiplicativeFunctional2(path.times, path.values, 0.5 * np.einsum("ki,kj->kij", dX, dX), p)


def enhance(path: SamplePath, areas, p: float = 2.5) -> MultiplicativeFunctional2:
    """Geometric functional: symmetric part ``dX dX^T / 2`` plus the given step areas."""
    if not path.is_continuous:
        raise ValueError("enhance a continuous path; parametrise jump paths first")
    areas = _check_areas(areas, path)
    dX = np.diff(path.values, axis=0)
    return MultiplicativeFunctional2(path.times, path.values, 0.5 * np.einsum("ki,kj->kij", dX, dX) + areas, p)


def check_pvar_bound(mf: MultiplicativeFunctional2, beta: float | None = None, control: ControlFunction | None = None) -> dict:
    """Smallest ``beta`` with ``|X^i_st| <= beta omega(s,t)^{i/p} / (i/p)!`` for ``i = 1, 2``.

    ``beta_min`` is that infimum (0 for a constant path, ``inf`` when some
    pair has ``omega = 0`` but a nonzero increment). ``beta_inverse`` is
    ``1 / beta_min``, the largest ``beta`` for the form with ``beta`` in the
    denominator.
    """
    ctrl = control or mf.control or pvar_control(mf.values, mf.p)
    N, p = len(mf), mf.p
    W = ctrl.matrix()[:N, :N]
    iu, ju = np.triu_indices(N, 1)
    w = W[iu, ju]
    x1 = np.linalg.norm(mf.level1(iu, ju), axis=-1) if mf.table is None else np.array(
        [np.linalg.norm(mf.level1(i, j)) for i, j in zip(iu, ju)])
    x2 = np.linalg.norm(mf.level2(iu, ju), axis=(-2, -1)) if mf.table is None else np.array(
        [np.linalg.norm(mf.level2(i, j)) for i, j in zip(iu, ju)])
    out = {}
    worst = 0.0
    for lvl, x in ((1, x1), (2, x2)):
        fact = gamma_fn(lvl / p + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(x > 0, x * fact / w ** (lvl / p), 0.0)
        b = float(np.max(ratio, initial=0.0))
        out[f"beta_level{lvl}"] = b
        worst = max(worst, b)
    out["beta_min"] = worst
    out["beta_inverse"] = np.inf if worst == 0 else 1.0 / worst
    if beta is not None:
        out["beta"] = beta
        out["holds"] = bool(beta >= worst)
    return out


def default_beta(mf: MultiplicativeFunctional2, max_points: int = 257) -> dict:
    """Run default ``beta = 2 beta_min``; skipped above ``max_points`` (the control is O(N^3))."""
    if len(mf) > max_points:
        return {"beta": None, "reason": f"{len(mf)} points exceed {max_points}"}
    r = check_pvar_bound(mf)
    return {"beta": 2.0 * r["beta_min"], "beta_min": r["beta_min"]}


def _dyadic_pieces(M: int):
    """``(level, index, i, j)`` over grid indices ``0..M``; the finest level holds single steps."""
    L = max(0, math.ceil(math.log2(M)))
    for n in range(L + 1):
        w = 2 ** (L - n)
        for k in range(-(-M // w)):
            yield n, k, k * w, min((k + 1) * w, M)


def write_enhanced(mf: MultiplicativeFunctional2, csv_path) -> Path:
    """Write the path as CSV and level-2 matrices of dyadic index pieces as a JSON sidecar.

    Sidecar keys are ``"level,index"``; piece ``(n, k)`` spans grid indices
    ``[k 2^(L-n), (k+1) 2^(L-n)]`` clipped to the grid, ``L = ceil(log2(N-1))``.
    """
    csv_path = Path(csv_path)
    write_csv(SamplePath(mf.times, mf.values), csv_path)
    M = len(mf) - 1
    L = max(0, math.ceil(math.log2(M)))
    # single steps are stored exactly so that reading back is lossless
    entries = {f"{n},{k}": mf.steps2[i] if n == L else mf.level2(i, j) for n, k, i, j in _dyadic_pieces(M)}
    side = csv_path.with_suffix(".level2.json")
    write_json(side, {"p": mf.p, "steps": M, "top_level": L, "level2": entries})
    return side


def read_enhanced(csv_path) -> MultiplicativeFunctional2:
    csv_path = Path(csv_path)
    path = read_csv(csv_path)
    side = json.loads(csv_path.with_suffix(".level2.json").read_text())
    M, L = side["steps"], side["top_level"]
    if M != len(path) - 1:
        raise ValueError("sidecar does not match the path")
    steps = np.array([side["level2"][f"{L},{k}"] for k in range(M)], dtype=float).reshape(M, path.dim, path.dim)
    return MultiplicativeFunctional2(path.times, path.values, steps, side["p"])


def rough_integral_deg2(theta: VectorField, X: MultiplicativeFunctional2, s: int = 0, t: int | None = None, *,
                        atol: float = 1e-9, rtol: float = 1e-7, max_levels: int = 16,
                        check_chen: bool = True) -> MultiplicativeFunctional2:
    """``int theta(X) dX`` as a degree-2 functional over grid indices ``s..t``.

    On each step ``[u, v]`` the local increment is
    ``theta(X_u) X^1_uv + D theta(X_u) X^2_uv`` (level 1) and
    ``theta X^2_uv theta^T`` (level 2). The sums are evaluated on dyadic
    coarsenings of the grid; the diagnostics are attached as ``.refinement``.
    """
    t = len(X) - 1 if t is None else t
    if not 0 <= s < t < len(X):
        raise ValueError("need 0 <= s < t < len(X)")
    if theta.state_dim != X.dim or theta.d != X.dim:
        raise ValueError(f"one-form must be a map R^{X.dim} -> L(R^{X.dim}, R^e)")
    if check_chen:
        res = X.sub(s, t).max_chen_residual() if X.table is None else max(
            X.chen_residual(i, j, k) for i in range(s, t + 1) for j in range(i + 1, t + 1) for k in range(j + 1, t + 1))
        if res > CHEN_TOL:
            raise ValueError(f"not multiplicative: Chen residual {res:.3g}")

    def local(nodes):
        a, b = nodes[:-1], nodes[1:]
        x = X.values[a]
        L1 = np.stack([X.level1(i, j) for i, j in zip(a, b)]) if X.table is not None else X.level1(a, b)
        L2 = np.stack([X.level2(i, j) for i, j in zip(a, b)]) if X.table is not None else X.level2(a, b)
        th = theta.eval_batch(x)  # (m, e, d)
        dth = theta.jacobian_batch(x)  # (m, e, d, d): d th_ej / d x_m
        z1 = np.einsum("kej,kj->ke", th, L1) + np.einsum("kejm,kmj->ke", dth, L2)
        z2 = np.einsum("kel,klj,kfj->kef", th, L2, th)
        return z1, z2

    fine = np.arange(s, t + 1)
    levels = []
    stride = 1
    while True:
        nodes = np.unique(np.concatenate([fine[::stride], [t]]))
        z1, _ = local(nodes)
        levels.append((stride, z1.sum(axis=0)))
        if nodes.size <= 2 or len(levels) >= max_levels:
            break
        stride *= 2
    levels.reverse()  # coarse to fine
    diffs = [float(np.max(np.abs(levels[k + 1][1] - levels[k][1]))) for k in range(len(levels) - 1)]
    final = levels[-1][1]
    stable = bool(diffs and (diffs[-1] < atol or diffs[-1] < rtol * max(1e-300, float(np.max(np.abs(final))))))
    # refinement that keeps getting worse at the finest levels is a divergent sum
    if len(diffs) >= 4 and not stable and diffs[-1] > diffs[-2] > diffs[-3] > diffs[-4] and diffs[-1] > 1e6 * max(diffs[0], 1e-300):
        raise ValueError("divergent rough sum")
    z1, z2 = local(fine)
    values = np.zeros((fine.size, z1.shape[1]))
    np.cumsum(z1, axis=0, out=values[1:])
    out = MultiplicativeFunctional2(X.times[s : t + 1], values, z2, X.p)
    out.refinement = {"levels": [(st, v.tolist()) for st, v in levels], "differences": diffs, "stable": stable}
    return out


def solve_geometric_rough(field: VectorField, driver: SamplePath, a, p: float, delta: float = 1.0, *,
                          areas=None, zero_area: bool = False, tol: float = 1e-10, max_iter: int = 50,
                          driver_ref: dict | None = None) -> Solution:
    """Geometric solution for ``2 <= p < 3`` on an area-enhanced driver.

    ``areas[k]`` is the antisymmetric area of driver step ``k`` (see
    :func:`levyrough.area.step_areas`). The driver is parametrised, each
    continuous run is solved by Picard iteration with the local rough
    integral ``f(Y) dX + (Df f)(Y) S`` where ``S = dX dX^T / 2 + A``, and
    fictitious segments follow the ODE flow.
    """
    if not 2 <= p < 3:
        raise ValueError("rough solver handles 2 <= p < 3")
    if zero_area:
        areas = np.zeros((len(driver) - 1, driver.dim, driver.dim))
    elif areas is None:
        raise ValueError("rough solver needs step areas (or zero_area=True)")
    areas = _check_areas(areas, driver)
    scheme = _scheme_for(p, field)
    sol = _solve_extended(field, driver, a, p, delta, areas, scheme, tol, max_iter, driver_ref)
    sol.provenance["zero_area"] = bool(zero_area)
    return sol
