"""Geometric and forward solutions of ``dY = f(Y) dX`` for càdlàg drivers.

All solvers share one engine working on a node sequence with a kind per
step:

* continuous steps are grouped into runs and solved by Picard iteration,
  either with trapezoidal Young sums (``p < 2``) or with the second-order
  rough increments ``f dX + (Df f) S`` (``2 < p < 3``, ``S`` the step's
  level-2 increment);
* ``ode`` steps follow the flow of ``y' = f(y) dX`` (adaptive RK4);
* ``forward`` steps apply ``y <- y + f(y) dX``.

The geometric solver runs the engine on the parametrised driver, where
every fictitious segment is made of ``ode`` steps, then undoes the
parametrisation. The forward solver runs it on the driver's skeleton with
jump steps marked ``forward``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import VectorField
from .param import Parametrisation, deparametrise, parametrise
from .paths import Jump, SamplePath
from .pvar import ControlFunction

__all__ = [
    "NoContraction",
    "Solution",
    "cauchy_report",
    "composition_check",
    "corrective_sequence",
    "flow_map",
    "flow_rk4",
    "inverse_check",
    "jump_gap",
    "solve_forward",
    "solve_geometric",
]

CONT, ODE, FWD = 0, 1, 2
PIECE_CAP = 1024


class NoContraction(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Solution:
    path: SamplePath
    kind: str  # "geometric" | "forward"
    provenance: dict = dc_field(default_factory=dict)
    picard_iterations: int = 0
    residual: float = 0.0
    extended: SamplePath | None = None
    parametrisation: Parametrisation | None = None


# ---------------------------------------------------------------- ODE flow

def flow_rk4(field: VectorField, y0, v, tol: float = 1e-13, t_end: float = 1.0) -> np.ndarray:
    """Time-``t_end`` flow of ``y' = f(y) v``; RK4 with step doubling."""
    y = np.array(y0, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return y
    rhs = lambda z: field.eval(z) @ v  # noqa: E731

    def step(z, h):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h * k2)
        k4 = rhs(z + h * k3)
        return z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    t, h = 0.0, t_end / 4
    while t < t_end:
        h = min(h, t_end - t)
        full = step(y, h)
        half = step(step(y, h / 2), h / 2)
        err = np.max(np.abs(half - full)) / 15.0
        scale = tol * max(1.0, np.max(np.abs(y)))
        if err <= scale or h < 1e-12 * t_end:
            y = half + (half - full) / 15.0
            t += h
            h *= min(4.0, 0.9 * (scale / err) ** 0.2) if err > 0 else 4.0
        else:
            h *= max(0.1, 0.9 * (scale / err) ** 0.2)
    return y


def jump_gap(field: VectorField, a, dx):
    """``(geometric_jump, forward_jump, bound)`` at state ``a`` for jump ``dx``.

    The bound ``|f|_Lip^2 |dx|^2 / 2`` dominates the gap because
    ``y(1) - a - f(a) dx = int_0^1 (f(y(s)) - f(a)) dx ds``.
    """
    a = np.asarray(a, dtype=float)
    dx = np.asarray(dx, dtype=float)
    geo = flow_rk4(field, a, dx) - a
    fwd = field.eval(a) @ dx
    return geo, fwd, 0.5 * field.lip_norm**2 * float(dx @ dx)


# ------------------------------------------------------------------ engine

@dataclass
class _Stats:
    iterations: int = 0
    residual: float = 0.0


def _picard(field, X, S, y0, scheme, tol, max_iter, stats):
    dX = np.diff(X, axis=0)
    m = dX.shape[0]
    Y = np.broadcast_to(y0, (m + 1, y0.size)).copy()
    prev, stalls = np.inf, 0
    for it in range(1, max_iter + 1):
        F = field.eval_batch(Y)
        if scheme == "trapezoid":
            inc = np.einsum("kij,kj->ki", 0.5 * (F[:-1] + F[1:]), dX)
        else:
            inc = np.einsum("kij,kj->ki", F[:-1], dX)
            if S is not None:
                G = field.second_order(Y[:-1])
                inc += np.einsum("kilj,klj->ki", G, S)
        new = np.empty_like(Y)
        new[0] = y0
        np.cumsum(inc, axis=0, out=new[1:])
        new[1:] += y0
        upd = float(np.max(np.abs(new - Y)))
        Y = new
        if not np.all(np.isfinite(Y)):
            break
        if upd < tol * max(1.0, float(np.max(np.abs(Y)))):
            stats.iterations = max(stats.iterations, it)
            stats.residual = max(stats.residual, upd)
            return Y
        stalls = stalls + 1 if upd >= prev else 0
        if stalls >= 3:
            break
        prev = upd
    return None


def _solve_run(field, X, S, y0, scheme, tol, max_iter, p, stats):
    """Picard on pieces with ``omega(K X) <= 1``, bisecting a piece on failure."""
    K = max(field.bounds()[1], 1e-12)
    cuts = ControlFunction(np.arange(X.shape[0]), K * X, p).greedy_partition(1.0, max_steps=PIECE_CAP)
    out = np.empty((X.shape[0], y0.size))
    out[0] = y0
    stack = [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)][::-1]
    y = y0
    while stack:
        i0, i1 = stack.pop()
        Y = _picard(field, X[i0 : i1 + 1], None if S is None else S[i0:i1], y, scheme, tol, max_iter, stats)
        if Y is None:
            if i1 - i0 == 1:
                raise NoContraction(f"no contraction on a single step at node {i0}")
            mid = (i0 + i1) // 2
            stack += [(mid, i1), (i0, mid)]
            continue
        out[i0 : i1 + 1] = Y
        y = Y[-1]
    return out


def _integrate(field, X, kinds, y0, *, scheme="trapezoid", S=None, p=1.0, tol=1e-10, max_iter=50):
    X = np.asarray(X, dtype=float)
    if X.shape[1] != field.d:
        raise ValueError(f"driver dimension {X.shape[1]} does not match field ({field.d})")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    if y0.size != field.n:
        raise ValueError(f"initial state has dimension {y0.size}, field expects {field.n}")
    N = X.shape[0]
    Y = np.empty((N, field.n))
    Y[0] = y0
    stats = _Stats()
    k = 0
    while k < N - 1:
        if kinds[k] == CONT:
            e = k
            while e < N - 1 and kinds[e] == CONT:
                e += 1
            Y[k : e + 1] = _solve_run(field, X[k : e + 1], None if S is None else S[k:e], Y[k],
                                      scheme, tol, max_iter, p, stats)
            k = e
        elif kinds[k] == ODE:
            Y[k + 1] = flow_rk4(field, Y[k], X[k + 1] - X[k])
            k += 1
        else:
            Y[k + 1] = Y[k] + field.eval(Y[k]) @ (X[k + 1] - X[k])
            k += 1
    return Y, stats


def _level2_steps(X, areas):
    """``S_k = dX dX^T / 2 + A_k``: the geometric level-2 step increments."""
    dX = np.diff(X, axis=0)
    S = 0.5 * np.einsum("ki,kj->kij", dX, dX)
    if areas is not None:
        S += areas
    return S


def _check_areas(areas, driver):
    if areas is None:
        return None
    areas = np.asarray(areas, dtype=float)
    if areas.shape != (len(driver) - 1, driver.dim, driver.dim):
        raise ValueError("areas must have one d x d matrix per driver step")
    if np.max(np.abs(areas + np.swapaxes(areas, 1, 2)), initial=0.0) > 1e-12:
        raise ValueError("step areas must be antisymmetric")
    return areas


def _scheme_for(p, field):
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if field.lip_alpha <= p:
        raise ValueError(f"field is Lip({field.lip_alpha}); need alpha > p = {p}")
    return "trapezoid" if p < 2 else "davie"


def _provenance(field, p, **extra):
    out = {"field": field.name, "p": p, "lip_alpha": field.lip_alpha, "lip_norm": field.lip_norm}
    if hasattr(field, "radius"):
        out["truncation_radius"] = field.radius
    out.update(extra)
    return out


# ---------------------------------------------------------------- solvers

def _solve_extended(field, driver, a, p, delta, areas, scheme, tol, max_iter, driver_ref):
    ext, par = parametrise(driver, delta, p)
    kinds = np.full(len(ext) - 1, CONT)
    for s in par.segments:
        kinds[s.start_idx : s.end_idx] = ODE
    S = None
    if scheme == "davie":
        ext_areas = np.zeros((len(ext) - 1, driver.dim, driver.dim))
        if areas is not None:
            ext_areas[par.step_map()] = areas
        S = _level2_steps(ext.values, ext_areas)
    Y, stats = _integrate(field, ext.values, kinds, a, scheme=scheme, S=S, p=p, tol=tol, max_iter=max_iter)
    yext = SamplePath(ext.times, Y)
    prov = _provenance(field, p, delta=delta, scheme=scheme, driver=driver_ref or {})
    return Solution(deparametrise(yext, par), "geometric", prov, stats.iterations, stats.residual, yext, par)


def solve_geometric(field: VectorField, driver: SamplePath, a, p: float, delta: float = 1.0, *,
                    tol: float = 1e-10, max_iter: int = 50, driver_ref: dict | None = None) -> Solution:
    """Geometric solution for ``p < 2`` via the fictitious-time parametrisation.

    Every jump of the result is the time-1 flow of ``y' = f(y) dx`` started
    at the left limit.
    """
    if p >= 2:
        raise ValueError("Young condition violated: p >= 2 needs solve_geometric_rough")
    scheme = _scheme_for(p, field)
    return _solve_extended(field, driver, a, p, delta, None, scheme, tol, max_iter, driver_ref)


def _skeleton_solve(field, driver, a, p, jump_kind, areas, tol, max_iter):
    times, pts, right = driver.skeleton()
    kinds = np.full(len(pts) - 1, CONT)
    S = None
    scheme = _scheme_for(p, field)
    for i in driver.jump_map():
        kinds[right[i] - 1] = jump_kind(i)
    if scheme == "davie":
        sk_areas = np.zeros((len(pts) - 1, driver.dim, driver.dim))
        if areas is not None:
            sk_areas[right[:-1]] = areas
        S = _level2_steps(pts, sk_areas)
    Y, stats = _integrate(field, pts, kinds, a, scheme=scheme, S=S, p=p, tol=tol, max_iter=max_iter)
    values = Y[right]
    jumps = []
    for i in driver.jump_map():
        left = Y[right[i] - 1]
        if not np.array_equal(left, values[i]):
            jumps.append(Jump(i, left, values[i]))
    return SamplePath(driver.times, values, tuple(jumps)), stats, scheme


def solve_forward(field: VectorField, driver: SamplePath, a, p: float, *, mode: str = "direct",
                  n_corrections: int = 0, areas=None, tol: float = 1e-10, max_iter: int = 50,
                  driver_ref: dict | None = None) -> Solution:
    """Forward solution: geometric between jumps, ``y <- y + f(y) dx`` at jumps.

    ``mode="corrective"`` gives the intermediate path ``z^m``: the
    ``n_corrections`` largest jumps are forward, the rest geometric, all
    applied in time order.
    """
    areas = _check_areas(areas, driver)
    if mode == "direct":
        rule = lambda i: FWD  # noqa: E731
    elif mode == "corrective":
        if n_corrections < 0:
            raise ValueError("n_corrections must be >= 0")
        corrected = {j.index for j in driver.jumps[:n_corrections]}
        rule = lambda i: FWD if i in corrected else ODE  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    path, stats, scheme = _skeleton_solve(field, driver, a, p, rule, areas, tol, max_iter)
    kind = "forward" if mode == "direct" or n_corrections >= len(driver.jumps) else "geometric"
    if mode == "corrective" and 0 < n_corrections < len(driver.jumps):
        kind = "corrective"
    prov = _provenance(field, p, mode=mode, n_corrections=n_corrections, scheme=scheme, driver=driver_ref or {})
    return Solution(path, kind, prov, stats.iterations, stats.residual)


def corrective_sequence(field, driver, a, p, ms, areas=None, **kw) -> dict[int, Solution]:
    """``{m: z^m}`` for the requested correction counts."""
    return {int(m): solve_forward(field, driver, a, p, mode="corrective", n_corrections=int(m), areas=areas, **kw)
            for m in ms}


def _sup_diff(y1: SamplePath, y2: SamplePath) -> float:
    a = np.concatenate([y1.values, y1.left_values()])
    b = np.concatenate([y2.values, y2.left_values()])
    return float(np.max(np.linalg.norm(a - b, axis=1)))


def cauchy_report(field, driver, a, p, ms, rs=(1, 5), areas=None) -> list[dict]:
    """``|z^m - z^{m+r}|_inf`` against the tail ``sum_{i>m} |dx_i|^2``."""
    sq = np.sum(driver.jump_sizes() ** 2, axis=1)
    need = sorted({m for m in ms} | {m + r for m in ms for r in rs})
    need = [min(m, len(sq)) for m in need]
    z = corrective_sequence(field, driver, a, p, sorted(set(need)), areas=areas)
    rows = []
    for m in ms:
        tail = float(sq[m:].sum())
        for r in rs:
            mr = min(m + r, len(sq))
            if mr <= m or tail == 0:
                continue
            diff = _sup_diff(z[min(m, len(sq))].path, z[mr].path)
            rows.append({"m": m, "r": r, "diff": diff, "tail": tail, "ratio": diff / tail})
    return rows


# ------------------------------------------------------------------- flows

def _solve_any(field, driver, a, p, delta=1.0, areas=None, **kw):
    if p < 2:
        return solve_geometric(field, driver, a, p, delta, **kw)
    from .rough import solve_geometric_rough

    return solve_geometric_rough(field, driver, a, p, delta, areas=areas, **kw)


def flow_map(field: VectorField, driver: SamplePath, initials, p: float, delta: float = 1.0, areas=None, **kw):
    """Solutions from each initial state and the matrix of Lipschitz ratios

    ``R[i, j] = sup_t |Y^i_t - Y^j_t| / |a_i - a_j|`` (NaN where ``a_i = a_j``).
    """
    initials = [np.asarray(a, dtype=float).reshape(-1) for a in initials]
    sols = [_solve_any(field, driver, a, p, delta, areas, **kw) for a in initials]
    k = len(initials)
    R = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(k):
            dist = np.linalg.norm(initials[i] - initials[j])
            if dist > 0:
                R[i, j] = _sup_diff(sols[i].path, sols[j].path) / dist
    return sols, R


def composition_check(field, driver: SamplePath, a, p: float, split: int, areas=None, **kw) -> float:
    """``|flow_[0,T](a) - flow_[s,T](flow_[0,s](a))|`` for the grid index ``split``."""
    full = _solve_any(field, driver, a, p, areas=areas, **kw).path.values[-1]
    first_areas = None if areas is None else areas[:split]
    second_areas = None if areas is None else areas[split:]
    mid = _solve_any(field, driver.restrict(0, split), a, p, areas=first_areas, **kw).path.values[-1]
    end = _solve_any(field, driver.restrict(split, len(driver) - 1), mid, p, areas=second_areas, **kw).path.values[-1]
    return float(np.linalg.norm(full - end))


def inverse_check(field, driver: SamplePath, a, p: float, **kw) -> float:
    """Solve along the path, then along its reversal; distance back to ``a``."""
    if not driver.is_continuous:
        raise ValueError("inverse check needs a continuous driver (parametrise first)")
    yT = solve_geometric(field, driver, a, p, **kw).path.values[-1]
    back = solve_geometric(field, driver.reversed(), yT, p, **kw).path.values[-1]
    return float(np.linalg.norm(back - np.asarray(a, dtype=float)))
