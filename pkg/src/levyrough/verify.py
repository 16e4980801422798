"""Verification suites: each returns a JSON-ready report with a pass flag.

The suites are deterministic given ``seed``. Reports carry statistics
only (no timings) so reruns are byte-identical.
"""

from __future__ import annotations

import numpy as np

from . import area as area_mod
from .fields import linear_field, rotation_field, trig_field
from .levy import LevyMeasureSpec, LevyModel, bg_index, eta_measure, eta_partial_sums, rng_stream, sample_path
from .param import parametrise, deparametrise
from .paths import Jump, SamplePath
from .pvar import partition_sum, powp, pvar_brute, pvar_exact
from .rough import solve_geometric_rough
from .solver import cauchy_report, flow_map, jump_gap, solve_forward, solve_geometric

__all__ = ["SUITES", "run_suite"]


def _report(name, checks: dict, stats: dict) -> dict:
    return {"suite": name, "pass": bool(all(checks.values())), "checks": {k: bool(v) for k, v in checks.items()},
            "stats": stats}


def random_jump_path(rng, n_grid: int, d: int, n_jumps: int, step_scale: float = 0.1,
                     max_jump: float = 1.0, horizon: float = 1.0) -> SamplePath:
    """Gaussian-increment path on a uniform grid with jumps at random grid indices."""
    t = np.linspace(0.0, horizon, n_grid)
    x = np.zeros((n_grid, d))
    x[1:] = np.cumsum(step_scale * rng.standard_normal((n_grid - 1, d)), axis=0)
    idx = np.sort(rng.choice(np.arange(1, n_grid), size=min(n_jumps, n_grid - 1), replace=False))
    sizes = rng.standard_normal((idx.size, d))
    sizes *= (rng.uniform(0.05, 1.0, idx.size) * max_jump / np.linalg.norm(sizes, axis=1))[:, None]
    for i, s in zip(idx, sizes):
        x[i:] += s
    return SamplePath(t, x, tuple(Jump(int(i), x[i] - s, x[i]) for i, s in zip(idx, sizes)))


# 1 -------------------------------------------------------------------------
def pvar_oracle(seed: int, trials: int = 1000) -> dict:
    rng = rng_stream(seed, 1)
    worst, worst_witness = 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 13))
        d = int(rng.integers(1, 4))
        p = float(rng.choice([1.0, 1.5, 2.0, 2.7]))
        pts = np.cumsum(rng.standard_normal((n, d)), axis=0)
        a, b = pvar_exact(pts, p), pvar_brute(pts, p)
        worst = max(worst, abs(a.value - b.value) / max(b.value, 1e-300))
        ps = partition_sum(pts, a.witness_partition, p)
        worst_witness = max(worst_witness, abs(ps ** (1 / p) - a.value) / max(a.value, 1e-300))
    return _report("pvar-oracle", {"dp_equals_brute": worst <= 1e-12, "witness_reproduces": worst_witness <= 1e-12},
                   {"trials": trials, "max_rel_err": worst, "max_witness_err": worst_witness})


# 2 -------------------------------------------------------------------------
def param_invariance(seed: int, paths: int = 100, deltas=(0.1, 1.0, 10.0)) -> dict:
    rng = rng_stream(seed, 2)
    worst, worst_budget, roundtrip = 0.0, 0.0, True
    for _ in range(paths):
        d = int(rng.integers(1, 4))
        path = random_jump_path(rng, int(rng.integers(5, 16)), d, int(rng.integers(1, 5)), step_scale=0.2)
        p = float(rng.choice([1.0, 1.5, 2.5]))
        ref = pvar_exact(path, p).value
        for delta in deltas:
            ext, par = parametrise(path, delta, p)
            worst = max(worst, abs(pvar_exact(ext, p).value - ref) / ref)
            budget = delta * float(np.sum(powp(np.linalg.norm(path.jump_sizes(), axis=1), p)))
            worst_budget = max(worst_budget, abs(par.fictitious_time - budget) / budget)
            back = deparametrise(ext, par)
            roundtrip &= np.array_equal(back.values, path.values) and np.array_equal(back.times, path.times)
    return _report("param-invariance",
                   {"pvar_preserved": worst <= 1e-10, "segment_budget": worst_budget <= 1e-12, "round_trip": roundtrip},
                   {"paths": paths, "deltas": list(deltas), "max_rel_err": worst, "max_budget_err": worst_budget})


# 3 -------------------------------------------------------------------------
def jump_dichotomy(seed: int, cases: int = 100) -> dict:
    rng = rng_stream(seed, 3)
    f = linear_field(1.0, radius=1e3)
    worst_geo, worst_fwd, peak = 0.0, 0.0, 0.0
    for _ in range(cases):
        k = int(rng.integers(1, 11))
        h = rng.uniform(-0.5, 0.5, k)
        n = 2 * k + 1
        idx = np.sort(rng.choice(np.arange(1, n), size=k, replace=False))
        x = np.zeros(n)
        for i, hh in zip(idx, h):
            x[i:] += hh
        driver = SamplePath(np.linspace(0, 1, n), x, tuple(Jump(int(i), x[i] - hh, x[i]) for i, hh in zip(idx, h)))
        a = float(rng.uniform(0.5, 2.0) * rng.choice([-1, 1]))
        geo = solve_geometric(f, driver, [a], 1.5).path.values[-1, 0]
        fwd = solve_forward(f, driver, [a], 1.5).path.values[-1, 0]
        worst_geo = max(worst_geo, abs(geo / (a * np.exp(h.sum())) - 1))
        worst_fwd = max(worst_fwd, abs(fwd / (a * np.prod(1 + h)) - 1))
        peak = max(peak, abs(geo), abs(fwd))
    return _report("jump-dichotomy",
                   {"geometric_exp": worst_geo <= 1e-8, "forward_product": worst_fwd <= 1e-8,
                    "inside_truncation": peak < f.radius},
                   {"cases": cases, "max_rel_err_geometric": worst_geo, "max_rel_err_forward": worst_fwd})


# 4 -------------------------------------------------------------------------
def _random_field(rng, kind: int):
    if kind == 0:
        n, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        return linear_field(rng.standard_normal((n, d, n)) / np.sqrt(n * d), radius=float(rng.uniform(1, 4)))
    if kind == 1:
        d = int(rng.integers(1, 3))
        return rotation_field(d, rng.uniform(0.5, 1.5, d), radius=float(rng.uniform(1, 4)))
    return trig_field(int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng, scale=float(rng.uniform(0.5, 2)))


def jump_gap_suite(seed: int, triples: int = 1000, small: float = 1e-3) -> dict:
    rng = rng_stream(seed, 4)
    violations, ratios, degenerate = 0, [], 0
    worst_use = 0.0
    for _ in range(triples):
        f = _random_field(rng, int(rng.integers(3)))
        a = rng.uniform(-3, 3, f.n)
        u = rng.standard_normal(f.d)
        u /= np.linalg.norm(u)
        dx = u * rng.uniform(0, 1)
        geo, fwd, bound = jump_gap(f, a, dx)
        gap = float(np.linalg.norm(geo - fwd))
        violations += gap > bound * (1 + 1e-12) + 1e-15
        worst_use = max(worst_use, float(gap / bound) if bound > 0 else 0.0)
        # scaling: leading term is (Df f)(dx, dx) / 2, exactly quadratic
        K = max(f.bounds()[1], 1e-12)
        d1 = u * small / K
        lead = 0.5 * np.einsum("ilj,l,j->i", f.second_order(a[None])[0], d1, d1)
        g1 = np.linalg.norm(np.subtract(*jump_gap(f, a, d1)[:2]))
        g2 = np.linalg.norm(np.subtract(*jump_gap(f, a, d1 / 2)[:2]))
        # degenerate: quadratic coefficient small against its pointwise scale |Df(a)| |f(a)| |dx|^2 / 2
        natural = 0.5 * np.linalg.norm(f.jacobian(a)) * np.linalg.norm(f.eval(a)) * (small / K) ** 2
        if np.linalg.norm(lead) < 1e-3 * natural or g2 == 0:
            degenerate += 1
            continue
        ratios.append(g1 / g2)
    ratios = np.asarray(ratios)
    ok = np.abs(ratios / 4 - 1) <= 0.1
    return _report("jump-gap", {"zero_violations": violations == 0, "quarter_scaling": bool(ok.all())},
                   {"triples": triples, "violations": int(violations), "max_gap_over_bound": worst_use,
                    "scaling_pairs": int(ratios.size), "degenerate_skipped": degenerate,
                    "ratio_min": float(ratios.min()), "ratio_max": float(ratios.max())})


# 5 -------------------------------------------------------------------------
def corrective_cauchy(seed: int, drivers: int = 20, ms=tuple(range(1, 21)), rs=(1, 5, 10)) -> dict:
    rng = rng_stream(seed, 5)
    all_ok, L_fit, worst_margin = True, 0.0, 0.0
    per_driver = []
    for k in range(drivers):
        model = LevyModel(np.zeros(2), 0.04 * np.eye(2), LevyMeasureSpec.compound_poisson(35.0, "uniform_ball", 2, radius=0.6))
        driver = sample_path(model, 1.0, 129, 1e-4, (seed, 5, k))
        while len(driver.jumps) < max(ms) + 1:
            driver = sample_path(model, 1.0, 129, 1e-4, (seed, 5, k, len(driver.jumps), int(rng.integers(1 << 30))))
        f = trig_field(2, 2, rng, scale=1.0)
        rows = cauchy_report(f, driver, rng.uniform(-1, 1, 2), 1.5, list(ms), rs)
        b0, b1 = f.bounds()
        v1 = float(np.sum(np.linalg.norm(np.diff(driver.skeleton()[1], axis=0), axis=1)))
        L_theory = 0.5 * b0 * b1 * np.exp(1.1 * b1 * v1)
        L_hat = max(r["ratio"] for r in rows)
        all_ok &= L_hat <= L_theory
        L_fit = max(L_fit, L_hat)
        worst_margin = max(worst_margin, L_hat / L_theory)
        per_driver.append({"jumps": len(driver.jumps), "L_hat": L_hat, "L_theory": L_theory})
    return _report("corrective-cauchy", {"single_constant": all_ok},
                   {"drivers": drivers, "m_range": [min(ms), max(ms)], "r_values": list(rs), "L_fit": L_fit,
                    "max_L_over_theory": worst_margin, "per_driver": per_driver})


# 6 -------------------------------------------------------------------------
def chen(seed: int, sizes=(2, 3, 5, 17, 65, 257)) -> dict:
    rng = rng_stream(seed, 6)
    worst = 0.0
    api_worst = 0.0
    triples = 0
    for N in sizes:
        d = int(rng.integers(2, 4))
        X = np.cumsum(rng.standard_normal((N, d)), axis=0)
        pa = area_mod.PolygonAreas(X)
        for s in range(N - 2):
            t, u = np.triu_indices(N, 1)
            keep = t > s
            t, u = t[keep], u[keep]
            if t.size == 0:
                continue
            direct = pa(s, u)
            comp = pa(s, t) + pa(t, u) + 0.5 * area_mod.wedge(X[t] - X[s], X[u] - X[t])
            scale = np.maximum(1.0, np.max(np.abs(direct), axis=(1, 2)))
            worst = max(worst, float(np.max(np.max(np.abs(direct - comp), axis=(1, 2)) / scale)))
            triples += t.size
        # the public API on a sample of triples, against the polygon oracle
        path = SamplePath(np.linspace(0, 1, N), X)
        for _ in range(20 if N > 2 else 0):
            s, t, u = np.sort(rng.choice(N, 3, replace=False))
            A_st = area_mod.AreaMatrix((path.times[s], path.times[t]), area_mod.polygon_area(X[s : t + 1]))
            A_tu = area_mod.AreaMatrix((path.times[t], path.times[u]), area_mod.polygon_area(X[t : u + 1]))
            A_su = area_mod.chen_compose(A_st, A_tu, X[t] - X[s], X[u] - X[t]).matrix
            ref = area_mod.polygon_area(X[s : u + 1])
            api_worst = max(api_worst, float(np.max(np.abs(A_su - ref)) / max(1.0, np.max(np.abs(ref)))))
    return _report("chen", {"identity_exact": worst <= 1e-12, "api_matches_oracle": api_worst <= 1e-12},
                   {"triples": triples, "max_err": worst, "api_max_err": api_worst, "max_points": max(sizes)})


# 7 -------------------------------------------------------------------------
def brownian_area(seed: int, seeds: int = 10_000, levels: int = 14) -> dict:
    model = LevyModel.brownian(2)
    A = np.empty(seeds)
    for k in range(seeds):
        path = sample_path(model, 1.0, 2**levels + 1, 1.0, (seed, 7, k))
        A[k] = area_mod.area_dyadic(path, 0.0, 1.0, levels).matrix[0, 1]
    var = float(A.var(ddof=1))
    # standard error of the sample variance from the fourth central moment
    c = A - A.mean()
    se = float(np.sqrt(max(np.mean(c**4) - var**2, 0.0) / seeds))
    target = 0.25
    z = (var - target) / se
    mz = float(A.mean() / (A.std(ddof=1) / np.sqrt(seeds)))
    return _report("brownian-area", {"variance_within_3se": abs(z) <= 3},
                   {"seeds": seeds, "points": 2**levels, "variance": var, "se": se, "target": target, "z": float(z),
                    "mean_z": mz})


# 8 -------------------------------------------------------------------------
def levy_area_moment(seed: int, trials: int = 4000, levels: int = 8) -> dict:
    model = LevyModel.pure_jump(LevyMeasureSpec.compound_poisson(5.0, "uniform_ball", 2, radius=1.0))
    reports = {}
    checks = {}
    for j, tau in enumerate((0.25, 0.5, 1.0)):
        r = area_mod.area_moment_check(model, 0.0, tau, trials, (seed, 8, j), levels=levels, eps=1e-6)
        reports[str(tau)] = r
        checks[f"bound_{tau}"] = r["pass"]
        checks[f"centred_{tau}"] = abs(r["mean_area"]) <= 3 * r["se_area"]
    shrink = {}
    for a, b in ((0.5, 1.0), (0.25, 0.5)):
        ra, rb = reports[str(a)], reports[str(b)]
        z = (rb["mean"] - 4 * ra["mean"]) / np.sqrt(rb["se"] ** 2 + 16 * ra["se"] ** 2)
        shrink[f"{b}->{a}"] = {"ratio": rb["mean"] / ra["mean"], "z": float(z)}
        checks[f"quarter_shrink_{b}_to_{a}"] = abs(z) <= 3
    return _report("levy-area-moment", checks, {"intervals": reports, "shrinkage": shrink,
                                                "C0": reports["1.0"]["C0"], "C": reports["1.0"]["C"]})


# 9 -------------------------------------------------------------------------
def area_pvar(seed: int, seeds: int = 50, p: float = 2.5, gamma: float = 2.0, skeleton_level: int = 10,
              proposals: int = 10_000) -> dict:
    model = LevyModel.brownian(2)
    violations, worst_tail, worst_ratio = 0, 0.0, 0.0
    for k in range(seeds):
        path = sample_path(model, 1.0, 2**skeleton_level + 1, 1.0, (seed, 9, k))
        r14 = area_mod.area_pvar_bound(path, p, gamma, 14, seed=seed + k, proposals=proposals)
        r12 = area_mod.area_pvar_bound(path, p, gamma, 12, seed=seed + k, proposals=10)
        violations += not r14["pass"]
        worst_tail = max(worst_tail, abs(r14["bound"] - r12["bound"]) / r14["bound"])
        worst_ratio = max(worst_ratio, r14["lower"] / r14["bound"])
    return _report("area-pvar", {"lower_below_bound": violations == 0, "tail_stable": worst_tail < 0.05},
                   {"seeds": seeds, "p": p, "gamma": gamma, "skeleton_points": 2**skeleton_level,
                    "violations": violations, "max_tail_change": worst_tail, "max_lower_over_bound": worst_ratio})


# 10 ------------------------------------------------------------------------
def flow(seed: int, halvings: int = 3, base: float = 0.1) -> dict:
    rng = rng_stream(seed, 10)
    presets = {
        "linear": linear_field(rng.standard_normal((2, 2, 2)) / 2, radius=5.0),
        "rotation": rotation_field(2, [1.0, 0.5], radius=5.0),
        "trig": trig_field(2, 2, rng, scale=1.5),
    }
    young_model = LevyModel(np.array([0.3, -0.2]), np.zeros((2, 2)),
                            LevyMeasureSpec.compound_poisson(10.0, "uniform_ball", 2, radius=0.5))
    young_driver = sample_path(young_model, 1.0, 257, 1e-4, (seed, 10, 0))
    fine = sample_path(LevyModel.brownian(2), 1.0, 2**12 + 1, 1.0, (seed, 10, 1))
    rough_driver, areas = area_mod.step_areas(fine, 16)
    checks, stats = {}, {}
    a = np.array([0.4, -0.3])
    e = rng.standard_normal(2)
    e /= np.linalg.norm(e)
    for name, f in presets.items():
        for solver, driver, p, ar in (("young", young_driver, 1.5, None), ("rough", rough_driver, 2.5, areas)):
            ratios = []
            for h in range(halvings + 1):
                eps = base / 2**h
                _, R = flow_map(f, driver, [a, a + eps * e], p, areas=ar)
                ratios.append(float(R[0, 1]))
            dev = max(abs(r / ratios[0] - 1) for r in ratios[1:])
            checks[f"{name}_{solver}"] = dev <= 0.2
            stats[f"{name}_{solver}"] = {"ratios": ratios, "max_rel_change": dev}
    return _report("flow", checks, stats)


# 11 ------------------------------------------------------------------------
def degeneracy(seed: int, cases: int = 20, points: int = 2**14) -> dict:
    rng = rng_stream(seed, 11)
    worst = 0.0
    tt = np.linspace(0, 1, points + 1)
    for _ in range(cases):
        k = rng.integers(1, 3, (3, 2))
        ph = rng.uniform(0, 2 * np.pi, (3, 2))
        amp = rng.normal(0, 0.25, (3, 2))
        X = sum(amp[i] * np.sin(2 * np.pi * k[i] * tt[:, None] + ph[i]) for i in range(3))
        driver = SamplePath(tt, X - X[0])
        f = trig_field(2, 2, rng, scale=1.5)
        a = rng.uniform(-1, 1, 2)
        y = solve_geometric(f, driver, a, 1.5).path.values
        r = solve_geometric_rough(f, driver, a, 2.5, zero_area=True).path.values
        worst = max(worst, float(np.max(np.abs(y - r))))
    return _report("degeneracy", {"rough_matches_young": worst <= 1e-6},
                   {"cases": cases, "points": points, "max_abs_diff": worst})


# 12 ------------------------------------------------------------------------
def eta_index(seed: int = 0) -> dict:
    spec = eta_measure()
    beta = bg_index(spec)
    s2 = eta_partial_sums(spec.params["m_max"], 2.0)
    s19 = eta_partial_sums(spec.params["m_max"], 1.9)
    cap = np.pi**2 / 3  # each band contributes at most 2 / k^2
    first = int(np.argmax(s19 > 1e6)) + 1 if np.any(s19 > 1e6) else None
    return _report("eta-index",
                   {"index_near_two": 1.95 <= beta <= 2.0,
                    "alpha2_bounded": bool(np.all(np.diff(s2) >= 0) and s2[-1] <= cap),
                    "alpha19_exceeds_1e6": first is not None},
                   {"bg_index": beta, "alpha2_final": float(s2[-1]), "alpha2_cap": cap,
                    "alpha19_first_m_above_1e6": first, "m_max": spec.params["m_max"]})


SUITES = {
    "pvar-oracle": pvar_oracle,
    "param-invariance": param_invariance,
    "jump-dichotomy": jump_dichotomy,
    "jump-gap": jump_gap_suite,
    "corrective-cauchy": corrective_cauchy,
    "chen": chen,
    "brownian-area": brownian_area,
    "levy-area-moment": levy_area_moment,
    "area-pvar": area_pvar,
    "flow": flow,
    "degeneracy": degeneracy,
    "eta-index": eta_index,
}

QUICK = {
    "pvar-oracle": {"trials": 100},
    "param-invariance": {"paths": 10},
    "jump-dichotomy": {"cases": 10},
    "jump-gap": {"triples": 100},
    "corrective-cauchy": {"drivers": 2},
    "chen": {"sizes": (2, 3, 5, 17, 65)},
    "brownian-area": {"seeds": 500, "levels": 10},
    "levy-area-moment": {"trials": 500},
    "area-pvar": {"seeds": 3, "proposals": 1000},
    "flow": {"halvings": 2},
    "degeneracy": {"cases": 2},
    "eta-index": {},
}


def run_suite(name: str, seed: int, quick: bool = False) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    kwargs = QUICK[name] if quick else {}
    return SUITES[name](seed, **kwargs)
