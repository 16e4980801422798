"""Command-line front end: ``levyrough {simulate,solve,area,pvar,verify}``.

Exit codes: 0 success, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._io import config_hash, write_json
from .area import area_moment_check, step_areas
from .config import COMMANDS, FIELD_PRESETS, MODES, ConfigError, RunConfig, from_dict, load_file, set_path
from .fields import ConstantField
from .levy import sample_path
from .param import parametrise
from .paths import read_csv, write_csv
from .pvar import pvar_exact
from .rough import default_beta, enhance, solve_geometric_rough, write_enhanced
from .solver import solve_forward, solve_geometric
from .verify import SUITES, run_suite

# flag -> dotted config key
FLAG_KEYS = {
    "seed": "seed", "input": "input", "quick": "quick",
    "model": "model.kind", "dimension": "model.dimension", "horizon": "model.horizon",
    "grid_points": "model.grid_points", "eps": "model.eps",
    "field": "field.preset", "state_dim": "field.state_dim", "initial": "field.initial",
    "p": "numeric.p", "q": "numeric.q", "delta": "numeric.delta", "tol": "numeric.tol",
    "max_iter": "numeric.max_iter", "max_level": "numeric.max_level", "trials": "numeric.trials",
    "mode": "numeric.mode", "n_corrections": "numeric.n_corrections", "s": "numeric.s", "t": "numeric.t",
    "area_stride": "numeric.area_stride",
    "out": "output.directory", "format": "output.format",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levyrough", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, stochastic=True):
        p.add_argument("--config", help="JSON or YAML run configuration")
        p.add_argument("--seed", type=int, help="64-bit seed" + (" (required)" if stochastic else ""))
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"))

    def model_flags(p):
        p.add_argument("--model", choices=("brownian", "levy"))
        p.add_argument("--dimension", type=int)
        p.add_argument("--horizon", type=float)
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--eps", type=float, help="small-jump cutoff")

    p = sub.add_parser("simulate", help="sample a Lévy path")
    common(p)
    model_flags(p)

    p = sub.add_parser("solve", help="solve a differential equation driven by a path")
    common(p)
    model_flags(p)
    p.add_argument("--input", help="driver CSV (otherwise simulated from the model)")
    p.add_argument("--field", choices=FIELD_PRESETS)
    p.add_argument("--state-dim", dest="state_dim", type=int)
    p.add_argument("--initial", type=float, nargs="+")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n-corrections", dest="n_corrections", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--delta", type=float, help="fictitious-time weight of jumps")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--area-stride", dest="area_stride", type=int, help="fine steps per coarse step (p >= 2)")

    p = sub.add_parser("area", help="Monte Carlo second moment of the Lévy area")
    common(p)
    model_flags(p)
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--levels", dest="max_level", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("pvar", help="exact p-variation of a path")
    common(p)
    model_flags(p)
    p.add_argument("--input", help="path CSV (otherwise simulated from the model)")
    p.add_argument("--p", type=float)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--quick", action="store_true", default=None, help="reduced sizes")
    return ap


def make_config(args: argparse.Namespace) -> RunConfig:
    data = load_file(args.config) if args.config else {}
    file_cmd = data.get("command")
    if file_cmd is not None and file_cmd != args.command:
        raise ConfigError(f"config is for {file_cmd!r}, command line asks for {args.command!r}")
    data["command"] = args.command
    if args.command == "verify":
        data["suite"] = args.suite
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            set_path(data, key, value)
    cfg = from_dict(data)
    try:
        return cfg.validate()
    except TypeError as exc:
        raise ConfigError(f"ill-typed config value: {exc}") from exc


# ------------------------------------------------------------------ commands

def _provenance(cfg: RunConfig, **extra) -> dict:
    d = cfg.to_dict()
    return {"command": cfg.command, "config": d, "config_hash": config_hash(d), "seed": cfg.seed,
            "version": __version__, **extra}


def _driver(cfg: RunConfig):
    if cfg.input:
        try:
            return read_csv(cfg.input), {"input": str(cfg.input)}
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read driver: {exc}") from exc
    m = cfg.model
    path = sample_path(cfg.build_model(), m.horizon, m.grid_points, m.eps, cfg.seed)
    return path, {"model": m.kind, "seed": cfg.seed, "eps": m.eps, "grid_points": m.grid_points}


def _emit(cfg: RunConfig, name: str, path=None, report=None, **extra) -> Path:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if path is not None:
        target = out / f"{name}.csv"
        write_csv(path, target)
        files.append(target.name)
    if report is not None:
        target = out / f"{name}.json"
        write_json(target, report)
        files.append(target.name)
    write_json(out / f"{name}.provenance.json", _provenance(cfg, artifacts=files, **extra))
    return out


def cmd_simulate(cfg: RunConfig) -> int:
    path, ref = _driver(cfg)
    if cfg.output.format == "json":
        _emit(cfg, "path", report={"times": path.times, "values": path.values,
                                   "jumps": [{"index": j.index, "left": j.left, "right": j.right} for j in path.jumps]},
              driver=ref)
    else:
        _emit(cfg, "path", path=path, driver=ref)
    print(f"simulated {len(path)} points, {len(path.jumps)} registered jumps")
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    driver, ref = _driver(cfg)
    n = cfg.numeric
    field = cfg.build_field(driver.dim)
    a = cfg.initial()
    kw = {"tol": n.tol, "max_iter": n.max_iter, "driver_ref": ref}
    areas = None
    try:
        if n.p >= 2:
            if n.area_stride > 1 or not driver.is_continuous:
                driver, areas = step_areas(driver, n.area_stride)
            else:
                areas = np.zeros((len(driver) - 1, driver.dim, driver.dim))
        if n.mode == "geometric":
            if n.p < 2:
                sol = solve_geometric(field, driver, a, n.p, n.delta, **kw)
            else:
                sol = solve_geometric_rough(field, driver, a, n.p, n.delta, areas=areas, **kw)
        else:
            sol = solve_forward(field, driver, a, n.p, mode="direct" if n.mode == "forward" else "corrective",
                                n_corrections=n.n_corrections, areas=areas, **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    extra = {"solution": {"kind": sol.kind, "picard_iterations": sol.picard_iterations,
                          "residual": sol.residual, **sol.provenance}}
    status = 0
    if isinstance(field, ConstantField):
        # constant fields integrate exactly: y = a + C (x - x_0)
        expected = a + (driver.values - driver.values[0]) @ field.C.T
        err = float(np.max(np.abs(sol.path.values - expected)))
        extra["constant_field_check"] = {"max_abs_err": err, "pass": err <= 1e-10}
        status = 0 if err <= 1e-10 else 1
    mf = None
    if areas is not None:
        ext, par = parametrise(driver, n.delta, n.p)
        ext_areas = np.zeros((len(ext) - 1, driver.dim, driver.dim))
        ext_areas[par.step_map()] = areas
        mf = enhance(ext, ext_areas, n.p)
        extra["beta"] = default_beta(mf)
    out = _emit(cfg, "solution", path=sol.path, **extra)
    if sol.parametrisation is not None:
        sol.parametrisation.save(out / "solution.parametrisation.json")
    if mf is not None:
        write_enhanced(mf, out / "driver.enhanced.csv")
    print(f"solved {sol.kind}: {len(sol.path)} points, {sol.picard_iterations} Picard iterations")
    return status


def cmd_area(cfg: RunConfig) -> int:
    n, m = cfg.numeric, cfg.model
    try:
        rep = area_moment_check(cfg.build_model(), n.s, n.t, n.trials, cfg.seed, levels=n.max_level, eps=m.eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(cfg, "area", report=rep)
    print(f"E[A^2] = {rep['mean']:.6g} +- {rep['se']:.2g}, bound {rep['bound']:.6g}: "
          f"{'PASS' if rep['pass'] else 'FAIL'}")
    return 0 if rep["pass"] else 1


def cmd_pvar(cfg: RunConfig) -> int:
    path, ref = _driver(cfg)
    res = pvar_exact(path, cfg.numeric.p)
    rep = {"p": cfg.numeric.p, "value": res.value, "witness_partition": list(res.witness_partition),
           "points": len(path)}
    _emit(cfg, "pvar", report=rep, driver=ref)
    print(f"{cfg.numeric.p}-variation = {res.value!r}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    rep = run_suite(cfg.suite, cfg.seed, quick=cfg.quick)
    _emit(cfg, f"verify-{cfg.suite}", report=rep)
    for k, v in rep["checks"].items():
        print(f"  {'ok  ' if v else 'FAIL'} {k}")
    print(f"{cfg.suite}: {'PASS' if rep['pass'] else 'FAIL'}")
    return 0 if rep["pass"] else 1


HANDLERS = {"simulate": cmd_simulate, "solve": cmd_solve, "area": cmd_area, "pvar": cmd_pvar, "verify": cmd_verify}
assert set(HANDLERS) == set(COMMANDS)


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
