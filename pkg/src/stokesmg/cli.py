"""Batch experiment driver.

``stokesmg run`` executes GMRES solves over a cartesian sweep of config
fields, ``stokesmg mg-bench`` benchmarks the multigrid subsolvers alone,
``stokesmg spectrum`` emits dense eigenvalue reports, and
``stokesmg presets list`` shows the shipped experiment presets.  Configs
are single JSON trees (schema in the README); outputs are plot-ready CSV
files plus a JSON manifest, written atomically with the manifest last.

Exit codes: 0 success, 1 solver non-convergence (history still written),
2 invalid config or cap violation (no partial outputs).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .grid import (
    FREE_SLIP,
    NO_SLIP,
    PERIODIC,
    CellField,
    FaceField,
    GridSpec,
    norm2,
)
from .krylov import GmresConfig, gmres_solve
from .multigrid import SmootherParams, build_hierarchy, vcycle
from .operators import (
    LAPLACIAN,
    STRESS,
    STRESS_BULK,
    apply_A,
    apply_Lrho,
    rescale,
)
from .precond import PrecondConfig, PrecondKind
from .problems import (
    PRNG_NAME,
    BubbleSpec,
    CflSpec,
    bubble_coefficients,
    bubble_density,
    cfl_to_theta,
    constant_coefficients,
    inviscid_coefficients,
    make_rhs,
)
from .schur import SchurConfig, SchurSign

OUT_ENV_VAR = "STOKESMG_OUT"

_BC = {
    "periodic": PERIODIC,
    "no_slip": NO_SLIP,
    "free_slip": FREE_SLIP,
}
_FORM = {
    "laplacian": LAPLACIAN,
    "stress": STRESS,
    "stress_bulk": STRESS_BULK,
}

CSV_HEADER = "iteration,scalar_vcycles,resid_precond,resid_true,restart_flag"
MG_CSV_HEADER = "solver,sweeps,cycle,resid,resid_rel"


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config -> objects
# ---------------------------------------------------------------------------


def _set(tree: dict, path: str, value) -> None:
    parts = path.split(".")
    node = tree
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"config path {path!r} crosses a non-object node")
    node[parts[-1]] = value


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


_LEAF = None
_ANY = "any"
_SCHEMA = {
    "problem": {
        "kind": _LEAF, "dim": _LEAF, "cells": _LEAF, "h": _LEAF, "bc": _LEAF,
        "viscous_form": _LEAF, "mu0": _LEAF, "rho0": _LEAF, "gamma0": _LEAF,
        "beta": _LEAF, "seed": _LEAF, "rescale": _LEAF,
        "bubble": {"r_mu": _LEAF, "r_rho": _LEAF, "epsilon": _LEAF,
                   "radius": _LEAF, "noise_amp": _LEAF,
                   "positive_outside": _LEAF},
    },
    "solver": {
        "precond": {"kind": _LEAF, "velocity_cycles": _LEAF,
                    "pressure_cycles": _LEAF, "schur_sign": _LEAF,
                    "exact_subsolvers": _LEAF},
        "gmres": {"restart": _LEAF, "max_iters": _LEAF, "rtol": _LEAF,
                  "atol": _LEAF, "track_true_residual": _LEAF},
        "smoother": {"omega": _LEAF, "sweeps_down": _LEAF, "sweeps_up": _LEAF,
                     "bottom_sweeps": _LEAF},
    },
    "sweep": _ANY,
    "mg_bench": {"target": _LEAF, "sweeps": _LEAF, "max_cycles": _LEAF,
                 "rtol": _LEAF},
    "spectrum": {"which": _LEAF},
    "_sweep_point": _ANY,
}


def validate_keys(tree: dict, schema=None, prefix: str = "") -> None:
    """Reject unknown config keys so sweep-path typos fail loudly."""
    if schema is None:
        schema = _SCHEMA
    for key, value in tree.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {prefix + key!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {prefix + key!r} must be an object")
            validate_keys(value, sub, prefix + key + ".")


def build_grid(problem: dict) -> GridSpec:
    dim = int(problem.get("dim", 2))
    _require(dim in (2, 3), f"dim must be 2 or 3, got {dim}")
    cells = problem.get("cells", 64)
    if isinstance(cells, int):
        cells = (cells,) * dim
    else:
        cells = tuple(int(n) for n in cells)
    _require(len(cells) == dim, "cells must match dim")
    _require(all(n >= 4 and n % 2 == 0 for n in cells),
             f"cell counts must be even and >= 4, got {cells}")
    h = float(problem.get("h", 1.0))
    bc_spec = problem.get("bc", "no_slip")
    if isinstance(bc_spec, str):
        bc_spec = [bc_spec] * dim
    _require(len(bc_spec) == dim, "bc must be a name or one name per axis")
    bc = []
    for name in bc_spec:
        _require(name in _BC, f"unknown boundary condition {name!r}")
        bc.append((_BC[name], _BC[name]))
    try:
        return GridSpec(cells, h, tuple(bc))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_beta(problem: dict) -> CflSpec:
    raw = problem.get("beta", "inf")
    if isinstance(raw, str):
        _require(raw in ("inf", "infinity"), f"beta must be a number or 'inf', got {raw!r}")
        return CflSpec(math.inf)
    beta = float(raw)
    _require(beta >= 0, "beta must be >= 0")
    return CflSpec(beta)


def build_problem(problem: dict, seed_override: int | None = None):
    """Return (grid, coeff, rhs, seed) for a problem block."""
    grid = build_grid(problem)
    kind = problem.get("kind", "constant")
    _require(kind in ("constant", "bubble"), f"unknown problem kind {kind!r}")
    form_name = problem.get("viscous_form", "stress")
    _require(form_name in _FORM, f"unknown viscous form {form_name!r}")
    form = _FORM[form_name]
    mu0 = float(problem.get("mu0", 1.0))
    rho0 = float(problem.get("rho0", 1.0))
    gamma0 = float(problem.get("gamma0", 0.0))
    seed = int(problem.get("seed", 0)) if seed_override is None else int(seed_override)
    cfl = _parse_beta(problem)
    theta = cfl_to_theta(cfl, mu0, rho0, grid.h)

    bubble_cfg = problem.get("bubble", {})
    spec = BubbleSpec(
        r_mu=float(bubble_cfg.get("r_mu", 100.0)),
        r_rho=float(bubble_cfg.get("r_rho", 100.0)),
        epsilon=bubble_cfg.get("epsilon"),
        radius=bubble_cfg.get("radius"),
        noise_amp=float(bubble_cfg.get("noise_amp", 0.1)),
        seed=seed,
        positive_outside=bool(bubble_cfg.get("positive_outside", True)),
    )

    if cfl.inviscid:
        if kind == "bubble":
            rho = bubble_density(grid, spec, rho0)
        else:
            rho = CellField.full(grid, rho0)
        coeff = inviscid_coefficients(grid, rho, theta=theta)
    elif kind == "bubble":
        coeff = bubble_coefficients(grid, spec, theta=theta, viscous_form=form,
                                    mu0=mu0, rho0=rho0, gamma0=gamma0)
    else:
        coeff = constant_coefficients(grid, mu0=mu0, rho0=rho0, theta=theta,
                                      viscous_form=form, gamma0=gamma0)
    rhs, _ = make_rhs(grid, coeff, seed=seed + 1)
    return grid, coeff, rhs, seed


def build_solver(solver: dict):
    pre = solver.get("precond", {})
    kind_name = pre.get("kind", "P2")
    try:
        kind = PrecondKind(kind_name)
    except ValueError as exc:
        raise ConfigError(f"unknown preconditioner {kind_name!r}") from exc
    sign_name = pre.get("schur_sign", "minus")
    try:
        sign = SchurSign(sign_name)
    except ValueError as exc:
        raise ConfigError(f"unknown Schur sign {sign_name!r}") from exc
    try:
        pcfg = PrecondConfig(
            kind=kind,
            velocity_cycles=int(pre.get("velocity_cycles", 1)),
            schur=SchurConfig(sign=sign,
                              pressure_cycles=int(pre.get("pressure_cycles", 1))),
            exact_subsolvers=bool(pre.get("exact_subsolvers", False)),
        )
        gm = solver.get("gmres", {})
        gcfg = GmresConfig(
            restart=int(gm.get("restart", 10)),
            max_iters=int(gm.get("max_iters", 200)),
            rtol=float(gm.get("rtol", 1e-9)),
            atol=float(gm.get("atol", 0.0)),
            track_true_residual=bool(gm.get("track_true_residual", True)),
        )
        sm = solver.get("smoother", {})
        smoother = SmootherParams(
            omega=float(sm.get("omega", 1.0)),
            sweeps_down=int(sm.get("sweeps_down", 2)),
            sweeps_up=int(sm.get("sweeps_up", 2)),
            bottom_sweeps=int(sm.get("bottom_sweeps", 8)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return pcfg, gcfg, smoother


def expand_sweep(config: dict) -> list[dict]:
    """Cartesian product over the ``sweep`` block's dotted paths."""
    sweep = config.get("sweep", {})
    if not sweep:
        return [copy.deepcopy(config)]
    _require(isinstance(sweep, dict), "sweep must map config paths to value lists")
    paths = sorted(sweep)
    for p in paths:
        _require(isinstance(sweep[p], list) and sweep[p],
                 f"sweep entry {p!r} must be a nonempty list")
    points = [{}]
    for p in paths:
        points = [dict(pt, **{p: v}) for pt in points for v in sweep[p]]
    out = []
    for pt in points:
        cfg = copy.deepcopy(config)
        cfg.pop("sweep", None)
        for path, value in pt.items():
            _set(cfg, path, value)
        cfg["_sweep_point"] = pt
        out.append(cfg)
    return out


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return repr(float(x))


def history_csv(history) -> str:
    lines = [CSV_HEADER]
    for it, cyc, rp, rt, flag in history.rows():
        lines.append(f"{it},{cyc},{_fmt(rp)},{_fmt(rt)},{flag}")
    return "\n".join(lines) + "\n"


def _manifest(command: str, config: dict, runs: list[dict]) -> dict:
    return {
        "command": command,
        "version": __version__,
        "prng": PRNG_NAME,
        "config": config,
        "runs": runs,
        "created_unix": time.time(),
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _run_point(args):
    index, cfg, seed_override = args
    grid, coeff, rhs, seed = build_problem(cfg.get("problem", {}), seed_override)
    pcfg, gcfg, smoother = build_solver(cfg.get("solver", {}))
    if pcfg.exact_subsolvers and grid.n_unknowns() > 20_000:
        raise ConfigError(
            f"exact subsolvers capped at 20000 DOFs, grid has {grid.n_unknowns()}"
        )
    do_rescale = bool(cfg.get("problem", {}).get("rescale", True))
    t0 = time.time()
    if do_rescale:
        coeff, rhs, _ = rescale(coeff, rhs)
    x, history = gmres_solve(rhs, coeff, pcfg, gcfg, smoother)
    wall = time.time() - t0
    row = {
        "index": index,
        "file": f"run_{index:03d}.csv",
        "sweep_point": cfg.get("_sweep_point", {}),
        "seed": seed,
        "status": history.status,
        "iterations": history.iterations,
        "scalar_vcycles": history.entries[-1].scalar_vcycles,
        "resid_precond": history.entries[-1].resid_precond,
        "resid_true": history.entries[-1].resid_true,
        "wall_time_s": wall,
    }
    return row, history_csv(history)


def cmd_run(config: dict, outdir: str, jobs: int, seed_override: int | None) -> int:
    validate_keys(config)
    points = expand_sweep(config)
    # validate every sweep point (including problem construction) before any
    # output is written
    for cfg in points:
        validate_keys(cfg)
        grid, _, _, _ = build_problem(cfg.get("problem", {}), seed_override)
        pcfg, _, _ = build_solver(cfg.get("solver", {}))
        if pcfg.exact_subsolvers and grid.n_unknowns() > 20_000:
            raise ConfigError(
                f"exact subsolvers capped at 20000 DOFs, grid has {grid.n_unknowns()}"
            )
    os.makedirs(outdir, exist_ok=True)
    tasks = [(i, cfg, seed_override) for i, cfg in enumerate(points)]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, tasks))
    else:
        results = [_run_point(t) for t in tasks]
    rows = []
    for row, csv_text in results:
        _atomic_write(os.path.join(outdir, row["file"]), csv_text)
        rows.append(row)
    manifest = _manifest("run", config, rows)
    _atomic_write(os.path.join(outdir, "manifest.json"),
                  json.dumps(manifest, indent=2) + "\n")
    return 0 if all(r["status"] in ("converged", "breakdown") for r in rows) else 1


def _mg_bench_rows(grid, coeff, target: str, sweeps: int, max_cycles: int,
                   rtol: float, seed: int) -> list[tuple]:
    params = SmootherParams(sweeps_down=sweeps, sweeps_up=sweeps)
    hier = build_hierarchy(grid, coeff)
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    rows = []
    if target == "pressure":
        rhs = CellField(grid, gen.standard_normal(grid.cells))
        rhs.data -= rhs.data.mean()
        x = CellField.zeros(grid)
        resid = lambda: CellField(grid, rhs.data - apply_Lrho(x, coeff).data)
    else:
        rhs = FaceField.zeros(grid)
        for a in range(grid.dim):
            view = rhs.interior(a)
            view[...] = gen.standard_normal(view.shape)
        x = FaceField.zeros(grid)
        resid = lambda: rhs - apply_A(x, coeff)
    r0 = norm2(rhs)
    rows.append((target, sweeps, 0, r0, 1.0))
    for cycle in range(1, max_cycles + 1):
        corr = vcycle(resid(), hier, params, "cell" if target == "pressure" else "face")
        if target == "pressure":
            x.data += corr.data
        else:
            for a in range(grid.dim):
                x.components[a][...] += corr.components[a]
        rn = norm2(resid())
        rows.append((target, sweeps, cycle, rn, rn / r0))
        if rn <= rtol * r0:
            break
    return rows


def cmd_mg_bench(config: dict, outdir: str) -> int:
    validate_keys(config)
    problem = config.get("problem", {})
    bench = config.get("mg_bench", {})
    target = bench.get("target", "both")
    _require(target in ("pressure", "velocity", "both"), f"bad mg-bench target {target!r}")
    sweeps_list = bench.get("sweeps", [1, 2, 3, 4])
    _require(isinstance(sweeps_list, list) and all(int(s) >= 1 for s in sweeps_list),
             "mg_bench.sweeps must be a list of positive integers")
    max_cycles = int(bench.get("max_cycles", 15))
    rtol = float(bench.get("rtol", 1e-12))
    grid, coeff, _, seed = build_problem(problem)
    targets = ("pressure", "velocity") if target == "both" else (target,)
    if "velocity" in targets and coeff.theta == 0 and coeff.inviscid:
        raise ConfigError("velocity benchmark needs a nonsingular operator")
    os.makedirs(outdir, exist_ok=True)
    lines = [MG_CSV_HEADER]
    for tgt in targets:
        for sweeps in sweeps_list:
            for row in _mg_bench_rows(grid, coeff, tgt, int(sweeps), max_cycles,
                                      rtol, seed):
                name, s, cyc, r, rel = row
                lines.append(f"{name},{s},{cyc},{_fmt(r)},{_fmt(rel)}")
    _atomic_write(os.path.join(outdir, "mg_bench.csv"), "\n".join(lines) + "\n")
    manifest = _manifest("mg-bench", config, [{"file": "mg_bench.csv"}])
    _atomic_write(os.path.join(outdir, "manifest.json"),
                  json.dumps(manifest, indent=2) + "\n")
    return 0


def cmd_spectrum(config: dict, outdir: str) -> int:
    from .spectrum import MAX_SPECTRUM_CELLS, analyze_stokes_spectrum

    validate_keys(config)
    problem = config.get("problem", {})
    which = config.get("spectrum", {}).get("which", "precondS")
    grid = build_grid(problem)
    if grid.n_cell_unknowns() > MAX_SPECTRUM_CELLS:
        raise ConfigError(
            f"spectrum cap is {MAX_SPECTRUM_CELLS} cells, grid has "
            f"{grid.n_cell_unknowns()}"
        )
    grid, coeff, _, _ = build_problem(problem)
    try:
        report = analyze_stokes_spectrum(grid, coeff, which)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    os.makedirs(outdir, exist_ok=True)
    _atomic_write(os.path.join(outdir, "spectrum.json"), report.to_json(indent=2) + "\n")
    manifest = _manifest("spectrum", config, [{"file": "spectrum.json"}])
    _atomic_write(os.path.join(outdir, "manifest.json"),
                  json.dumps(manifest, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _preset(command, description, config, paper_scale=None):
    return {
        "command": command,
        "description": description,
        "config": config,
        "paper_scale": paper_scale or {},
    }


PRESETS = {
    "constant-periodic-steady": _preset(
        "run",
        "constant-coefficient periodic steady Stokes, P1 with exact subsolvers",
        {
            "problem": {"kind": "constant", "dim": 2, "cells": 64, "bc": "periodic",
                        "beta": "inf", "seed": 0},
            "solver": {"precond": {"kind": "P1", "exact_subsolvers": True},
                       "gmres": {"rtol": 1e-10, "max_iters": 10}},
        },
    ),
    "bubble-2d": _preset(
        "run",
        "steady contrast-100 bubble, P2, restart 10",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 128, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "solver": {"precond": {"kind": "P2"},
                       "gmres": {"restart": 10, "rtol": 1e-11, "max_iters": 200}},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig1-mg-sweeps": _preset(
        "mg-bench",
        "multigrid residual vs V-cycle count for 1..4 smoothing sweeps",
        {
            "problem": {"kind": "constant", "dim": 2, "cells": 256, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "mg_bench": {"target": "both", "sweeps": [1, 2, 3, 4],
                         "max_cycles": 20, "rtol": 1e-12},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig2-vcycles": _preset(
        "run",
        "V-cycles per preconditioner application (1, 2, 4) on the bubble",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 64, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "solver": {"precond": {"kind": "P1"},
                       "gmres": {"restart": 10, "rtol": 1e-10, "max_iters": 300}},
            "sweep": {"solver.precond.velocity_cycles": [1, 2, 4],
                      "solver.precond.pressure_cycles": [1]},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig3-restarts": _preset(
        "run",
        "restart frequency 5 vs 10 for P1, P2, P3 on the steady bubble",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 64, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "solver": {"gmres": {"rtol": 1e-10, "max_iters": 300}},
            "sweep": {"solver.gmres.restart": [5, 10],
                      "solver.precond.kind": ["P1", "P2", "P3"]},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig4-precond-compare": _preset(
        "run",
        "all five preconditioners on the steady contrast-100 bubble",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 128, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "solver": {"gmres": {"restart": 10, "rtol": 1e-10, "max_iters": 400}},
            "sweep": {"solver.precond.kind": ["P1", "P2", "P3", "P4", "P5"]},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig5-cfl": _preset(
        "run",
        "viscous CFL sweep beta in {0, 1, 1e4, inf} for P1 and P2",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 64, "bc": "no_slip",
                        "seed": 0},
            "solver": {"gmres": {"restart": 10, "rtol": 1e-10, "max_iters": 300}},
            "sweep": {"problem.beta": [0, 1, 10000.0, "inf"],
                      "solver.precond.kind": ["P1", "P2"]},
        },
        paper_scale={"problem.cells": 512},
    ),
    "fig6-scaling": _preset(
        "run",
        "grid-size robustness at contrast 2 for P1 and P2",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 64, "bc": "no_slip",
                        "beta": "inf", "seed": 0,
                        "bubble": {"r_mu": 2, "r_rho": 2}},
            "solver": {"gmres": {"restart": 10, "rtol": 1e-10, "max_iters": 300}},
            "sweep": {"problem.cells": [64, 128, 256],
                      "solver.precond.kind": ["P1", "P2"]},
        },
        paper_scale={"problem.cells": [128, 256, 512]},
    ),
    "fig7-spectrum": _preset(
        "spectrum",
        "eigenvalue histogram of the preconditioned Schur complement",
        {
            "problem": {"kind": "bubble", "dim": 2, "cells": 16, "bc": "no_slip",
                        "beta": "inf", "seed": 0},
            "spectrum": {"which": "precondS"},
        },
        paper_scale={"problem.cells": 32},
    ),
}


def load_config(args) -> tuple[str | None, dict]:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("specify exactly one of --config or --preset")
    if args.config:
        try:
            with open(args.config) as handle:
                config = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config JSON: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError("config root must be a JSON object")
        return None, config
    if args.preset not in PRESETS:
        raise ConfigError(
            f"unknown preset {args.preset!r}; run 'stokesmg presets list'"
        )
    preset = PRESETS[args.preset]
    config = copy.deepcopy(preset["config"])
    if getattr(args, "paper_scale", False):
        for path, value in preset["paper_scale"].items():
            _set(config, path, value)
    return preset["command"], config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stokesmg",
        description="staggered-grid Stokes solver benchmark driver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", help="named preset (see 'presets list')")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV_VAR} or ./stokesmg-out)")
        p.add_argument("--paper-scale", action="store_true",
                       help="use the publication problem sizes")

    p_run = sub.add_parser("run", help="GMRES solve sweeps")
    add_common(p_run)
    p_run.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    p_run.add_argument("--seed", type=int, default=None, help="override problem seed")

    p_mg = sub.add_parser("mg-bench", help="multigrid subsolver benchmark")
    add_common(p_mg)

    p_sp = sub.add_parser("spectrum", help="dense eigenvalue report")
    add_common(p_sp)

    p_pr = sub.add_parser("presets", help="preset utilities")
    p_pr.add_argument("action", choices=["list"])

    args = parser.parse_args(argv)

    if args.command == "presets":
        for name in sorted(PRESETS):
            print(f"{name:26s} [{PRESETS[name]['command']}] {PRESETS[name]['description']}")
        return 0

    try:
        preset_command, config = load_config(args)
        if preset_command is not None and preset_command != args.command:
            raise ConfigError(
                f"preset {args.preset!r} belongs to subcommand {preset_command!r}"
            )
        outdir = args.out or os.environ.get(OUT_ENV_VAR) or "./stokesmg-out"
        if args.command == "run":
            jobs = max(1, int(args.jobs))
            return cmd_run(config, outdir, jobs, args.seed)
        if args.command == "mg-bench":
            return cmd_mg_bench(config, outdir)
        return cmd_spectrum(config, outdir)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
