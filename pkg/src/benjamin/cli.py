"""Command-line interface: ``benjamin solve | evolve | verify | sweep | kernel``.

Every run reads one JSON config (``--config``), applies ``--set key=value``
overrides on dotted keys, fills defaults, and writes its outputs plus a
``manifest.json`` into a fresh run directory.  The directory is ``--out``
when given, otherwise ``$BENJAMIN_OUTPUT_ROOT/<command>-<run_id>`` (root
defaults to ``./runs``).

Exit codes
----------
0 success, 1 config error, 2 non-coercive parameters, 3 solver divergence,
4 evolution blow-up, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    convergence_sweep,
    coercivity_estimate,
    decay_fit,
    default_sweep_grid,
    FloorNoiseError,
    green_kernel,
    linearized_form,
    random_trial_field,
    stability_experiment,
    unit_direction,
)
from .evolution import BlowUpError, EvolutionConfig, dt_bound, evolve
from .functionals import ModelParams, functional_report, profile_residual
from .grid import Grid, make_grid
from .solver import (
    DivergenceError,
    NotCoerciveError,
    SolitaryWave,
    SolveConfig,
    SolverError,
    constrained_minimize,
    petviashvili,
    q_bo,
    q_kdv,
    rescale_to_ground_state,
)

EXIT_OK, EXIT_CONFIG, EXIT_COERCIVE, EXIT_DIVERGED, EXIT_BLOWUP, EXIT_VERIFY = range(6)
OUTPUT_ROOT_ENV = "BENJAMIN_OUTPUT_ROOT"
REQUIRED = object()


class ConfigError(ValueError):
    """Malformed or incomplete configuration; the message names the field."""


# -- schema -------------------------------------------------------------------------

# dotted key -> (kind, default, choices)
_COMMON = {
    "seed": ("int", 0, None),
}
_PARAMS = {
    "params.c": ("float", REQUIRED, None),
    "params.alpha": ("float", REQUIRED, None),
    "params.beta": ("float", REQUIRED, None),
}
_GRID = {
    "grid.n": ("int", 2048, None),
    "grid.L": ("float", 40.0, None),
}
_SOLVER = {
    "solver.method": ("str", "petviashvili", ("petviashvili", "minimize")),
    "solver.tolerance": ("float", 1e-10, None),
    "solver.max_iterations": ("int", 1000, None),
    "solver.stabilizer_exponent": ("float", 2.0, None),
    "solver.step_size": ("float", 1.0, None),
    "solver.constraint_level": ("float", 1.0, None),
}
_EVOLUTION = {
    "evolution.t_end": ("float", 10.0, None),
    "evolution.dt": ("float?", None, None),
    "evolution.record_stride": ("int", 100, None),
    "evolution.dealias": ("bool", True, None),
    "evolution.snapshots": ("bool", False, None),
    "initial.kind": ("str", "q_kdv", ("q_kdv", "q_bo", "gaussian", "file")),
    "initial.c": ("float", 1.0, None),
    "initial.amplitude": ("float", 1.0, None),
    "initial.width": ("float", 1.0, None),
    "initial.path": ("str?", None, None),
    "initial.noise": ("float", 0.0, None),
}
_VERIFY = {
    "verify.wave": ("str", REQUIRED, None),
    "verify.profile": ("str", REQUIRED, None),
    "verify.trials": ("int", 500, None),
    "verify.decay_exponent": ("float", 2.0, None),
    "verify.pohozaev_threshold": ("float", 1e-6, None),
    "verify.zero_mode_threshold": ("float", 1e-6, None),
}
_SWEEP = {
    "sweep.axis": ("str", REQUIRED, ("beta", "alpha", "epsilon")),
    "sweep.values": ("list", REQUIRED, None),
    "sweep.workers": ("int", 1, None),
    "sweep.t_end": ("float", 20.0, None),
    "sweep.record_stride": ("int", 20, None),
    "grid.n": ("int?", None, None),
    "grid.L": ("float?", None, None),
    "params.c": ("float", 1.0, None),
    "params.alpha": ("float", 1.0, None),
    "params.beta": ("float", 0.0, None),
    "solver.tolerance": ("float", 1e-10, None),
    "solver.max_iterations": ("int", 3000, None),
}

SCHEMAS = {
    "solve": {**_COMMON, **_PARAMS, **_GRID, **_SOLVER},
    "evolve": {**_COMMON, **_PARAMS, "params.c": ("float", 1.0, None), **_GRID,
               **_EVOLUTION},
    "verify": {**_COMMON, **_VERIFY},
    "sweep": {**_COMMON, **_SWEEP},
    "kernel": {**_COMMON, **_PARAMS, **_GRID},
}


def _coerce(key, kind, value, choices):
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{key}: must not be null")
    if base == "int":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        value = int(value)
    elif base == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{key}: must be finite, got {value!r}")
    elif base == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true or false, got {value!r}")
    elif base == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
    elif base == "list":
        if not isinstance(value, list):
            raise ConfigError(f"{key}: expected a list, got {value!r}")
        out = []
        for i, v in enumerate(value):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{key}[{i}]: expected a finite number, got {v!r}")
            out.append(float(v))
        value = out
    if choices is not None and value not in choices:
        raise ConfigError(f"{key}: must be one of {', '.join(choices)}, got {value!r}")
    return value


def _flatten(tree, prefix=""):
    flat = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            if not v:
                raise ConfigError(f"{key}: empty section")
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


def _nest(flat):
    tree = {}
    for key, v in flat.items():
        node = tree
        *head, last = key.split(".")
        for part in head:
            node = node.setdefault(part, {})
        node[last] = v
    return tree


def parse_override(text: str):
    """``key.path=value``; the value is read as JSON when possible, else as a string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r}: expected key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override {text!r}: empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, dict):
        raise ConfigError(f"override {key}: only scalar or list values may be set")
    return key, value


def load_config_text(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    return data


def resolve_config(command: str, raw: dict, overrides=()) -> dict:
    """Validate ``raw`` plus overrides against the command schema and fill defaults."""
    schema = SCHEMAS[command]
    flat = _flatten(raw)
    for key, value in overrides:
        flat[key] = value
    unknown = sorted(set(flat) - set(schema))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key for '{command}'")
    out = {}
    for key, (kind, default, choices) in schema.items():
        if key in flat:
            out[key] = _coerce(key, kind, flat[key], choices)
        elif default is REQUIRED:
            raise ConfigError(f"{key}: missing required field")
        else:
            out[key] = default
    return _nest(out)


def canonical_json(obj) -> str:
    return json.dumps(_json_safe(obj), sort_keys=True, indent=2) + "\n"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# -- file formats -----------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: Path, header, columns=None, rows=None) -> None:
    """CSV with a header row, 17 significant digits and ``\\n`` line endings."""
    if rows is None:
        rows = zip(*columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_field_csv(path) -> tuple[Grid, np.ndarray]:
    """Read a two-column ``x, field`` CSV and recover its grid from the abscissae."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{path}: unreadable field file ({exc})") from None
    if data.shape[1] < 2:
        raise ConfigError(f"{path}: expected columns x and a field")
    x, f = data[:, 0], data[:, 1]
    n = len(x)
    try:
        grid = make_grid(n, -float(x[0]))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * grid.half_length):
        raise ConfigError(f"{path}: abscissae are not a uniform periodic grid on [-L, L)")
    return grid, f


# -- run directory and manifest ---------------------------------------------------


class Run:
    def __init__(self, command: str, config: dict, out: str | None):
        self.command = command
        self.config = config
        self.echo = canonical_json(config)
        digest = hashlib.sha256(self.echo.encode()).hexdigest()[:8]
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        self.run_id = f"{stamp}-{digest}"
        if out is None:
            root = Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))
            self.dir = root / f"{command}-{self.run_id}"
        else:
            self.dir = Path(out)
        if self.dir.exists() and any(self.dir.iterdir()):
            raise ConfigError(f"--out: directory {self.dir} is not empty")
        self.dir.mkdir(parents=True, exist_ok=True)
        self.t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        p = self.dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def finish(self, code: int, error: str | None = None) -> None:
        files = sorted(
            str(p.relative_to(self.dir)).replace(os.sep, "/")
            for p in self.dir.rglob("*")
            if p.is_file()
        )
        outputs = sorted(set(files) | {"manifest.json"})
        manifest = {
            "run_id": self.run_id,
            "command": self.command,
            "config_echo": self.config,
            "tool_version": __version__,
            "outputs": outputs,
            "wall_time_seconds": time.perf_counter() - self.t0,
            "exit_code": code,
            "error": error,
        }
        self.path("manifest.json").write_text(canonical_json(manifest))


# -- shared builders ----------------------------------------------------------------


def _params(cfg) -> ModelParams:
    p = cfg["params"]
    try:
        return ModelParams(p["c"], p["alpha"], p["beta"])
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None


def _grid(cfg) -> Grid:
    g = cfg["grid"]
    try:
        return make_grid(g["n"], g["L"])
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _solve_config(s) -> SolveConfig:
    try:
        return SolveConfig(
            tolerance=s["tolerance"],
            max_iterations=s["max_iterations"],
            stabilizer_exponent=s.get("stabilizer_exponent", 2.0),
            step_size=s.get("step_size", 1.0),
            constraint_level=s.get("constraint_level", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def _noise(grid: Grid, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return unit_direction(random_trial_field(grid, rng), grid)


def _coercivity_message(exc: Exception, p: ModelParams) -> str:
    return (
        f"not coercive: {exc}. The coercivity threshold is beta > -2*sqrt(alpha) "
        f"at c = 1 (in general -2*sqrt(c*alpha))"
    )


def _wave_record(w: SolitaryWave, method: str) -> dict:
    r = w.report
    mu = w.multiplier_mu if w.multiplier_mu is not None else 2.0 * r.quad_I / (3.0 * r.cubic_K)
    return {
        "params": w.params.as_dict(),
        "grid": {"n": w.grid.n_points, "L": w.grid.half_length},
        "method": method,
        "residual_l2": w.residual_l2,
        "I": r.quad_I,
        "K": r.cubic_K,
        "mu": mu,
        "energy": r.energy,
        "mass": r.mass,
        "pohozaev_defect": r.pohozaev_defect,
        "iterations": w.iterations if method == "petviashvili" else None,
        "tolerance": w.tolerance,
    }


# -- commands -----------------------------------------------------------------------


def cmd_solve(cfg: dict, run: Run) -> int:
    p, grid = _params(cfg), _grid(cfg)
    scfg = _solve_config(cfg["solver"])
    method = cfg["solver"]["method"]
    if method == "petviashvili":
        w = petviashvili(p, grid, cfg=scfg)
    else:
        phi, mu = constrained_minimize(p, grid, scfg)
        w = rescale_to_ground_state(phi, mu, grid, p, scfg.tolerance)
    write_csv(run.path("profile.csv"), ["x", "phi"], [grid.x, w.profile])
    run.path("wave.json").write_text(canonical_json(_wave_record(w, method)))
    return EXIT_OK


def _initial_field(cfg, grid: Grid):
    ini = cfg["initial"]
    kind = ini["kind"]
    if kind == "file":
        if not ini["path"]:
            raise ConfigError("initial.path: required when initial.kind is 'file'")
        fgrid, f = read_field_csv(ini["path"])
        grid = fgrid
    elif kind == "q_kdv":
        if not ini["c"] > 0:
            raise ConfigError("initial.c: must be positive")
        f = q_kdv(ini["c"], grid)
    elif kind == "q_bo":
        if not ini["c"] > 0:
            raise ConfigError("initial.c: must be positive")
        f = q_bo(ini["c"], grid)
    else:
        if not ini["width"] > 0:
            raise ConfigError("initial.width: must be positive")
        f = ini["amplitude"] * np.exp(-0.5 * (grid.x / ini["width"]) ** 2)
    if ini["noise"]:
        f = f + ini["noise"] * _noise(grid, cfg["seed"])
    return grid, f


def _write_trace(run: Run, trace, snapshots: bool) -> None:
    write_csv(
        run.path("trace.csv"),
        ["t", "mass", "energy", "peak_x"],
        [trace.times, trace.mass_series, trace.energy_series, trace.peak_series],
    )
    if snapshots and trace.snapshots:
        for i, u in enumerate(trace.snapshots):
            write_csv(run.path(f"snapshots/snap_{i:05d}.csv"), ["x", "u"], [trace.grid.x, u])


def cmd_evolve(cfg: dict, run: Run) -> int:
    p = _params(cfg)
    grid, u0 = _initial_field(cfg, _grid(cfg))
    ev = cfg["evolution"]
    bound = dt_bound(p, grid)
    if ev["dt"] is not None and ev["dt"] > bound:
        raise ConfigError(
            f"evolution.dt: {ev['dt']:.6g} exceeds the stability bound {bound:.17g}"
        )
    try:
        ecfg = EvolutionConfig(
            t_end=ev["t_end"],
            dt=ev["dt"],
            record_stride=ev["record_stride"],
            dealias=ev["dealias"],
            keep_snapshots=ev["snapshots"],
        )
    except ValueError as exc:
        raise ConfigError(f"evolution: {exc}") from None
    try:
        trace = evolve(u0, p, grid, ecfg)
    except BlowUpError as exc:
        _write_trace(run, exc.trace, ev["snapshots"])
        raise
    _write_trace(run, trace, ev["snapshots"])
    return EXIT_OK


def _check(name, value, threshold, ok, note=None):
    rec = {"name": name, "value": value, "threshold": threshold, "pass": bool(ok)}
    if note:
        rec["note"] = note
    return rec


def verify_checks(w: SolitaryWave, trials: int, seed: int, decay_exponent: float,
                  pohozaev_threshold: float = 1e-6, zero_mode_threshold: float = 1e-6):
    """Identity checks on a stored profile; returns a list of check records."""
    grid, phi = w.grid, w.profile
    checks = []
    _, res = profile_residual(phi, grid, w.params)
    lim = 10.0 * w.tolerance
    checks.append(_check("residual", res, lim, res <= lim))
    r = functional_report(phi, grid, w.params)
    rel = abs(r.pohozaev_defect) / abs(r.quad_I) if r.quad_I else math.inf
    checks.append(_check("pohozaev", rel, pohozaev_threshold, rel <= pohozaev_threshold))
    nrm = grid.l2_norm(phi)
    odd = grid.l2_norm(phi - grid.reflect(phi)) / nrm if nrm else math.inf
    checks.append(_check("evenness", odd, 1e-10, odd <= 1e-10))
    zm = linearized_form(w, grid.derivative(phi, 1))
    checks.append(_check("zero_mode", zm, zero_mode_threshold, abs(zm) <= zero_mode_threshold))
    gamma = coercivity_estimate(w, trial_count=trials, seed=seed)
    checks.append(_check("coercivity", gamma, 0.0, gamma > 0,
                         note="empirical lower bound over seeded random trials"))
    try:
        fit = decay_fit(phi, grid, decay_exponent)
        checks.append(_check("decay", fit.exponent, -decay_exponent + 0.3, fit.passes,
                             note=fit.kind))
    except FloorNoiseError as exc:
        checks.append(_check("decay", math.nan, -decay_exponent + 0.3, False, note=str(exc)))
    return checks


def cmd_verify(cfg: dict, run: Run) -> int:
    v = cfg["verify"]
    try:
        meta = json.loads(Path(v["wave"]).read_text())
        p = ModelParams(**meta["params"])
        tol = float(meta.get("tolerance", 1e-10))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"verify.wave: unreadable wave record ({exc})") from None
    grid, phi = read_field_csv(v["profile"])
    w = SolitaryWave(p, grid, phi, profile_residual(phi, grid, p)[1], 0,
                     functional_report(phi, grid, p), tolerance=tol)
    checks = verify_checks(w, v["trials"], cfg["seed"], v["decay_exponent"],
                           v["pohozaev_threshold"], v["zero_mode_threshold"])
    ok = all(c["pass"] for c in checks)
    run.path("verify.json").write_text(canonical_json({"pass": ok, "checks": checks}))
    return EXIT_OK if ok else EXIT_VERIFY


def _limit_point(task):
    limit, value, n, L, tol, maxit = task
    grid = make_grid(n, L)
    pt = convergence_sweep(limit, [value], grid, SolveConfig(tolerance=tol, max_iterations=maxit))[0]
    return [value, pt.h1_distance, pt.iterations, pt.ok, pt.message]


def _stability_point(task):
    c, alpha, beta, n, L, tol, maxit, eps, t_end, stride, seed = task
    p = ModelParams(c, alpha, beta)
    grid = make_grid(n, L)
    try:
        w = petviashvili(p, grid, cfg=SolveConfig(tolerance=tol, max_iterations=maxit))
        direction = _noise(grid, seed)
        rep = stability_experiment(w, eps, direction,
                                   EvolutionConfig(t_end=t_end, record_stride=stride))
        return [eps, rep.sup_distance, rep.ratio, rep.growth_ratio(), True, ""]
    except (SolverError, ValueError, BlowUpError) as exc:
        return [eps, math.nan, math.nan, math.nan, False, str(exc)]


def cmd_sweep(cfg: dict, run: Run) -> int:
    s = cfg["sweep"]
    axis, values = s["axis"], s["values"]
    if not values:
        raise ConfigError("sweep.values: empty value list")
    if s["workers"] < 1:
        raise ConfigError("sweep.workers: must be >= 1")
    tol, maxit = cfg["solver"]["tolerance"], cfg["solver"]["max_iterations"]
    g = cfg["grid"]
    if axis in ("beta", "alpha"):
        limit = "to_kdv" if axis == "beta" else "to_bo"
        if any(not v > 0 for v in values) and axis == "alpha":
            raise ConfigError("sweep.values: alpha values must be positive")
        dg = default_sweep_grid(limit)
        n = g["n"] or dg.n_points
        L = g["L"] or dg.half_length
        try:
            make_grid(n, L)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None
        tasks = [(limit, v, n, L, tol, maxit) for v in values]
        fn, header = _limit_point, [axis, "h1_distance", "iterations", "ok", "message"]
    else:
        if any(not v >= 0 for v in values):
            raise ConfigError("sweep.values: epsilon values must be nonnegative")
        p = _params(cfg)
        n = g["n"] or 512
        L = g["L"] or 40.0
        try:
            make_grid(n, L)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None
        tasks = [(p.c, p.alpha, p.beta, n, L, tol, maxit, v, s["t_end"],
                  s["record_stride"], cfg["seed"]) for v in values]
        fn = _stability_point
        header = ["epsilon", "sup_distance", "ratio", "growth_ratio", "ok", "message"]
    if s["workers"] == 1:
        rows = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=s["workers"]) as pool:
            rows = list(pool.map(fn, tasks))
    write_csv(run.path("sweep.csv"), header, rows=rows)
    return EXIT_OK if all(r[-2] for r in rows) else EXIT_DIVERGED


def cmd_kernel(cfg: dict, run: Run) -> int:
    p, grid = _params(cfg), _grid(cfg)
    k = green_kernel(p, grid)
    write_csv(run.path("kernel.csv"), ["x", "G", "dG"], [grid.x, k.kernel, k.derivative_kernel])
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "kernel": cmd_kernel,
}


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="benjamin", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"benjamin {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "compute a solitary-wave profile",
        "evolve": "integrate the evolution equation",
        "verify": "check identities on a stored profile",
        "sweep": "run a limit or stability sweep",
        "kernel": "tabulate the Green kernel and its derivative",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a dotted config key")
        sp.add_argument("--out", help="run directory (default: under $%s)" % OUTPUT_ROOT_ENV)
        if name == "verify":
            sp.add_argument("run_dir", nargs="?",
                            help="solve run directory holding wave.json and profile.csv")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    run = None
    try:
        raw = {}
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(f"--config: {exc}") from None
            raw = load_config_text(text, args.config)
        overrides = [parse_override(o) for o in args.overrides]
        if command == "verify" and args.run_dir:
            overrides = [("verify.wave", str(Path(args.run_dir) / "wave.json")),
                         ("verify.profile", str(Path(args.run_dir) / "profile.csv"))] + overrides
        cfg = resolve_config(command, raw, overrides)
        run = Run(command, cfg, args.out)
        code = COMMANDS[command](cfg, run)
        err = None
    except ConfigError as exc:
        code, err = EXIT_CONFIG, f"config error: {exc}"
    except NotCoerciveError as exc:
        code, err = EXIT_COERCIVE, _coercivity_message(exc, None)
    except (DivergenceError, SolverError) as exc:
        code, err = EXIT_DIVERGED, f"solver failed: {exc}"
    except BlowUpError as exc:
        code, err = EXIT_BLOWUP, f"blow-up: {exc}; partial trace written"
    except ValueError as exc:
        code, err = EXIT_CONFIG, f"config error: {exc}"
    if err:
        print(err, file=sys.stderr)
    if run is not None:
        run.finish(code, err)
        print(str(run.dir))
    return code


if __name__ == "__main__":
    sys.exit(main())
