"""Command-line entry point.

Subcommands: run (one ensemble), disorder-sweep (one ensemble per delta),
cost-sweep (interaction/charging costs over a delta grid), periodic (run
with the oscillating charger and a mandatory convergence certificate) and
validate (the oracle suite).  Config keys can come from a `key = value`
file and/or mirrored `--key` flags; flags win.  Exit codes: 0 ok, 2 bad
config, 3 periodic step not converged, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .disorder import DisorderSpec, preset_model, preset_parameters, with_delta
from .dynamics import ConvergenceError, DEFAULT_PERIODIC_STEP, TimeGrid
from .ensemble import (
    CHARGING_WINDOW,
    DEFAULT_SEED,
    EnsembleConfig,
    InvariantError,
    cost_ensemble,
    run_ensemble,
    time_window_average,
)
from .operators import ChargingParams, DriveKind
from .reporting import (
    emit_cost_csv,
    emit_curves,
    emit_json,
    summary_payload,
    write_manifest,
)
from .validation import run_all_checks

log = logging.getLogger("disqb")

THREADS_ENV = "DISQB_THREADS"

CONFIG_KEYS = (
    "model",
    "preset",
    "delta",
    "j2",
    "h",
    "omega",
    "omega_p",
    "drive",
    "n_realizations",
    "seed",
    "grid.min",
    "grid.max",
    "grid.points",
    "threads",
)

_CHAIN_ONLY_KEYS = ("j2", "h")


class ConfigError(Exception):
    pass


def read_config_file(path: Path) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    raw = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        raw[key] = value
    return raw


def _coerce(raw: dict, key: str, cast, check=None, what: str = "") -> object:
    value = raw[key]
    try:
        value = cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: cannot parse {raw[key]!r}") from exc
    if check is not None and not check(value):
        raise ConfigError(f"config key {key!r}: value {value!r} is out of range ({what})")
    return value


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        threads = int(env)
    except ValueError as exc:
        raise ConfigError(f"environment variable {THREADS_ENV}={env!r} is not an integer") from exc
    if threads < 1:
        raise ConfigError(f"environment variable {THREADS_ENV} must be >= 1")
    return threads


def parse_config(raw: dict) -> EnsembleConfig:
    """Validate and expand a raw key/value mapping into an EnsembleConfig.

    A preset fills in delta (and h, j2 for the chain); explicit keys
    override the preset values with a logged warning.
    """
    for key in raw:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    if "model" not in raw:
        raise ConfigError("missing required config key 'model'")
    model = _coerce(raw, "model", str, lambda m: m in ("chain", "chimera"), "chain|chimera")

    preset = None
    if "preset" in raw:
        preset = str(raw["preset"])
        try:
            preset_mdl = preset_model(preset)
        except ValueError as exc:
            raise ConfigError(f"config key 'preset': {exc}") from exc
        if preset_mdl != model:
            raise ConfigError(
                f"config key 'preset': {preset!r} belongs to model {preset_mdl!r}, not {model!r}"
            )

    if model == "chimera":
        for key in _CHAIN_ONLY_KEYS:
            if key in raw:
                raise ConfigError(f"config key {key!r} only applies to the chain model")

    overrides = {}
    if "delta" in raw:
        overrides["delta"] = _coerce(raw, "delta", float, lambda d: d >= 0, ">= 0")
    if "h" in raw:
        overrides["h"] = _coerce(raw, "h", float)
    if "j2" in raw:
        overrides["j2"] = _coerce(raw, "j2", float)

    if preset is not None:
        disorder = preset_parameters(preset)
        if overrides:
            for key, value in overrides.items():
                log.warning("explicit %s=%s overrides preset %s", key, value, preset)
            disorder = replace(disorder, **overrides)
    else:
        if "delta" not in overrides:
            raise ConfigError("missing config key 'delta' (required when no preset is given)")
        disorder = DisorderSpec(**overrides)

    drive = "static"
    if "drive" in raw:
        drive = _coerce(raw, "drive", str, lambda d: d in ("static", "periodic"), "static|periodic")
    omega = 1.0
    if "omega" in raw:
        omega = _coerce(raw, "omega", float, lambda o: o >= 0, ">= 0")
    omega_p = 0.3
    if "omega_p" in raw:
        omega_p = _coerce(raw, "omega_p", float, lambda o: o > 0, "> 0")
        if drive == "static":
            log.warning("omega_p is ignored for a static drive")
    charging = ChargingParams(
        omega=omega,
        drive_kind=DriveKind.PERIODIC if drive == "periodic" else DriveKind.STATIC,
        omega_p=omega_p,
    )

    g_min = 1e-2
    g_max = 1e3
    g_pts = 200
    if "grid.min" in raw:
        g_min = _coerce(raw, "grid.min", float, lambda v: v > 0, "> 0")
    if "grid.max" in raw:
        g_max = _coerce(raw, "grid.max", float)
    if "grid.points" in raw:
        g_pts = _coerce(raw, "grid.points", int, lambda v: v >= 1, ">= 1")
    if g_max <= g_min:
        raise ConfigError(f"config key 'grid.max': {g_max} must exceed grid.min = {g_min}")

    n_realizations = 100
    if "n_realizations" in raw:
        n_realizations = _coerce(raw, "n_realizations", int, lambda v: v >= 1, ">= 1")
    seed = DEFAULT_SEED
    if "seed" in raw:
        seed = _coerce(raw, "seed", int, lambda v: v >= 0, ">= 0")
    threads = default_threads()
    if "threads" in raw:
        threads = _coerce(raw, "threads", int, lambda v: v >= 1, ">= 1")

    try:
        return EnsembleConfig(
            model=model,
            n_sites=8,
            disorder=disorder,
            charging=charging,
            grid=TimeGrid.logarithmic(g_min, g_max, g_pts),
            n_realizations=n_realizations,
            master_seed=seed,
            threads=threads,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _gather_raw(args) -> dict:
    raw = {}
    if args.config:
        raw.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key.replace(".", "_"), None)
        if value is not None:
            raw[key] = value
    return raw


def _parse_deltas(text: str) -> list[float]:
    try:
        deltas = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--deltas: cannot parse {text!r}") from exc
    if not deltas:
        raise ConfigError("--deltas: need at least one value")
    if any(d < 0 for d in deltas):
        raise ConfigError("--deltas: values must be nonnegative")
    return deltas


def _apply_step(config: EnsembleConfig, args) -> EnsembleConfig:
    step = getattr(args, "step", None)
    if step is None:
        return config
    if step <= 0:
        raise ConfigError("--step must be positive")
    return replace(config, periodic_step=step)


def cmd_run(args) -> int:
    config = _apply_step(parse_config(_gather_raw(args)), args)
    return _run_and_emit(config, args)


def cmd_periodic(args) -> int:
    raw = _gather_raw(args)
    if raw.get("drive", "periodic") != "periodic":
        raise ConfigError("the periodic subcommand requires drive = periodic")
    raw["drive"] = "periodic"
    config = _apply_step(parse_config(raw), args)
    return _run_and_emit(config, args)


def _run_and_emit(config: EnsembleConfig, args) -> int:
    outdir = Path(args.output)
    result = run_ensemble(config)
    files = [emit_curves(result, outdir / "curves.csv")]
    files.append(emit_json(summary_payload(result), outdir / "summary.json"))
    if not args.no_figures:
        from .figures import save_run_figure

        label = config.disorder.preset or f"{config.model}, delta = {config.disorder.delta:g}"
        files.append(save_run_figure(result, outdir / "curves.png", label))
    write_manifest(outdir, files, args.config)
    log.info("wrote %d files to %s (wall time %.2f s)", len(files) + 1, outdir, result.wall_time)
    return 0


def cmd_disorder_sweep(args) -> int:
    deltas = _parse_deltas(args.deltas)
    base = parse_config(_gather_raw(args))
    outdir = Path(args.output)
    results = {}
    files = []
    window_stats = {}
    for delta in deltas:
        config = replace(base, disorder=with_delta(base.disorder, delta))
        result = run_ensemble(config)
        results[delta] = result
        files.append(emit_curves(result, outdir / f"curves_delta_{delta:g}.csv"))
        averages = np.array(
            [time_window_average(r.metrics.ergotropy, result.t) for r in result.records]
        )
        stderr = averages.std(ddof=1) / np.sqrt(averages.size) if averages.size > 1 else 0.0
        window_stats[f"{delta:g}"] = {
            "time_averaged_ergotropy_mean": float(averages.mean()),
            "time_averaged_ergotropy_stderr": float(stderr),
        }
    payload = {
        "config": base.as_dict(),
        "deltas": deltas,
        "charging_window": list(CHARGING_WINDOW),
        "window_statistics": window_stats,
        "wall_time_seconds": sum(r.wall_time for r in results.values()),
    }
    files.append(emit_json(payload, outdir / "summary.json"))
    if not args.no_figures:
        from .figures import save_sweep_figure

        files.append(save_sweep_figure(results, outdir / "sweep.png"))
    write_manifest(outdir, files, args.config)
    log.info("disorder sweep over %s done", deltas)
    return 0


def cmd_cost_sweep(args) -> int:
    deltas = _parse_deltas(args.deltas)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    for model in models:
        if model not in ("chain", "chimera"):
            raise ConfigError(f"--models: unknown model {model!r}")
    raw = _gather_raw(args)
    raw.pop("preset", None)
    outdir = Path(args.output)
    omega = float(raw.get("omega", 1.0))
    n_realizations = int(raw.get("n_realizations", 100))
    seed = int(raw.get("seed", DEFAULT_SEED))
    h = float(raw.get("h", 0.6))
    j2 = float(raw.get("j2", 0.3))
    charging = ChargingParams(omega=omega)

    stats_rows = []
    for model in models:
        for delta in deltas:
            disorder = DisorderSpec(delta=delta, h=h, j2=j2)
            ens = cost_ensemble(model, disorder, charging, n_realizations, seed)
            stats_rows.append(ens.stats())
    files = [emit_cost_csv(stats_rows, outdir / "costs.csv")]
    payload = {
        "models": models,
        "deltas": deltas,
        "omega": omega,
        "h": h,
        "j2": j2,
        "n_realizations": n_realizations,
        "seed": seed,
        "rows": stats_rows,
    }
    files.append(emit_json(payload, outdir / "summary.json"))
    if not args.no_figures:
        from .figures import save_cost_figure

        files.append(save_cost_figure(stats_rows, outdir / "costs.png"))
    write_manifest(outdir, files, args.config)
    log.info("cost sweep over %s done for %s", deltas, models)
    return 0


def cmd_validate(args) -> int:
    checks = run_all_checks()
    failed = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
        failed += 0 if check.passed else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if failed:
        raise InvariantError(f"{failed} validation check(s) failed")
    return 0


def _add_config_flags(sub) -> None:
    sub.add_argument("--config", type=Path, default=None, help="key = value config file")
    sub.add_argument("--output", type=Path, default=Path("out"), help="output directory")
    sub.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    sub.add_argument("--model", choices=("chain", "chimera"))
    sub.add_argument("--preset")
    sub.add_argument("--delta", type=float)
    sub.add_argument("--j2", type=float)
    sub.add_argument("--h", type=float)
    sub.add_argument("--omega", type=float)
    sub.add_argument("--omega_p", type=float, dest="omega_p")
    sub.add_argument("--drive", choices=("static", "periodic"))
    sub.add_argument("--n_realizations", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--grid.min", type=float, dest="grid_min")
    sub.add_argument("--grid.max", type=float, dest="grid_max")
    sub.add_argument("--grid.points", type=int, dest="grid_points")
    sub.add_argument("--threads", type=int)
    sub.add_argument(
        "--step",
        type=float,
        default=None,
        help="periodic substep (dimensionless); the run aborts if step halving "
        "changes the state by more than 1e-6",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disqb",
        description="Disorder-averaged charging of spin-chain and Chimera-cell quantum batteries",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    run = subs.add_parser("run", help="one disorder ensemble, metric curves to CSV")
    _add_config_flags(run)
    run.set_defaults(func=cmd_run)

    periodic = subs.add_parser("periodic", help="run with the oscillating charging field")
    _add_config_flags(periodic)
    periodic.set_defaults(func=cmd_periodic)

    dsweep = subs.add_parser("disorder-sweep", help="repeat run over a list of deltas")
    _add_config_flags(dsweep)
    dsweep.add_argument("--deltas", required=True, help="comma-separated disorder strengths")
    dsweep.set_defaults(func=cmd_disorder_sweep)

    csweep = subs.add_parser("cost-sweep", help="interaction/charging costs over a delta grid")
    _add_config_flags(csweep)
    csweep.add_argument("--deltas", required=True, help="comma-separated disorder strengths")
    csweep.add_argument("--models", default="chain,chimera", help="comma-separated model list")
    csweep.set_defaults(func=cmd_cost_sweep)

    validate = subs.add_parser("validate", help="run the oracle cross-check suite")
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s")
    log.setLevel(logging.INFO)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
