"""Command-line batch runner.

Usage::

    qrvlab run --config runs.ini --out results/ [--seed N] [--samples N]
    qrvlab list-scenarios
    qrvlab --version

The config is an INI file; the optional ``[run]`` section holds ``seed``,
``samples`` and tolerance overrides, and every other section is one
scenario run named after the section::

    [run]
    seed = 7
    samples = 100000

    [bell]
    scenario = tensor
    state = bell

Exit codes: 0 all verdicts consistent, 1 some verdict inconsistent,
2 bad config or unknown scenario, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime as _dt
import json
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .classical import shared_support
from .classifier import ComparisonReport, Tolerances
from .binning import default_tolerance
from .scenarios import SCENARIOS, ScenarioConfig, config_defaults, run_scenario

log = logging.getLogger("qrvlab")

EXIT_OK, EXIT_INCONSISTENT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

_PARAM_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
_TOL_FIELDS = {f.name for f in dataclasses.fields(Tolerances)}
_CASTS = {"int": int, "float": float, "str": str}


class ConfigError(ValueError):
    pass


def _cast(key: str, raw: str):
    if key in _TOL_FIELDS:
        return float(raw)
    kind = _PARAM_TYPES[key]
    return _CASTS[kind](raw) if kind != "int" else int(raw, 0)


def parse_config(text: str, seed: Optional[int] = None, samples: Optional[int] = None) -> List[ScenarioConfig]:
    """Parse INI text into scenario configs, validating everything up front."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    parser.optionxform = str  # keep "N" and "L" case-sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    shared: Dict[str, object] = {}
    tol_shared: Dict[str, float] = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            try:
                if key in ("seed", "samples"):
                    shared[key] = int(raw, 0)
                elif key in _TOL_FIELDS:
                    tol_shared[key] = float(raw)
                else:
                    raise ConfigError(f"unknown key {key!r} in [run]")
            except ValueError as exc:
                raise ConfigError(f"[run] {key}: {exc}") from exc
    if seed is not None:
        shared["seed"] = seed
    if samples is not None:
        shared["samples"] = samples

    configs = []
    for name in parser.sections():
        if name == "run":
            continue
        items = dict(parser.items(name))
        scenario = items.pop("scenario", None)
        if scenario is None:
            raise ConfigError(f"[{name}] has no scenario id")
        if scenario not in SCENARIOS:
            raise ConfigError(f"[{name}] unknown scenario {scenario!r}")
        params: Dict[str, object] = dict(shared)
        tols = dict(tol_shared)
        for key, raw in items.items():
            allowed = SCENARIOS[scenario].params + ("seed", "samples")
            try:
                if key in _TOL_FIELDS:
                    tols[key] = float(raw)
                elif key in allowed:
                    params[key] = _cast(key, raw)
                else:
                    raise ConfigError(f"[{name}] unknown parameter {key!r} for scenario {scenario!r}")
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"[{name}] {key}: {exc}") from exc
        try:
            configs.append(ScenarioConfig(scenario, name=name, tolerances=Tolerances(**tols), **params))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}] {exc}") from exc
    if not configs:
        raise ConfigError("config defines no scenario runs")
    return configs


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def distributions_csv(report: ComparisonReport, snap_rel: float) -> str:
    """CSV of both laws on their snapped shared support."""
    d1, d2 = report.sigma_qm, report.sigma_rv
    values = list(d1.support) + list(d2.support)
    grid, w1, w2 = shared_support(d1, d2, default_tolerance(values, snap_rel))
    lines = ["value,weight_qm,weight_rv"]
    lines += [f"{_fmt(v)},{_fmt(a)},{_fmt(b)}" for v, a, b in zip(grid, w1, w2)]
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def report_json(cfg: ScenarioConfig, report: ComparisonReport) -> str:
    body = {"name": cfg.name, "scenario": cfg.scenario}
    body.update(report.to_dict())
    return json.dumps(_jsonable(body), indent=2, allow_nan=False) + "\n"


def _config_echo(cfg: ScenarioConfig) -> Dict[str, object]:
    out = {"scenario": cfg.scenario, "name": cfg.name}
    for key in SCENARIOS[cfg.scenario].params + ("seed", "samples"):
        out[key] = getattr(cfg, key)
    out["tolerances"] = dataclasses.asdict(cfg.tolerances)
    return out


def run(config_path, out_dir, seed: Optional[int] = None, samples: Optional[int] = None) -> int:
    """Run every scenario in the config and write reports; returns the exit code."""
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    try:
        configs = parse_config(text, seed, samples)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        log.error("config error: duplicate run names")
        return EXIT_CONFIG

    results = []
    for cfg in configs:
        start = time.perf_counter()
        try:
            report = run_scenario(cfg)
        except ValueError as exc:
            log.error("[%s] invalid parameters: %s", cfg.name, exc)
            return EXIT_CONFIG
        results.append((cfg, report, time.perf_counter() - start))

    out = Path(out_dir)
    manifest = {
        "tool": "qrvlab",
        "version": __version__,
        "started": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config_path": str(config_path),
        "config": [_config_echo(cfg) for cfg, _, _ in results],
        "runs": [],
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        for cfg, report, elapsed in results:
            csv_path = out / f"{cfg.name}.csv"
            json_path = out / f"{cfg.name}.json"
            with open(csv_path, "w", newline="\n") as fh:
                fh.write(distributions_csv(report, cfg.tolerances.snap_rel))
            with open(json_path, "w", newline="\n") as fh:
                fh.write(report_json(cfg, report))
            manifest["runs"].append(
                {
                    "name": cfg.name,
                    "scenario": cfg.scenario,
                    "seed": cfg.seed,
                    "samples": cfg.samples,
                    "distributions": csv_path.name,
                    "report": json_path.name,
                    "consistent": report.consistent,
                    "wall_seconds": elapsed,
                }
            )
            log.info("%s: %s, W1=%.6g, %s", cfg.name, report.branch, report.w1, report.verdict)
        with open(out / "manifest.json", "w", newline="\n") as fh:
            fh.write(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO

    return EXIT_OK if all(r.consistent for _, r, _ in results) else EXIT_INCONSISTENT


def list_scenarios() -> str:
    """Table of registered scenario ids with their parameters and defaults."""
    defaults = config_defaults()
    rows = [("id", "parameters (defaults)", "description")]
    for sid, info in SCENARIOS.items():
        params = " ".join(f"{p}={defaults[p]}" for p in info.params) or "-"
        rows.append((sid, params, info.summary))
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    return "\n".join(f"{a:<{w0}}  {b:<{w1}}  {c}".rstrip() for a, b, c in rows) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrvlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the scenarios in a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=lambda s: int(s, 0))
    p_run.add_argument("--samples", type=int)
    sub.add_parser("list-scenarios", help="show available scenarios")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "list-scenarios":
        sys.stdout.write(list_scenarios())
        return EXIT_OK
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        log.error("seed must be an unsigned 64-bit integer")
        return EXIT_CONFIG
    return run(args.config, args.out, args.seed, args.samples)


if __name__ == "__main__":
    sys.exit(main())
