"""Experiment driver: ``nash-sens <mode> [--config FILE] [overrides]``.

Modes: nash, approx, sweep, limits, verify.  Every run writes its
artifacts plus ``manifest.json`` (sha256 digests) into the output
directory.  Exit status is 0 on success, 2 when an emitted inclusion
verdict is false and 1 on errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .equilibrium import (EpsilonSchedule, approx_nash_set, map_parameters, nash_set,
                          verify_sandwich)
from .errors import ConfigurationError, NashSensError
from .game import EpsilonTriple
from .games import get_game
from .grids import GridSpec, build_grid, hausdorff
from .oracles import oracle_h
from .setlimits import ParameterSequence, verify_figure1_chain

MODES = ("nash", "approx", "sweep", "limits", "verify")
DEFAULT_SCHEDULE = (0.16, 0.08, 0.04, 0.02, 0.01, 0.005)


@dataclass
class ExperimentConfig:
    mode: str
    game: str = "motivating"
    grid: int = 201
    x: Optional[float] = None
    sweep: Optional[dict] = None
    eps1: float = 0.01
    eps2: Optional[float] = None
    eps3: Optional[float] = None
    closed: bool = False
    schedule: list = field(default_factory=lambda: list(DEFAULT_SCHEDULE))
    sequence: Optional[dict] = None
    tail_start: Optional[int] = None
    tie_tol: float = 1e-9
    delta: Optional[float] = None
    metric: str = "euclidean"
    out: str = "nash-sens-out"
    seed: int = 0
    workers: int = 1

    def eps(self) -> EpsilonTriple:
        return EpsilonTriple(self.eps1, self.eps2, self.eps3)

    def eps_schedule(self) -> EpsilonSchedule:
        steps = []
        for e in self.schedule:
            if isinstance(e, (list, tuple)):
                steps.append(EpsilonTriple(*e))
            else:
                steps.append(EpsilonTriple(e))
        return EpsilonSchedule(tuple(steps))

    def parameter_sequence(self) -> ParameterSequence:
        s = dict(self.sequence)
        return ParameterSequence(s["kind"], s["limit"], s.get("count", 50), s.get("scale", 1.0),
                                 tuple(s.get("points", ())))


@dataclass
class RunManifest:
    config: dict
    version: str
    wall_clock_seconds: float
    files: list
    exit_code: int

    def to_dict(self) -> dict:
        return asdict(self)


# ---- JSON with fixed float formatting ----

def _json_value(v, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(val, indent, level + 1)}"
                 for k, val in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        if all(not isinstance(e, (dict, list, tuple)) for e in v):
            return "[" + ", ".join(_json_value(e, indent, level + 1) for e in v) + "]"
        items = [pad + _json_value(e, indent, level + 1) for e in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float printed to 17 significant digits."""
    return _json_value(obj, indent, 0) + "\n"


# ---- configuration ----

_FIELDS = {f for f in ExperimentConfig.__dataclass_fields__}


def _err(path, msg):
    return ConfigurationError(f"config.{path}: {msg}")


def _num(d, key, lo=None, hi=None, positive=False, integer=False, optional=False):
    v = d.get(key)
    if v is None:
        if optional:
            return None
        raise _err(key, "required")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _err(key, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise _err(key, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise _err(key, "must be finite")
    if positive and v <= 0:
        raise _err(key, f"must be positive, got {v}")
    if lo is not None and v < lo:
        raise _err(key, f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise _err(key, f"must be <= {hi}, got {v}")
    return int(v) if integer else float(v)


def _parse_sequence(v):
    if isinstance(v, str):
        try:
            return ParameterSequence.parse(v).to_dict()
        except ConfigurationError as e:
            raise _err("sequence", str(e)) from None
    if not isinstance(v, dict):
        raise _err("sequence", f"expected a descriptor string or object, got {v!r}")
    unknown = set(v) - {"kind", "limit", "count", "scale", "points"}
    if unknown:
        raise _err(f"sequence.{sorted(unknown)[0]}", "unknown key")
    for key in ("kind", "limit"):
        if key not in v:
            raise _err(f"sequence.{key}", "required")
    try:
        seq = ParameterSequence(v["kind"], float(v["limit"]), v.get("count", 50),
                                float(v.get("scale", 1.0)), tuple(v.get("points", ())))
    except (ConfigurationError, TypeError, ValueError) as e:
        raise _err("sequence", str(e)) from None
    return seq.to_dict()


def parse_config(source: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate JSON config text merged with flag overrides (flags win)."""
    data = {}
    if source:
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"config: invalid JSON ({e})") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config: top level must be an object")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    unknown = set(data) - _FIELDS
    if unknown:
        raise _err(sorted(unknown)[0], "unknown key")

    mode = data.get("mode")
    if mode not in MODES:
        raise _err("mode", f"must be one of {MODES}, got {mode!r}")
    cfg = {"mode": mode}
    if "game" in data:
        if not isinstance(data["game"], str):
            raise _err("game", "expected a string")
        cfg["game"] = data["game"]
    if "grid" in data:
        cfg["grid"] = _num(data, "grid", lo=2, integer=True)
    cfg["x"] = _num(data, "x", optional=True)
    if "sweep" in data and data["sweep"] is not None:
        sw = data["sweep"]
        if isinstance(sw, str):
            parts = sw.split(":")
            if len(parts) != 3:
                raise _err("sweep", f"expected START:STOP:NUM, got {sw!r}")
            try:
                sw = {"start": float(parts[0]), "stop": float(parts[1]), "num": int(parts[2])}
            except ValueError:
                raise _err("sweep", f"expected START:STOP:NUM, got {sw!r}") from None
        if not isinstance(sw, dict) or set(sw) - {"start", "stop", "num"}:
            raise _err("sweep", "expected {start, stop, num}")
        cfg["sweep"] = {"start": _num(sw, "start"), "stop": _num(sw, "stop"),
                        "num": _num(sw, "num", lo=1, integer=True)}
    cfg["eps1"] = _num(data, "eps1", positive=True, optional=True) or ExperimentConfig.eps1
    for key in ("eps2", "eps3"):
        v = data.get(key)
        if v in (None, "off"):
            cfg[key] = None
        else:
            cfg[key] = _num(data, key, positive=True)
    if "closed" in data:
        if not isinstance(data["closed"], bool):
            raise _err("closed", "expected true or false")
        cfg["closed"] = data["closed"]
    if "schedule" in data:
        sch = data["schedule"]
        if not isinstance(sch, list) or not sch:
            raise _err("schedule", "expected a nonempty list")
        cfg["schedule"] = sch
    if data.get("sequence") is not None:
        cfg["sequence"] = _parse_sequence(data["sequence"])
    cfg["tail_start"] = _num(data, "tail_start", lo=0, integer=True, optional=True)
    if "tie_tol" in data:
        cfg["tie_tol"] = _num(data, "tie_tol", lo=0)
    cfg["delta"] = _num(data, "delta", lo=0, optional=True)
    if "metric" in data:
        if data["metric"] not in ("euclidean", "sum"):
            raise _err("metric", "must be 'euclidean' or 'sum'")
        cfg["metric"] = data["metric"]
    if "out" in data:
        if not isinstance(data["out"], str) or not data["out"]:
            raise _err("out", "expected a directory path")
        cfg["out"] = data["out"]
    if "seed" in data:
        cfg["seed"] = _num(data, "seed", integer=True)
    if "workers" in data:
        cfg["workers"] = _num(data, "workers", lo=1, integer=True)

    config = ExperimentConfig(**cfg)
    if mode in ("nash", "approx", "verify") and config.x is None:
        raise _err("x", f"required for mode {mode!r}")
    if mode == "sweep" and config.sweep is None:
        raise _err("sweep", "required for mode 'sweep'")
    if mode == "limits" and config.sequence is None:
        raise _err("sequence", "required for mode 'limits'")
    try:
        config.eps()
        config.eps_schedule()
        get_game(config.game, config.seed)
    except ConfigurationError as e:
        raise _err("eps" if "eps" in str(e) else "game", str(e)) from None
    except TypeError as e:
        raise _err("schedule", str(e)) from None
    if mode == "verify" and not config.tie_tol < config.eps1:
        raise _err("tie_tol", "must be smaller than eps1")
    return config


# ---- execution ----

def _oracle_distance(game_name, pset, x):
    if game_name != "motivating":
        return None
    return hausdorff(pset, oracle_h(float(x)).sample(pset.grid))


def run(config: ExperimentConfig) -> RunManifest:
    """Execute one experiment and write its artifacts."""
    t0 = time.perf_counter()
    game = get_game(config.game, config.seed)
    grid = build_grid(GridSpec.for_boxes(game.boxes, config.grid))
    artifacts = {}
    report = {"mode": config.mode, "game": config.game, "grid": config.grid}
    verdicts = []

    if config.mode == "nash":
        h = nash_set(game, config.x, grid, config.tie_tol)
        report.update(x=config.x, tie_tol=config.tie_tol, count=len(h))
        d = _oracle_distance(config.game, h, config.x)
        if d is not None:
            report["hausdorff_to_oracle"] = d
        artifacts["profiles.csv"] = h.to_csv()
    elif config.mode == "approx":
        s = approx_nash_set(game, config.x, config.eps(), grid, config.closed)
        report.update(x=config.x, eps=config.eps().to_dict(), closed=config.closed, count=len(s))
        artifacts["profiles.csv"] = s.to_csv()
    elif config.mode == "sweep":
        sw = config.sweep
        xs = [float(v) for v in np.linspace(sw["start"], sw["stop"], sw["num"])]
        sets = map_parameters(lambda x: nash_set(game, x, grid, config.tie_tol), xs, config.workers)
        rows = []
        lines = ["x,profile_index," + ",".join(
            f"y_{i + 1}_{k + 1}" for i, d in enumerate(grid.dims) for k in range(d))]
        for x, s in zip(xs, sets):
            row = {"x": x, "count": len(s)}
            d = _oracle_distance(config.game, s, x)
            if d is not None:
                row["hausdorff_to_oracle"] = d
            rows.append(row)
            for idx, c in zip(s.indices, s.coords()):
                lines.append(",".join([format(x, ".17g"), str(int(idx))]
                                      + [format(float(v), ".17g") for v in c]))
        report.update(tie_tol=config.tie_tol, rows=rows)
        artifacts["sweep.csv"] = "\n".join(lines) + "\n"
    elif config.mode == "verify":
        rep = verify_sandwich(game, config.x, config.eps(), grid, config.tie_tol)
        report.update(rep.to_dict())
        verdicts.extend(rep.flags.values())
        artifacts["profiles.csv"] = rep.sets["h"].to_csv()
    elif config.mode == "limits":
        rep = verify_figure1_chain(game, config.parameter_sequence(), config.eps_schedule(), grid,
                                   delta=config.delta, tail_start=config.tail_start,
                                   tie_tol=config.tie_tol, closed=config.closed,
                                   workers=config.workers, metric=config.metric)
        report.update(rep.to_dict())
        verdicts.extend(rep.verdicts.values())
        artifacts["profiles.csv"] = rep.limit_set.to_csv()
        artifacts["trajectory.csv"] = rep.trajectory_csv()

    artifacts["report.json"] = dumps(report)
    exit_code = 0 if all(verdicts) else 2

    os.makedirs(config.out, exist_ok=True)
    files = []
    for name in sorted(artifacts):
        data = artifacts[name].encode("utf-8")
        with open(os.path.join(config.out, name), "wb") as fh:
            fh.write(data)
        files.append({"name": name, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
    manifest = RunManifest(config=asdict(config), version=__version__,
                           wall_clock_seconds=time.perf_counter() - t0, files=files,
                           exit_code=exit_code)
    with open(os.path.join(config.out, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps(manifest.to_dict()))
    return manifest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nash-sens", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", metavar="FILE", help="JSON config; flags override its values")
    p.add_argument("--game", help="motivating | quadratic:SEED:PLAYERS:DIMS")
    p.add_argument("--grid", type=int, help="grid points per axis (default 201)")
    p.add_argument("--x", type=float, help="parameter value")
    p.add_argument("--sweep", help="START:STOP:NUM parameter sweep")
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", help="truncation level or 'off'")
    p.add_argument("--eps3", help="feasibility dilation or 'off'")
    p.add_argument("--closed", action="store_true", default=None,
                   help="use the closed approximate equilibria")
    p.add_argument("--seq", dest="sequence", metavar="KIND:LIMIT:SIDE:COUNT",
                   help="e.g. harmonic:1:above:50")
    p.add_argument("--tail-start", dest="tail_start", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--tie-tol", dest="tie_tol", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--metric", choices=("euclidean", "sum"))
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    return p


def _eps_flag(v):
    if v is None or v == "off":
        return v
    try:
        return float(v)
    except ValueError:
        raise ConfigurationError(f"expected a number or 'off', got {v!r}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        source = None
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                source = fh.read()
        overrides = {k: v for k, v in vars(args).items() if k != "config"}
        overrides["eps2"] = _eps_flag(overrides["eps2"])
        overrides["eps3"] = _eps_flag(overrides["eps3"])
        config = parse_config(source, overrides)
        manifest = run(config)
    except (NashSensError, OSError) as e:
        print(f"nash-sens: error: {e}", file=sys.stderr)
        return 1
    print(f"nash-sens: wrote {len(manifest.files)} artifacts to {config.out}", file=sys.stderr)
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
