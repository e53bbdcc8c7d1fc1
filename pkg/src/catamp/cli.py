"""Command-line front end emitting the protocol's standard data tables.

Subcommands reproduce the headline sweeps as machine-readable CSV or
JSON (success probabilities, squeezing optima, best iteration counts,
purification) and run ad-hoc amplification schedules from a config file.
Everything is deterministic: identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from .detection import DegenerateProbabilityError
from .fock import DEFAULT_CUTOFF, fidelity_mixed
from .protocol import (SOURCE_KINDS, SourceModel, StageParams, amplify_once,
                       best_schedule, mixed_inputs, optimal_squeezing,
                       plan_schedule, run_schedule, success_probability)
from .states import cat_state


class ConfigError(ValueError):
    """Invalid flags, config keys, or parameter values (exit code 1)."""


@dataclass
class RunConfig:
    cutoff: int = DEFAULT_CUTOFF
    eta: float = 1.0
    fmt: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.cutoff < 8:
            raise ConfigError(f"cutoff must be >= 8, got {self.cutoff}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f"eta must lie in [0, 1], got {self.eta}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")


@dataclass
class Table:
    meta: dict
    columns: list
    rows: list


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _unit(value: float) -> float:
    """Clamp round-off excursions so emitted rates stay in [0, 1]."""
    return min(max(float(value), 0.0), 1.0)


def render_csv(table: Table) -> str:
    lines = [f"# {k} = {_fmt(v)}" for k, v in table.meta.items()]
    lines.append(",".join(table.columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def render_json(table: Table) -> str:
    doc = {"meta": table.meta, "columns": table.columns, "rows": table.rows}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(table: Table, cfg: RunConfig) -> None:
    text = render_csv(table) if cfg.fmt == "csv" else render_json(table)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg.out}: {exc}") from exc


def _grid(start: float, stop: float, step: float) -> list:
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


FIG2_GRID = _grid(0.05, 2.5, 0.05)
FIG3_GRID = _grid(0.05, 2.5, 0.05)
FIG4_GRID = _grid(0.5, 2.5, 0.1)
PURIFY_P = [0.4, 0.25, 0.05]


def cmd_fig2(cfg: RunConfig, alpha_grid=None) -> Table:
    """Success probabilities along alpha: closed form and simulation.

    The simulated columns track the closed form at unit efficiency only
    where the conditioning circuit fits the cutoff (alpha <= 1.75 at
    cutoff 30); beyond that they carry truncation artifacts that a higher
    --cutoff removes.
    """
    grid = FIG2_GRID if alpha_grid is None else list(alpha_grid)
    if any(not 0.0 < a <= 2.5 for a in grid):
        raise ConfigError("fig2 grid must lie within (0, 2.5]")
    phases = (("odd_odd", math.pi, math.pi), ("even_even", 0.0, 0.0),
              ("even_odd", 0.0, math.pi))
    rows = []
    for a in grid:
        row = [a]
        row += [_unit(success_probability(a, a, pa, pb)) for _, pa, pb in phases]
        for _, pa, pb in phases:
            stage = StageParams.plan(a, a, pa, pb, eta=cfg.eta)
            res = amplify_once(cat_state(a, pa, cutoff=cfg.cutoff),
                               cat_state(a, pb, cutoff=cfg.cutoff), stage)
            row.append(_unit(res.probability))
        rows.append(row)
    cols = (["alpha"] + [f"p_{n}" for n, _, _ in phases]
            + [f"sim_{n}" for n, _, _ in phases])
    return Table({"command": "fig2", "cutoff": cfg.cutoff, "eta": cfg.eta}, cols, rows)


def cmd_fig3(cfg: RunConfig, alpha_grid=None) -> Table:
    """Best squeezing and maximized odd-cat fidelity along alpha."""
    grid = FIG3_GRID if alpha_grid is None else list(alpha_grid)
    if any(not 0.0 < a <= 2.5 for a in grid):
        raise ConfigError("fig3 grid must lie within (0, 2.5]")
    rows = []
    for a in grid:
        r_star, f_max = optimal_squeezing(a)
        rows.append([a, r_star, _unit(f_max)])
    return Table({"command": "fig3", "cutoff": cfg.cutoff, "eta": cfg.eta},
                 ["alpha", "r_star", "f_max"], rows)


def cmd_fig4(cfg: RunConfig, alpha_grid=None, max_n: int = 6) -> Table:
    """Best iteration count and final fidelity along the target amplitude."""
    grid = FIG4_GRID if alpha_grid is None else list(alpha_grid)
    if any(not 0.0 < a <= 2.5 for a in grid):
        raise ConfigError("fig4 grid must lie within (0, 2.5]")
    source = SourceModel("squeezed-photon")
    rows = []
    for a in grid:
        n_star, f_star = best_schedule(a, max_n=max_n, source=source, cutoff=cfg.cutoff)
        rows.append([a, n_star, _unit(f_star)])
    return Table({"command": "fig4", "cutoff": cfg.cutoff, "eta": cfg.eta,
                  "max_n": max_n},
                 ["alpha_target", "n_star", "f_star"], rows)


def cmd_purify(cfg: RunConfig, p_list=None, alpha_i: float = 0.5) -> Table:
    """Fidelity before and after one iteration for imperfect photon sources."""
    ps = PURIFY_P if p_list is None else list(p_list)
    r_star, _ = optimal_squeezing(alpha_i)
    stage = StageParams.plan(alpha_i, alpha_i, math.pi, math.pi, eta=cfg.eta)
    rows = []
    for p in ps:
        rho = mixed_inputs(SourceModel("mixed-photon", r=r_star, p=p), cutoff=cfg.cutoff)
        f_init = fidelity_mixed(rho, cat_state(alpha_i, math.pi, cutoff=cfg.cutoff))
        res = amplify_once(rho, rho, stage)
        rows.append([p, _unit(f_init), _unit(res.fidelity), _unit(res.probability)])
    return Table({"command": "purify", "cutoff": cfg.cutoff, "eta": cfg.eta,
                  "alpha_i": alpha_i, "r": r_star},
                 ["p", "f_initial", "f_after", "probability"], rows)


def cmd_amplify(cfg: RunConfig, params: dict) -> Table:
    """Run an ad-hoc amplification schedule; one row per stage."""
    alpha_target = params.get("alpha_target")
    if alpha_target is None:
        raise ConfigError("amplify needs alpha_target (config key or flag)")
    n = params.get("iterations", 0)
    kind = params.get("source", "squeezed-photon")
    source = SourceModel(kind, r=params.get("r"), p=params.get("p", 0.0))
    sched = plan_schedule(alpha_target, n, eta=cfg.eta)
    results = run_schedule(sched, source, cutoff=cfg.cutoff)
    rows = []
    for k, res in enumerate(results):
        rows.append([k, res.nominal_target.alpha, res.nominal_target.phi,
                     _unit(res.fidelity), _unit(res.probability), _unit(res.purity),
                     res.leakage_warning if res.leakage_warning is not None else 0.0])
    meta = {"command": "amplify", "cutoff": cfg.cutoff, "eta": cfg.eta,
            "alpha_target": alpha_target, "iterations": n, "source": kind,
            "alpha_i": sched.alpha_i}
    if source.r is not None:
        meta["r"] = source.r
    if source.kind == "mixed-photon":
        meta["p"] = source.p
    return Table(meta, ["stage", "target_alpha", "target_phi", "fidelity",
                        "probability", "purity", "leakage"], rows)


# ---------------------------------------------------------------------------
# Config file and argument handling.
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "cutoff": int,
    "eta": float,
    "format": str,
    "out": str,
    "alpha_target": float,
    "iterations": int,
    "source": str,
    "r": float,
    "p": float,
}


def parse_config(path: str) -> dict:
    """Flat key = value file; unknown keys are errors, not warnings."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    if "source" in values and values["source"] not in SOURCE_KINDS:
        raise ConfigError(f"{path}: source must be one of {SOURCE_KINDS}")
    return values


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 by default; invalid usage is exit 1 here
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", type=int, default=None,
                        help=f"Fock cutoff per mode (default {DEFAULT_CUTOFF})")
    common.add_argument("--eta", type=float, default=None,
                        help="detector quantum efficiency (default 1.0)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default csv)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--config", default=None, help="flat key=value config file")

    parser = _Parser(prog="catamp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fig2", parents=[common],
                   help="success probabilities vs alpha (formula and simulation)")
    sub.add_parser("fig3", parents=[common],
                   help="optimal squeezing and max fidelity vs alpha")
    p4 = sub.add_parser("fig4", parents=[common],
                        help="best iteration count and fidelity vs target amplitude")
    p4.add_argument("--max-n", type=int, default=6, help="largest iteration count tried")
    pa = sub.add_parser("amplify", parents=[common],
                        help="run one schedule from a config file")
    pa.add_argument("--alpha-target", type=float, default=None)
    pa.add_argument("--iterations", type=int, default=None)
    pa.add_argument("--source", choices=SOURCE_KINDS, default=None)
    pa.add_argument("--r", type=float, default=None)
    pa.add_argument("--p", type=float, default=None)
    sub.add_parser("purify", parents=[common],
                   help="purification table for imperfect photon sources")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        file_cfg = parse_config(args.config) if args.config else {}

        def pick(flag, key, default):
            if flag is not None:
                return flag
            return file_cfg.get(key, default)

        cfg = RunConfig(cutoff=pick(args.cutoff, "cutoff", DEFAULT_CUTOFF),
                        eta=pick(args.eta, "eta", 1.0),
                        fmt=pick(args.format, "format", "csv"),
                        out=pick(args.out, "out", None))
        if args.command == "fig2":
            table = cmd_fig2(cfg)
        elif args.command == "fig3":
            table = cmd_fig3(cfg)
        elif args.command == "fig4":
            table = cmd_fig4(cfg, max_n=args.max_n)
        elif args.command == "purify":
            table = cmd_purify(cfg)
        else:
            params = {k: v for k, v in file_cfg.items() if k in
                      ("alpha_target", "iterations", "source", "r", "p")}
            for key in ("alpha_target", "iterations", "source", "r", "p"):
                flag = getattr(args, key)
                if flag is not None:
                    params[key] = flag
            table = cmd_amplify(cfg, params)
        _emit(table, cfg)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DegenerateProbabilityError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
