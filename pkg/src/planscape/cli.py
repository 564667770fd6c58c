"""Command-line driver: ``analyze``, ``project`` and ``walk``.

Every flag can also come from a JSON config file (``--config``), using the
flag's long name with dashes replaced by underscores; the command line wins.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import PlanscapeError
from .metrics import project, random_walk, repeat_rng
from .space import load_study
from .study import StudyConfig, report_tree, run_study, summary_text

log = logging.getLogger("planscape")

DEFAULTS: dict[str, Any] = {
    "env": [],
    "perf_col": "performance",
    "ignore_cols": [],
    "delimiter": None,
    "agg": None,
    "epsilon": 0.0,
    "walk_len": 50,
    "repeats": 50,
    "seed": 0,
    "alpha": 0.05,
    "partial": False,
    "domains": None,
    "reference": [],
    "jobs": 1,
    "out": None,
    "summary": None,
    "x": None,
    "y": None,
    "count": 1,
}


class CliError(Exception):
    pass


def parse_env(specs: Sequence[str] | dict) -> dict[str, str]:
    """``id=path`` pairs (or bare paths, id = file stem) to an ordered mapping."""
    if isinstance(specs, dict):
        return {str(k): str(v) for k, v in specs.items()}
    envs: dict[str, str] = {}
    for spec in specs:
        env_id, sep, path = spec.partition("=")
        if not sep:
            path, env_id = spec, Path(spec).stem
        if env_id in envs:
            raise CliError(f"duplicate environment id {env_id!r}")
        envs[env_id] = path
    return envs


def _parse_reference(specs: Sequence[str] | dict) -> dict[str, float]:
    if isinstance(specs, dict):
        return {str(k): float(v) for k, v in specs.items()}
    out = {}
    for spec in specs:
        name, sep, value = spec.partition("=")
        if not sep:
            raise CliError(f"reference length must be NAME=VALUE, got {spec!r}")
        out[name] = float(value)
    return out


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--env", action="append", metavar="ID=PATH", help="environment table (repeatable)")
    p.add_argument("--perf-col", help="performance column name (default: performance)")
    p.add_argument("--ignore-cols", action="append", metavar="COL", help="column that is not an option")
    p.add_argument("--delimiter", help="field delimiter (default: sniffed among , ; tab)")
    p.add_argument("--domains", help="JSON file mapping option names to their value labels")
    p.add_argument("--partial", action="store_true", default=None,
                   help="allow incomplete tables; restrict all metrics to measured plans")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planscape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full multi-environment landscape study")
    _common(a)
    a.add_argument("--agg", choices=["mean", "median"], help="duplicate-row aggregation (default: mean)")
    a.add_argument("--epsilon", type=float, help="performance tolerance for optima (default: 0)")
    a.add_argument("--walk-len", type=int, help="random walk length in sampled plans (default: 50)")
    a.add_argument("--repeats", type=int, help="random walks per environment (default: 50)")
    a.add_argument("--alpha", type=float, help="significance level (default: 0.05)")
    a.add_argument("--reference", action="append", metavar="NAME=ELL",
                   help="baseline correlation length echoed into the report (repeatable)")
    a.add_argument("--jobs", type=int, help="threads for per-environment analysis (default: 1)")
    a.add_argument("--summary", help="human-readable summary path (default: OUT with .txt suffix)")

    p = sub.add_parser("project", help="two-option projection of one environment")
    _common(p)
    p.add_argument("--x", help="first option")
    p.add_argument("--y", help="second option")
    p.add_argument("--agg", choices=["mean", "min"], help="cell aggregator (default: mean)")

    w = sub.add_parser("walk", help="emit seeded random-walk traces")
    _common(w)
    w.add_argument("--count", type=int, help="number of walks (default: 1)")
    w.add_argument("--walk-len", type=int, help="sampled plans per walk (default: 50)")
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge built-in defaults, the config file and command-line flags, in that order."""
    opts = dict(DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_opts = json.load(fh)
        unknown = set(file_opts) - set(DEFAULTS)
        if unknown:
            raise CliError(f"unknown keys in config file: {sorted(unknown)}")
        opts.update(file_opts)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            opts[key] = value
    return opts


def _load(opts, aggregation: str = "mean") -> list:
    envs = parse_env(opts["env"])
    if not envs:
        raise CliError("at least one --env is required")
    domains = None
    if opts["domains"]:
        with open(opts["domains"], encoding="utf-8") as fh:
            domains = json.load(fh)
    return load_study(envs, opts["perf_col"], aggregation, opts["ignore_cols"],
                      opts["delimiter"], domains, bool(opts["partial"]))


def cmd_analyze(opts: dict[str, Any]) -> int:
    if not opts["out"]:
        raise CliError("--out is required")
    domains = None
    if opts["domains"]:
        with open(opts["domains"], encoding="utf-8") as fh:
            domains = json.load(fh)
    config = StudyConfig(
        environments=parse_env(opts["env"]),
        perf_col=opts["perf_col"],
        ignore_cols=tuple(opts["ignore_cols"]),
        delimiter=opts["delimiter"],
        aggregation=opts["agg"] or "mean",
        epsilon=float(opts["epsilon"]),
        walk_length=int(opts["walk_len"]),
        repeats=int(opts["repeats"]),
        seed=int(opts["seed"]),
        alpha=float(opts["alpha"]),
        partial=bool(opts["partial"]),
        domains=domains,
        reference_lengths=_parse_reference(opts["reference"]),
        jobs=int(opts["jobs"]),
    )
    if not config.environments:
        raise CliError("at least one --env is required")
    result = run_study(config)
    out = Path(opts["out"])
    out.write_text(json.dumps(report_tree(result), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    summary = Path(opts["summary"]) if opts["summary"] else out.with_suffix(".txt")
    summary.write_text(summary_text(result), encoding="utf-8")
    log.info("wrote %s and %s", out, summary)
    return 0


def cmd_project(opts: dict[str, Any]) -> int:
    if not (opts["out"] and opts["x"] and opts["y"]):
        raise CliError("--x, --y and --out are required")
    # --agg here is the cell aggregator; duplicate rows are always averaged
    landscapes = _load(opts)
    if len(landscapes) != 1:
        raise CliError("project takes exactly one --env")
    cells = project(landscapes[0], opts["x"], opts["y"], opts["agg"] or "mean")
    with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value_a", "value_b", "aggregate"])
        for c in cells:
            writer.writerow([c.value_a, c.value_b, repr(c.aggregate)])
    return 0


def cmd_walk(opts: dict[str, Any]) -> int:
    if not opts["out"]:
        raise CliError("--out is required")
    landscapes = _load(opts, opts["agg"] or "mean")
    if len(landscapes) != 1:
        raise CliError("walk takes exactly one --env")
    ls = landscapes[0]
    space = ls.space
    seed = int(opts["seed"])
    with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["walk", "step", "plan_index", *space.names, "performance"])
        for k in range(int(opts["count"])):
            walk = random_walk(ls, int(opts["walk_len"]), repeat_rng(seed, k), seed=seed)
            for step, (idx, value) in enumerate(walk.trace):
                writer.writerow([k, step, idx, *space.labels(space.index_to_plan(idx)), repr(value)])
    return 0


COMMANDS = {"analyze": cmd_analyze, "project": cmd_project, "walk": cmd_walk}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](resolve(args))
    except (PlanscapeError, CliError, OSError, ValueError) as exc:
        print(f"planscape {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
