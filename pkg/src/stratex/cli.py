"""Command-line runner: generate, psro, mrcp, eval, reproduce.

Every command reads one JSON config (``--config``) and writes into ``--out``.
Exit codes: 0 success, 1 usage or config error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import experiments
from .evaluation import (
    as_solver,
    combined_game_eval,
    consistency_report,
    curves_to_csv,
    regret_against,
    regret_curve,
    select_eval_solver,
)
from .game import InfeasibleFloorError, NormalFormGame, load_game, save_game
from .games import GameSpec, sample_subgame
from .lp import LPError
from .mrcp import AmoebaParams, compute_mrcp
from .psro import PsroError, PsroTrace, run_psro, trace_from_dict, trace_to_csv, trace_to_dict
from .restriction import restrict
from .solvers import MetaSolver, UnsupportedGameError, make_solver, nash_lp

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    """Bad command line or config; the message names the offending field."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ------------------------------------------------------------------ config


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _load_config(path: str | None) -> dict:
    if path is None:
        raise UsageError("--config is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file {path} does not exist")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    doc.setdefault("_base", str(p.parent))
    return doc


def _field(doc: dict, name: str, default: Any = ..., kind: type | tuple | None = None):
    if name not in doc:
        if default is ...:
            raise UsageError(f"config field '{name}' is missing")
        return default
    value = doc[name]
    if kind is not None and not isinstance(value, kind):
        raise UsageError(f"config field '{name}' has the wrong type")
    return value


def build_game(ref, base: str = ".") -> NormalFormGame:
    """A game from a GameSpec dict or a path to a saved game file."""
    if isinstance(ref, str):
        path = Path(ref)
        if not path.is_absolute():
            path = Path(base) / path
        if not path.is_file():
            raise UsageError(f"config field 'game': file {ref} does not exist")
        return load_game(path)
    if isinstance(ref, dict):
        try:
            return GameSpec(**ref).build()
        except (TypeError, ValueError) as exc:
            raise UsageError(f"config field 'game': {exc}") from exc
    raise UsageError("config field 'game' must be a spec object or a file path")


@dataclass
class ExperimentConfig:
    game: Any
    mss: list[MetaSolver]
    seeds: list[int]
    iterations: int
    initial_strategy: Any = "random_per_seed"
    eval_solvers: list = field(default_factory=lambda: ["nash"])
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        game = build_game(_field(doc, "game"), doc.get("_base", "."))
        mss_raw = _field(doc, "mss", kind=list)
        if not mss_raw:
            raise UsageError("config field 'mss' must be a non-empty list")
        try:
            mss = [make_solver(m) for m in mss_raw]
        except (TypeError, ValueError) as exc:
            raise UsageError(f"config field 'mss': {exc}") from exc
        seeds = _field(doc, "seeds", kind=list)
        if not seeds or not all(isinstance(s, int) and s >= 0 for s in seeds):
            raise UsageError("config field 'seeds' must be a non-empty list of non-negative ints")
        iterations = _field(doc, "iterations", kind=int)
        if iterations < 1:
            raise UsageError("config field 'iterations' must be >= 1")
        init = doc.get("initial_strategy", "random_per_seed")
        if init != "random_per_seed":
            k = init.get("fixed_index") if isinstance(init, dict) else None
            if not isinstance(k, int) or not 0 <= k < min(game.strategy_counts):
                raise UsageError(
                    "config field 'initial_strategy' must be 'random_per_seed' "
                    "or {\"fixed_index\": k} with k in range"
                )
        evals = _field(doc, "eval_solvers", ["nash"], list)
        try:
            for e in evals:
                as_solver(e)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"config field 'eval_solvers': {exc}") from exc
        return cls(game, mss, list(seeds), iterations, init, evals, doc)

    def initial_indices(self) -> tuple[int, ...] | None:
        if self.initial_strategy == "random_per_seed":
            return None
        return (self.initial_strategy["fixed_index"],) * self.game.num_players


def _prepare_out(out: str | None, overwrite: bool) -> Path:
    if out is None:
        raise UsageError("--out is required")
    path = Path(out)
    if path.exists() and any(path.iterdir()):
        if not overwrite:
            raise UsageError(f"output directory {out} is not empty; pass --overwrite")
        shutil.rmtree(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"wrote {path}")


def _seed_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"--seed-list must be comma-separated integers: {text}") from exc
    if not seeds or any(s < 0 for s in seeds):
        raise UsageError("--seed-list must list non-negative integers")
    return seeds


def _header(doc: dict) -> str:
    clean = {k: v for k, v in doc.items() if not k.startswith("_")}
    return f"config_hash={config_hash(clean)}"


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    doc = _load_config(args.config)
    spec = doc.get("game", {k: v for k, v in doc.items() if not k.startswith("_")})
    game = build_game(spec, doc["_base"])
    out = _prepare_out(args.out, args.overwrite)
    save_game(game, out / "game.json")
    print(f"strategy_counts={list(game.strategy_counts)} zero_sum={game.zero_sum}")
    return EXIT_OK


def _psro_job(job) -> PsroTrace:
    game, mss, init, iterations, seed, run_id = job
    return run_psro(game, mss, init, iterations, seed=seed, run_id=run_id)


def cmd_psro(args) -> int:
    doc = _load_config(args.config)
    cfg = ExperimentConfig.from_dict(doc)
    cfg.seeds = _seed_list(args.seed_list) or cfg.seeds
    out = _prepare_out(args.out, args.overwrite)
    header = _header({**doc, "seeds": cfg.seeds})
    names = [m.name for m in cfg.mss]
    tags = [n if names.count(n) == 1 else f"{n}{k}" for k, n in enumerate(names)]
    jobs = [(cfg.game, m, cfg.initial_indices(), cfg.iterations, s, f"{tag}-seed{s}")
            for m, tag in zip(cfg.mss, tags) for s in cfg.seeds]
    traces = experiments.parallel_map(_psro_job, jobs, args.workers)
    save_game(cfg.game, out / "game.json")
    (out / "traces").mkdir()
    curves = []
    for t in traces:
        doc_t = trace_to_dict(t, game_ref="game.json")
        doc_t["config_hash"] = header.split("=")[1]
        (out / "traces" / f"{t.run_id}.json").write_text(json.dumps(doc_t))
        (out / "traces" / f"{t.run_id}.csv").write_text(f"# {header}\n" + trace_to_csv(t))
        curves += [regret_curve(t, e) for e in cfg.eval_solvers]
    _write(out / "curves.csv", curves_to_csv(curves, header))
    return EXIT_OK


def load_traces(directory: str | Path) -> list[PsroTrace]:
    """Traces written by ``psro``; the game is read from the run directory."""
    root = Path(directory)
    if not (root / "traces").is_dir():
        raise UsageError(f"{root} does not contain a traces directory")
    game = load_game(root / "game.json")
    return [trace_from_dict(json.loads(p.read_text()), game)
            for p in sorted((root / "traces").glob("*.json"))]


MRCP_FIELDS = ("size", "instance", "method", "objective", "regret", "objective_value", "evaluations")


def cmd_mrcp(args) -> int:
    doc = _load_config(args.config)
    game = build_game(_field(doc, "game"), doc["_base"])
    try:
        params = AmoebaParams(**doc.get("params", {}))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config field 'params': {exc}") from exc
    objective = doc.get("objective", "sum")
    out = _prepare_out(args.out, args.overwrite)
    table = experiments.Table("mrcp", MRCP_FIELDS)
    if doc.get("mode", "single") == "compare":
        sizes = _field(doc, "sizes", kind=list)
        instances = _field(doc, "instances", 5, int)
        seed_base = _field(doc, "seed_base", 1000, int)
        for size in sizes:
            for inst in range(instances):
                emp = sample_subgame(game, size, seed=seed_base + 10 * size + inst)
                for method in ("projected", "binary_search"):
                    r = compute_mrcp(emp, method, objective, params)
                    table.rows.append((size, inst, method, objective, r.regret,
                                       r.objective_value, r.evaluations))
                ne = regret_against(emp, nash_lp(emp))
                table.rows.append((size, inst, "ne", "sum", ne, ne, 0))
    else:
        indices = _field(doc, "indices", kind=list)
        try:
            emp = restrict(game, indices)
        except (TypeError, ValueError, IndexError) as exc:
            raise UsageError(f"config field 'indices': {exc}") from exc
        method = doc.get("method", "projected")
        try:
            r = compute_mrcp(emp, method, objective, params, doc.get("grid_step", 0.01))
        except ValueError as exc:
            raise UsageError(f"config field 'method'/'objective': {exc}") from exc
        table.rows.append((max(emp.strategy_counts), 0, method, objective, r.regret,
                           r.objective_value, r.evaluations))
        profile = {"profile": [s.tolist() for s in r.profile], "regret": r.regret}
        (out / "profile.json").write_text(json.dumps(profile))
    _write(out / "mrcp.csv", table.to_csv(_header(doc)))
    return EXIT_OK


def cmd_eval(args) -> int:
    doc = _load_config(args.config)
    traces_dir = Path(_field(doc, "traces", kind=str))
    if not traces_dir.is_absolute():
        traces_dir = Path(doc["_base"]) / traces_dir
    traces = load_traces(traces_dir)
    mode = _field(doc, "mode", kind=str)
    out = _prepare_out(args.out, args.overwrite)
    header = _header(doc)
    lines = []
    if mode == "consistency":
        a, b = _field(doc, "mss_a", kind=str), _field(doc, "mss_b", kind=str)
        runs_a = [t for t in traces if t.mss.name == a]
        runs_b = [t for t in traces if t.mss.name == b]
        if not runs_a or not runs_b:
            raise UsageError("config fields 'mss_a'/'mss_b' match no stored traces")
        report = consistency_report(runs_a, runs_b, doc.get("eval_solver", "nash"))
        lines += [f"{k}: {'consistent' if ok else 'DISAGREE'}" for k, ok in report.consistency_ok.items()]
        lines += [f"iteration {it}: {x} vs {y} ordered differently" for it, x, y in report.disagreements]
    elif mode == "select":
        candidates = _field(doc, "candidates", kind=list)
        choices = select_eval_solver(traces, candidates, doc.get("phase_length"))
        lines += [f"iterations {c.start}-{c.end}: {c.solver}" for c in choices]
        report = None
        curves = [regret_curve(t, c) for t in traces for c in candidates]
        _write(out / "curves.csv", curves_to_csv(curves, header))
    elif mode == "combined":
        report = combined_game_eval(traces, doc.get("eval_solver", "nash"))
        lines += [f"{k}: {'agree' if ok else 'DISAGREE'}" for k, ok in report.consistency_ok.items()]
    else:
        raise UsageError("config field 'mode' must be consistency, select or combined")
    if report is not None:
        _write(out / "curves.csv", curves_to_csv(report.curves, header))
    _write(out / "summary.txt", f"# {header}\n" + "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


REPRODUCE_TARGETS = ("table2", "table7", "example1", "example2", "fig3",
                     "table3_shape", "table45_shape", "combined")


def cmd_reproduce(args) -> int:
    doc = _load_config(args.config) if args.config else {}
    out = _prepare_out(args.out, args.overwrite)
    kwargs = {k: v for k, v in doc.items() if not k.startswith("_")}
    seeds = _seed_list(args.seed_list)
    if seeds is not None:
        kwargs["seeds"] = seeds
    if args.target in ("example2", "fig3", "combined"):
        kwargs["workers"] = args.workers
    try:
        table = experiments.RECIPES[args.target](**kwargs)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {args.target}: {exc}") from exc
    header = f"target={args.target} " + _header({"target": args.target, **kwargs})
    _write(out / f"{args.target}.csv", table.to_csv(header))
    for k, v in table.summary.items():
        if isinstance(v, (int, float, bool, str)):
            print(f"{k}: {v}")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stratex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, workers=False, seeds=False):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--overwrite", action="store_true", help="replace a non-empty output directory")
        if workers:
            p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        if seeds:
            p.add_argument("--seed-list", help="comma-separated seeds overriding the config")

    common(sub.add_parser("generate", help="build a game and save it as JSON"))
    common(sub.add_parser("psro", help="run PSRO for every (mss, seed)"), workers=True, seeds=True)
    common(sub.add_parser("mrcp", help="compute MRCP for an empirical game"))
    common(sub.add_parser("eval", help="evaluate stored PSRO traces"))
    rep = sub.add_parser("reproduce", help="run a canned experiment recipe")
    rep.add_argument("target", choices=REPRODUCE_TARGETS)
    common(rep, workers=True, seeds=True)
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "psro": cmd_psro,
    "mrcp": cmd_mrcp,
    "eval": cmd_eval,
    "reproduce": cmd_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LPError, PsroError, InfeasibleFloorError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except UnsupportedGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
