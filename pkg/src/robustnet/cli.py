"""Command-line surface.

Subcommands: gen-graphs (seeded scale-free instances + manifest), eval-r
(print R for an edge-list file), optimize (repeated seeded runs of one
heuristic, CSV + JSON run record), evolve (run/resume the evolutionary
search from a JSON config), bench (benchmark grid over settings x algorithms).

Exit codes: 0 success, 2 configuration error, 3 input parse error, 4 backend
failure.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import replace
from pathlib import Path

from .dsl import DslParseError, parse as parse_program
from .errors import ConfigError
from .evolve import BackendConfig, EvolutionConfig, TrainingSpec, run_evolution
from .graph import BaParams, EdgeListError, Graph, generate_ba, read_edge_list, write_edge_list
from .heuristics import DEFAULT_ANNEAL, AnnealParams, OptimizerOutcome, run_optimizer
from .interpreter import interpret
from .llm import BackendError, TaskSpec
from .robustness import robustness_r

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_BACKEND = 4


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _aggregate(finals: list[float]) -> dict:
    return {
        "best": max(finals),
        "worst": min(finals),
        "mean": statistics.fmean(finals),
        "variance": statistics.variance(finals) if len(finals) > 1 else 0.0,
    }


def _load_graph(path: str) -> Graph:
    return read_edge_list(path)


def _resolve_heuristic(name: str):
    """Returns (label, runner) where runner(graph, budget, seed, anneal)."""
    if name.startswith("dsl:"):
        path = Path(name[4:])
        program = parse_program(path.read_text(encoding="utf-8"))

        def runner(g, budget, seed, anneal):
            return interpret(program, g, budget, seed)

        return f"dsl:{path.name}", runner

    def runner(g, budget, seed, anneal):
        return run_optimizer(name, g, budget, seed, anneal)

    return name, runner


def cmd_gen_graphs(args) -> int:
    params_base = dict(n=args.n, n0=args.n0, m0=args.m0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files, seeds = [], []
    for i in range(args.count):
        seed = args.seed + i
        g = generate_ba(BaParams(seed=seed, **params_base))
        name = f"ba_n{args.n}_n0{args.n0}_m{args.m0}_{i}.el"
        write_edge_list(g, out_dir / name)
        files.append(name)
        seeds.append(seed)
    manifest = {"params": params_base, "seed": args.seed, "seeds": seeds, "files": files}
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(files)} graphs and manifest.json to {out_dir}")
    return EXIT_OK


def cmd_eval_r(args) -> int:
    g = _load_graph(args.graph)
    print(_fmt(robustness_r(g)))
    return EXIT_OK


def _run_series(label: str, runner, g: Graph, budget: int, runs: int,
                seed_base: int, anneal: AnnealParams) -> dict:
    initial_r = robustness_r(g)
    rows = []
    for i in range(runs):
        seed = seed_base + i
        started = time.perf_counter()
        out: OptimizerOutcome = runner(g, budget, seed, anneal)
        rows.append({
            "run": i,
            "seed": seed,
            "initial_r": initial_r,
            "final_r": out.final_r,
            "evaluations": out.evaluations_used,
            "accepted": out.accepted_moves,
            "wall_time_s": time.perf_counter() - started,
        })
    record = {
        "heuristic": label,
        "budget": budget,
        "runs": runs,
        "seed_base": seed_base,
        "initial_r": initial_r,
        "rows": rows,
        "aggregate": _aggregate([r["final_r"] for r in rows]),
    }
    return record


def _write_run_record(record: dict, out_prefix: Path) -> None:
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{out_prefix}.csv", "w", encoding="utf-8") as fh:
        fh.write("run,seed,initial_r,final_r,evaluations,accepted,wall_time_s\n")
        for r in record["rows"]:
            fh.write(f"{r['run']},{r['seed']},{_fmt(r['initial_r'])},{_fmt(r['final_r'])},"
                     f"{r['evaluations']},{r['accepted']},{r['wall_time_s']:.3f}\n")
        agg = record["aggregate"]
        fh.write(f"aggregate,,,{_fmt(agg['mean'])},,,\n")
    with open(f"{out_prefix}.json", "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_optimize(args) -> int:
    if args.runs < 1:
        raise ConfigError(f"--runs must be >= 1, got {args.runs}")
    if args.budget < 1:
        raise ConfigError(f"--budget must be >= 1, got {args.budget}")
    label, runner = _resolve_heuristic(args.heuristic)
    g = _load_graph(args.graph)
    anneal = AnnealParams(args.t0, args.alpha)
    record = _run_series(label, runner, g, args.budget, args.runs, args.seed, anneal)
    record["graph"] = args.graph
    record["graph_nodes"] = g.node_count
    record["graph_edges"] = g.edge_count
    out_prefix = Path(args.out) if args.out else Path(args.graph).with_suffix("") \
        .with_name(Path(args.graph).stem + f"_{label.replace(':', '_')}")
    _write_run_record(record, out_prefix)
    agg = record["aggregate"]
    print(f"{label}: initial={_fmt(record['initial_r'])} mean={_fmt(agg['mean'])} "
          f"best={_fmt(agg['best'])} worst={_fmt(agg['worst'])} "
          f"variance={agg['variance']:.6g} -> {out_prefix}.csv/.json")
    return EXIT_OK


def _evolution_config_from_json(data: dict) -> EvolutionConfig:
    kwargs = dict(data)
    if "training" in kwargs:
        t = kwargs["training"]
        kwargs["training"] = TrainingSpec(
            sizes=tuple(t.get("sizes", (50, 100))),
            m0_values=tuple(t.get("m0_values", (2, 3, 4, 5))),
            instances=t.get("instances", 3),
            n0=t.get("n0", 3),
        )
    if "backend" in kwargs:
        kwargs["backend"] = BackendConfig(**kwargs["backend"])
    if "task" in kwargs:
        kwargs["task"] = TaskSpec(**kwargs["task"])
    return EvolutionConfig(**kwargs)


def cmd_evolve(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        config = _evolution_config_from_json(data)
    except TypeError as exc:
        raise ConfigError(f"bad config key: {exc}") from exc
    if args.out_dir:
        config = replace(config, out_dir=args.out_dir)
    if config.out_dir is None:
        raise ConfigError("evolve needs an output directory (config out_dir or --out-dir)")
    best, stats = run_evolution(config, resume=args.resume)
    print(f"best fitness {best.fitness!r} (individual {best.id}, "
          f"born generation {best.birth_generation}); outputs in {config.out_dir}")
    return EXIT_OK


def cmd_bench(args) -> int:
    path = Path(args.spec)
    if not path.exists():
        raise ConfigError(f"bench spec not found: {path}")
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bench spec is not valid JSON: {exc}") from exc
    budget = spec.get("budget", 30000)
    runs = spec.get("runs", 10)
    seed_base = spec.get("seed_base", 0)
    algorithms = spec.get("algorithms", ["hc", "sa", "sr", "v1", "v2", "v3"])
    anneal = AnnealParams(spec.get("t0", DEFAULT_ANNEAL.t0),
                          spec.get("alpha", DEFAULT_ANNEAL.alpha))
    settings = spec.get("settings")
    if not settings:
        raise ConfigError("bench spec needs a non-empty 'settings' list")
    out_path = Path(args.out) if args.out else path.with_suffix(".results.csv")
    lines = ["setting,algorithm,runs,budget,initial_r,best,worst,average,variance"]
    for setting in settings:
        label = setting.get("label") or setting.get("graph_file") or "setting"
        if "graph_file" in setting:
            g = _load_graph(setting["graph_file"])
        else:
            g = generate_ba(BaParams(n=setting["n"], n0=setting.get("n0", 3),
                                     m0=setting.get("m0", 2),
                                     seed=setting.get("graph_seed", 0)))
        for alg in algorithms:
            alg_label, runner = _resolve_heuristic(alg)
            record = _run_series(alg_label, runner, g, budget, runs, seed_base, anneal)
            agg = record["aggregate"]
            lines.append(
                f"{label},{alg_label},{runs},{budget},{_fmt(record['initial_r'])},"
                f"{_fmt(agg['best'])},{_fmt(agg['worst'])},{_fmt(agg['mean'])},"
                f"{agg['variance']:.6g}")
            print(lines[-1])
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustnet",
        description="Optimize networks for robustness against targeted attacks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graphs", help="generate seeded scale-free graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n0", type=int, default=3)
    p.add_argument("--m0", type=int, default=2)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen_graphs)

    p = sub.add_parser("eval-r", help="print the robustness score of a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_eval_r)

    p = sub.add_parser("optimize", help="run one heuristic repeatedly on a graph")
    p.add_argument("graph")
    p.add_argument("--heuristic", required=True,
                   help="v1|v2|v3|hc|sa|sr or dsl:<program file>")
    p.add_argument("--budget", type=int, default=30000)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="seed of the first run")
    p.add_argument("--t0", type=float, default=DEFAULT_ANNEAL.t0)
    p.add_argument("--alpha", type=float, default=DEFAULT_ANNEAL.alpha)
    p.add_argument("--out", help="output prefix for .csv/.json")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evolve", help="run the evolutionary heuristic search")
    p.add_argument("--config", required=True, help="JSON evolution config")
    p.add_argument("--out-dir", help="override the config's output directory")
    p.add_argument("--resume", action="store_true",
                   help="continue from the last completed generation")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("bench", help="benchmark algorithms over graph settings")
    p.add_argument("--spec", required=True, help="JSON bench specification")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EdgeListError, DslParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BackendError as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
