"""Command line entry point: ``seqswarm run|replicate|oracle|validate``.

Exit codes: 0 success, 1 configuration or input error, 2 when any run ends
without full transition coverage (reports are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import SeqSwarmError
from .graph import load_graph, predicate_nodes
from .harness import FORMATS, ExperimentSpec, emit_table, replicate_paper
from .objectives import CostVariant, RandPolicy
from .optimizers import PAPER_SWARM_SIZES, STANDARD_SEEDS, Algorithm, SwarmConfig, run
from .paths import enumerate_all_sequences

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_list(text: str) -> tuple[int, ...]:
    values = _int_list(text)
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def _algo_list(text: str) -> tuple[Algorithm, ...]:
    try:
        return tuple(Algorithm(t.strip()) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown algorithm in {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqswarm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt_default):
        p.add_argument("--graph", default="atm", help="graph JSON file, or 'atm' for the builtin fixture")
        p.add_argument("--iterations", type=_positive, default=200)
        p.add_argument("--rand-policy", choices=[p.value for p in RandPolicy], default="paper")
        p.add_argument("--cost-variant", choices=[c.value for c in CostVariant], default="max")
        p.add_argument("--format", choices=FORMATS, default=fmt_default)
        p.add_argument("--out", metavar="DIR")

    p_run = sub.add_parser("run", help="single optimizer run")
    common(p_run, "json")
    p_run.add_argument("--algo", choices=[a.value for a in Algorithm], default="mopso")
    p_run.add_argument("--agents", type=_positive, default=10)
    p_run.add_argument("--seed", type=int, default=STANDARD_SEEDS[0])

    p_rep = sub.add_parser("replicate", help="full algorithm x swarm size x seed sweep")
    common(p_rep, "md")
    p_rep.add_argument("--algo", type=_algo_list, default=tuple(Algorithm),
                       help="comma-separated subset of pso,mopso,fa,mofa")
    p_rep.add_argument("--agents", type=_positive_list, default=PAPER_SWARM_SIZES,
                       help="comma-separated swarm sizes")
    p_rep.add_argument("--seeds", type=_int_list, default=STANDARD_SEEDS)
    p_rep.add_argument("--jobs", type=_positive, default=1)

    p_or = sub.add_parser("oracle", help="list every simple start-to-exit path")
    p_or.add_argument("--graph", default="atm")
    p_or.add_argument("--format", choices=("text", "json"), default="text")

    p_val = sub.add_parser("validate", help="check a graph document")
    p_val.add_argument("--graph", default="atm")
    return parser


def _configure_logging():
    level = LOG_LEVELS.get(os.environ.get("SEQSWARM_LOG", "error").lower(), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def cmd_run(args) -> int:
    g = load_graph(args.graph)
    cfg = SwarmConfig(args.algo, args.agents, max_iterations=args.iterations, seed=args.seed,
                      rand_policy=args.rand_policy, cost_variant=args.cost_variant)
    result = run(g, cfg)
    text = emit_table(result, args.format)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        target = out / f"run_{cfg.algorithm.value}_{cfg.agents}_{cfg.seed}.{args.format}"
        target.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not result.coverage_complete:
        print(f"seqswarm: coverage incomplete after {result.iterations} iterations", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_replicate(args) -> int:
    spec = ExperimentSpec(graph=args.graph, algorithms=args.algo, sizes=args.agents, seeds=args.seeds,
                          rand_policy=args.rand_policy, cost_variant=args.cost_variant,
                          fmt=args.format, out_dir=args.out or "reports",
                          max_iterations=args.iterations, jobs=args.jobs)
    report = replicate_paper(spec)
    print(f"{len(report.runs)} runs, {len(report.tables)} tables written to {spec.out_dir}")
    for w in report.winners:
        print(f"  agents={w['agents']}: {w['winner']}")
    failed = [r for r in report.runs if not r.coverage_complete]
    if failed:
        for r in failed:
            print(f"seqswarm: {r.algorithm} agents={r.agents} seed={r.seed} did not reach coverage",
                  file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_oracle(args) -> int:
    suite = enumerate_all_sequences(load_graph(args.graph))
    if args.format == "json":
        print(json.dumps([str(s) for s in suite]))
    else:
        for s in suite:
            print(s)
    return EXIT_OK


def cmd_validate(args) -> int:
    g = load_graph(args.graph)
    preds = sorted(predicate_nodes(g))
    print(f"ok: {g.n} nodes, {g.branch_count} edges, {len(preds)} predicate nodes {preds}, "
          f"start={g.start}, exits={sorted(g.exits)}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "replicate": cmd_replicate, "oracle": cmd_oracle, "validate": cmd_validate}


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except (SeqSwarmError, OSError) as exc:
        print(f"seqswarm: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
