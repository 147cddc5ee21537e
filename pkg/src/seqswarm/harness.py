"""Experiment sweeps and report tables in the layout of the published results.

Tables are built as plain data (:class:`Table`) and rendered to csv, markdown
or json. Non-dominated rows are marked bold in markdown and with a trailing
``*`` in csv; json carries an explicit ``bold`` matrix.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

from .errors import ConfigError, UnsupportedFormat
from .graph import StateGraph, load_graph
from .objectives import CostVariant, ObjectiveVector, RandPolicy
from .optimizers import (
    PAPER_SWARM_SIZES,
    STANDARD_SEEDS,
    Algorithm,
    RunResult,
    SwarmConfig,
    run,
)
from .pareto import dominates, non_dominated_brute, non_dominated_mask
from .paths import TestSequence

log = logging.getLogger(__name__)

FORMATS = ("csv", "md", "json")
COMPARISON_PAIRS = ((3, 5), (7, 10), (15, 20))
SEQ_COLUMNS = ["Optimal Test Sequences Generated", "Independent paths generated"]


def fmt4(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


@dataclass
class Table:
    name: str
    title: str
    columns: list[str]
    rows: list[list]
    bold: list[list[bool]] = field(default_factory=list)

    def __post_init__(self):
        if not self.bold:
            self.bold = [[False] * len(r) for r in self.rows]

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for row, marks in zip(self.rows, self.bold):
                w.writerow([fmt4(c) + ("*" if b and c is not None else "") for c, b in zip(row, marks)])
            return buf.getvalue()
        if fmt == "md":
            lines = [f"### {self.title}", "",
                     "| " + " | ".join(self.columns) + " |",
                     "|" + "|".join("---" for _ in self.columns) + "|"]
            for row, marks in zip(self.rows, self.bold):
                cells = [f"**{fmt4(c)}**" if b and c is not None else fmt4(c)
                         for c, b in zip(row, marks)]
                lines.append("| " + " | ".join(cells) + " |")
            return "\n".join(lines) + "\n"
        if fmt == "json":
            doc = {"name": self.name, "title": self.title, "columns": self.columns,
                   "rows": self.rows, "bold": self.bold}
            return json.dumps(doc, indent=2) + "\n"
        raise UnsupportedFormat(f"unsupported format {fmt!r}; choose from {FORMATS}")


def flag_non_dominated(vectors: Sequence[ObjectiveVector]) -> list[bool]:
    """Vectorised non-dominance flags, cross-checked against the pairwise loop."""
    fast = [bool(x) for x in non_dominated_mask(vectors)] if vectors else []
    slow = non_dominated_brute(vectors)
    if fast != slow:
        raise AssertionError("non-dominated flags disagree with the brute-force check")
    return fast


# -- single-run emission ------------------------------------------------------

def run_table(result: RunResult) -> Table:
    flags = flag_non_dominated(result.objectives)
    rows = [[str(s), v.priority, v.cost, f] for s, v, f in zip(result.suite, result.objectives, flags)]
    bold = [[f, f, f, False] for f in flags]
    title = f"{result.algorithm.upper()} agents={result.agents} seed={result.seed}"
    return Table(f"run_{result.algorithm}_{result.agents}_{result.seed}", title,
                 ["sequence", "priority", "cost", "non_dominated"], rows, bold)


def emit_table(results: RunResult | Sequence[RunResult], fmt: str) -> str:
    """Serialise one run or a list of runs; byte-stable for fixed input."""
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"unsupported format {fmt!r}; choose from {FORMATS}")
    single = isinstance(results, RunResult)
    batch = [results] if single else list(results)
    if not batch:
        raise ValueError("no results to emit")
    if fmt == "json":
        doc = batch[0].to_dict() if single else [r.to_dict() for r in batch]
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "md":
        return "\n".join(run_table(r).render("md") for r in batch)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    prefix = [] if single else ["algorithm", "agents", "seed"]
    w.writerow(prefix + ["sequence", "priority", "cost", "non_dominated"])
    for r in batch:
        lead = [] if single else [r.algorithm, r.agents, r.seed]
        for s, v, f in zip(r.suite, r.objectives, flag_non_dominated(r.objectives)):
            w.writerow(lead + [str(s), fmt4(v.priority), fmt4(v.cost), str(f).lower()])
    return buf.getvalue()


def parse_run_json(text: str) -> RunResult | list[RunResult]:
    doc = json.loads(text)
    if isinstance(doc, list):
        return [RunResult.from_dict(d) for d in doc]
    return RunResult.from_dict(doc)


# -- experiment sweep ---------------------------------------------------------

@dataclass
class ExperimentSpec:
    graph: str = "atm"
    algorithms: tuple[Algorithm, ...] = tuple(Algorithm)
    sizes: tuple[int, ...] = PAPER_SWARM_SIZES
    seeds: tuple[int, ...] = STANDARD_SEEDS
    rand_policy: RandPolicy = RandPolicy.PAPER
    cost_variant: CostVariant = CostVariant.MAX
    fmt: str = "md"
    out_dir: str | None = None
    max_iterations: int = 200
    jobs: int = 1

    def __post_init__(self):
        self.algorithms = tuple(Algorithm(a) for a in self.algorithms)
        self.sizes = tuple(int(s) for s in self.sizes)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.rand_policy = RandPolicy(self.rand_policy)
        self.cost_variant = CostVariant(self.cost_variant)
        if not self.algorithms or not self.sizes or not self.seeds:
            raise ConfigError("algorithms, swarm sizes and seeds must be non-empty")
        if any(s < 1 for s in self.sizes):
            raise ConfigError("swarm sizes must be positive")
        if self.fmt not in FORMATS:
            raise UnsupportedFormat(f"unsupported format {self.fmt!r}")

    @property
    def paper_mode(self) -> bool:
        return set(self.sizes) <= set(PAPER_SWARM_SIZES) and self.seeds == STANDARD_SEEDS

    def configs(self) -> list[SwarmConfig]:
        return [SwarmConfig(a, size, max_iterations=self.max_iterations, seed=seed,
                            rand_policy=self.rand_policy, cost_variant=self.cost_variant)
                for a in self.algorithms for size in self.sizes for seed in self.seeds]


def _run_one(args):
    g, cfg = args
    return run(g, cfg)


def sweep(g: StateGraph, configs: Sequence[SwarmConfig], jobs: int = 1) -> list[RunResult]:
    """Execute runs; output order follows ``configs`` regardless of ``jobs``."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, [(g, c) for c in configs]))
    return [run(g, c) for c in configs]


@dataclass
class GroupRow:
    sequence: TestSequence
    priority: float
    cost: float


def aggregate(runs: Iterable[RunResult]) -> list[GroupRow]:
    """Per-sequence mean objectives over the runs whose final suite holds it."""
    acc: dict[TestSequence, list[ObjectiveVector]] = {}
    for r in runs:
        for s, v in zip(r.suite, r.objectives):
            acc.setdefault(s, []).append(v)
    return [GroupRow(s, fmean(v.priority for v in acc[s]), fmean(v.cost for v in acc[s]))
            for s in sorted(acc)]


def agent_label(algo: Algorithm, compact: bool = False) -> str:
    if compact:
        return "FF" if algo.firefly else "P"
    return "Fireflies" if algo.firefly else "Particles"


def priority_table(algo: Algorithm, groups: dict[int, list[GroupRow]]) -> Table:
    """Single-objective layout: one priority column per swarm size plus an average row."""
    sizes = sorted(groups)
    lookup = {size: {row.sequence: row.priority for row in groups[size]} for size in sizes}
    seqs = sorted({row.sequence for size in sizes for row in groups[size]})
    # printed layouts differ: "P = 3" for particles, "FF=3" for fireflies
    sep = "=" if algo.firefly else " = "
    columns = SEQ_COLUMNS + [f"{agent_label(algo, True)}{sep}{s}" for s in sizes]
    rows = [[str(q), str(q)] + [lookup[s].get(q) for s in sizes] for q in seqs]
    avg = ["Average Value", ""]
    for s in sizes:
        vals = list(lookup[s].values())
        avg.append(fmean(vals) if vals else None)
    rows.append(avg)
    number = 6 if algo.firefly else 2
    title = f"{algo.value.upper()} path priority by swarm size (layout of Table {number})"
    return Table(f"table{number}_{algo.value}_priority", title, columns, rows)


def _flagged_group(rows: list[GroupRow]):
    vecs = [ObjectiveVector(r.priority, r.cost) for r in rows]
    flags = flag_non_dominated(vecs)
    nd = [v for v, f in zip(vecs, flags) if f]
    avg = ObjectiveVector(fmean(v.priority for v in nd), fmean(v.cost for v in nd)) if nd else None
    return vecs, flags, avg


def objective_table(algo: Algorithm, size: int, rows: list[GroupRow]) -> Table:
    """Bi-objective layout for one swarm size; averages over non-dominated rows only."""
    vecs, flags, avg = _flagged_group(rows)
    out = [[str(r.sequence), str(r.sequence), v.priority, v.cost] for r, v in zip(rows, vecs)]
    bold = [[f] * 4 for f in flags]
    out.append(["Average Values", "", avg.priority if avg else None, avg.cost if avg else None])
    bold.append([False] * 4)
    number = 10 if algo.firefly else 5
    title = (f"Objective Values with {agent_label(algo)} = {size} using {algo.value.upper()} "
             f"(layout of Table {number})")
    return Table(f"table{number}_{algo.value}_{size}", title,
                 SEQ_COLUMNS + ["Path Priority", "Cost"], out, bold)


def comparison_table(number: int, pair: tuple[int, int],
                     groups: dict[tuple[Algorithm, int], list[GroupRow]]) -> Table:
    """MOPSO and MOFA side by side for two swarm sizes."""
    blocks = [(Algorithm.MOPSO, pair[0]), (Algorithm.MOFA, pair[0]),
              (Algorithm.MOPSO, pair[1]), (Algorithm.MOFA, pair[1])]
    columns = ["Sequence"]
    for algo, size in blocks:
        head = f"{algo.value.upper()} {agent_label(algo)}={size}"
        columns += [f"{head} Path Priority", f"{head} Cost"]
    seqs = sorted({r.sequence for b in blocks for r in groups[b]})
    rows = [[str(q)] + [None] * 8 for q in seqs]
    bold = [[False] * 9 for _ in seqs]
    avg_row: list = ["Average Value"]
    index = {q: i for i, q in enumerate(seqs)}
    for k, b in enumerate(blocks):
        _, flags, avg = _flagged_group(groups[b])
        for r, f in zip(groups[b], flags):
            i = index[r.sequence]
            rows[i][1 + 2 * k] = r.priority
            rows[i][2 + 2 * k] = r.cost
            bold[i][1 + 2 * k] = bold[i][2 + 2 * k] = f
        avg_row += [avg.priority, avg.cost] if avg else [None, None]
    rows.append(avg_row)
    bold.append([False] * 9)
    title = f"MOPSO vs MOFA, swarm sizes {pair[0]} and {pair[1]} (layout of Table {number})"
    return Table(f"table{number}_mopso_vs_mofa_{pair[0]}_{pair[1]}", title, columns, rows, bold)


def summary_table(runs: Sequence[RunResult]) -> Table:
    keys = []
    by_key: dict[tuple[str, int], list[RunResult]] = {}
    for r in runs:
        k = (r.algorithm, r.agents)
        if k not in by_key:
            keys.append(k)
        by_key.setdefault(k, []).append(r)
    rows = []
    for algo, size in keys:
        rs = by_key[(algo, size)]
        to_cov = [r.iterations_to_coverage for r in rs if r.iterations_to_coverage is not None]
        rows.append([algo, size, len(rs), sum(r.coverage_complete for r in rs),
                     fmean(len(r.suite) for r in rs), max(len(r.suite) for r in rs),
                     fmean(to_cov) if to_cov else None, fmean(r.iterations for r in rs),
                     fmean(len(r.evaluated) for r in rs)])
    return Table("summary_runs", "Run statistics per algorithm and swarm size",
                 ["algorithm", "agents", "runs", "covered", "mean suite size", "max suite size",
                  "mean iterations to coverage", "mean iterations", "mean distinct sequences evaluated"],
                 rows)


@dataclass
class ComparisonReport:
    tables: dict[str, Table]
    runs: list[RunResult]
    winners: list[dict]
    timing: dict

    @property
    def all_converged(self) -> bool:
        return all(r.coverage_complete for r in self.runs)

    def write(self, out_dir: str | os.PathLike, fmt: str = "md") -> list[Path]:
        """Write every table plus ``runs.json``, ``winners.json`` and ``timing.json``.

        Only ``timing.json`` and the ``wall_time`` fields of ``runs.json``
        vary between identical invocations.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, table in self.tables.items():
            p = out / f"{name}.{fmt}"
            p.write_text(table.render(fmt), encoding="utf-8")
            written.append(p)
        extras = {
            "runs.json": emit_table(self.runs, "json"),
            "winners.json": json.dumps(self.winners, indent=2) + "\n",
            "timing.json": json.dumps(self.timing, indent=2) + "\n",
        }
        for fname, text in extras.items():
            p = out / fname
            p.write_text(text, encoding="utf-8")
            written.append(p)
        return written


def decide_winner(a: ObjectiveVector | None, b: ObjectiveVector | None) -> str:
    if a is None or b is None:
        return "n/a"
    if dominates(a, b):
        return "mopso"
    if dominates(b, a):
        return "mofa"
    if abs(a.priority - b.priority) <= 1e-9 and abs(a.cost - b.cost) <= 1e-9:
        return "tie"
    return "incomparable"


def build_report(runs: Sequence[RunResult], algorithms: Sequence[Algorithm],
                 sizes: Sequence[int]) -> ComparisonReport:
    groups: dict[tuple[Algorithm, int], list[GroupRow]] = {}
    for algo in algorithms:
        for size in sizes:
            groups[(algo, size)] = aggregate(r for r in runs
                                             if r.algorithm == algo.value and r.agents == size)
    tables: dict[str, Table] = {}
    for algo in algorithms:
        if not algo.multi_objective:
            t = priority_table(algo, {s: groups[(algo, s)] for s in sizes})
            tables[t.name] = t
    for algo in algorithms:
        if algo.multi_objective:
            for s in sizes:
                if groups[(algo, s)]:
                    t = objective_table(algo, s, groups[(algo, s)])
                    tables[t.name] = t

    winners = []
    both = Algorithm.MOPSO in algorithms and Algorithm.MOFA in algorithms
    if both:
        for number, pair in zip((11, 12, 13), COMPARISON_PAIRS):
            if all(s in sizes for s in pair):
                t = comparison_table(number, pair, groups)
                tables[t.name] = t
        for s in sizes:
            mo = _flagged_group(groups[(Algorithm.MOPSO, s)])[2] if groups[(Algorithm.MOPSO, s)] else None
            mf = _flagged_group(groups[(Algorithm.MOFA, s)])[2] if groups[(Algorithm.MOFA, s)] else None
            winners.append({
                "agents": s,
                "mopso_nd_average": list(mo) if mo else None,
                "mofa_nd_average": list(mf) if mf else None,
                "winner": decide_winner(mo, mf),
            })
    t = summary_table(runs)
    tables[t.name] = t

    timing = {
        "hardware": f"{platform.machine()} {platform.processor() or ''}".strip(),
        "python": platform.python_version(),
        "mean_wall_time_seconds": {
            a.value: fmean(r.wall_time for r in runs if r.algorithm == a.value)
            for a in algorithms if any(r.algorithm == a.value for r in runs)
        },
    }
    return ComparisonReport(tables, list(runs), winners, timing)


def replicate_paper(spec: ExperimentSpec) -> ComparisonReport:
    """Sweep every algorithm x swarm size x seed and assemble the report tables."""
    if not spec.paper_mode:
        log.info("sweep departs from the standard sizes/seeds protocol")
    g = load_graph(spec.graph)
    runs = sweep(g, spec.configs(), jobs=spec.jobs)
    report = build_report(runs, spec.algorithms, spec.sizes)
    if spec.out_dir:
        report.write(spec.out_dir, spec.fmt)
    return report
