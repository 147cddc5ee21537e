"""PSO, MOPSO, FA and MOFA drivers over the discrete space of test sequences.

Each agent carries a per-edge bias matrix. Until the suite covers every
transition, agents walk on the shared guidance matrix alone. After that, walks
sample with weight ``guidance * bias`` and the swarm moves by updating bias
matrices: PSO uses an indicator-vector velocity toward the personal and
global best paths, FA uses attraction toward brighter agents.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigError
from .graph import StateGraph, adjacency_matrix, init_guidance
from .objectives import (
    CostVariant,
    ObjectiveVector,
    PriorityContext,
    RandPolicy,
    oracle_cost,
    path_priority,
)
from .pareto import DEFAULT_CAPACITY, ParetoArchive, dominates
from .paths import (
    PathSuite,
    TestSequence,
    accept_into_suite,
    coverage_complete,
    decay_guidance,
    draw_sequence,
    prune_redundant,
)

log = logging.getLogger(__name__)

BIAS_MIN = 0.01
BIAS_MAX = 100.0
STANDARD_SEEDS = (11, 23, 37, 53, 71)
PAPER_SWARM_SIZES = (3, 5, 7, 10, 15, 20)


class Algorithm(str, enum.Enum):
    PSO = "pso"
    MOPSO = "mopso"
    FA = "fa"
    MOFA = "mofa"

    @property
    def multi_objective(self) -> bool:
        return self in (Algorithm.MOPSO, Algorithm.MOFA)

    @property
    def firefly(self) -> bool:
        return self in (Algorithm.FA, Algorithm.MOFA)


@dataclass(frozen=True)
class PSOParams:
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5


@dataclass(frozen=True)
class FAParams:
    beta0: float = 1.0
    gamma: float = 1.0
    alpha: float = 0.2
    decay: float = 0.97


@dataclass(frozen=True)
class SwarmConfig:
    algorithm: Algorithm
    agents: int
    max_iterations: int = 200
    seed: int = STANDARD_SEEDS[0]
    rand_policy: RandPolicy = RandPolicy.PAPER
    cost_variant: CostVariant = CostVariant.MAX
    pso: PSOParams = PSOParams()
    fa: FAParams = FAParams()
    stagnation: int = 20
    archive_capacity: int = DEFAULT_CAPACITY

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "rand_policy", RandPolicy(self.rand_policy))
        object.__setattr__(self, "cost_variant", CostVariant(self.cost_variant))
        if int(self.agents) < 1:
            raise ConfigError(f"agents must be a positive integer, got {self.agents}")
        if int(self.max_iterations) < 1:
            raise ConfigError("max_iterations must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        coeffs = [*vars(self.pso).values(), *vars(self.fa).values()]
        if any(c < 0 for c in coeffs):
            raise ConfigError("swarm coefficients must be non-negative")


@dataclass
class AgentState:
    bias: np.ndarray
    velocity: np.ndarray
    current: TestSequence | None = None
    personal_best: TestSequence | None = None
    best_fitness: Any = None


@dataclass
class RunResult:
    algorithm: str
    agents: int
    seed: int
    suite: list[TestSequence]
    objectives: list[ObjectiveVector]
    archive: list[tuple[TestSequence, ObjectiveVector]]
    trace: list[float]
    iterations: int
    iterations_to_coverage: int | None
    coverage_complete: bool
    evaluated: list[TestSequence]
    rand_policy: str = RandPolicy.PAPER.value
    cost_variant: str = CostVariant.MAX.value
    wall_time: float = 0.0

    @property
    def converged(self) -> bool:
        return self.coverage_complete

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "agents": self.agents,
            "seed": self.seed,
            "rand_policy": self.rand_policy,
            "cost_variant": self.cost_variant,
            "coverage_complete": self.coverage_complete,
            "iterations": self.iterations,
            "iterations_to_coverage": self.iterations_to_coverage,
            "suite": [
                {"sequence": str(s), "priority": v.priority, "cost": v.cost}
                for s, v in zip(self.suite, self.objectives)
            ],
            "archive": [
                {"sequence": str(s), "priority": v.priority, "cost": v.cost}
                for s, v in self.archive
            ],
            "evaluated": [str(s) for s in self.evaluated],
            "trace": list(self.trace),
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        def pairs(rows):
            return [(TestSequence.parse(r["sequence"]), ObjectiveVector(r["priority"], r["cost"]))
                    for r in rows]

        suite = pairs(d["suite"])
        return cls(
            algorithm=d["algorithm"],
            agents=d["agents"],
            seed=d["seed"],
            suite=[s for s, _ in suite],
            objectives=[v for _, v in suite],
            archive=pairs(d["archive"]),
            trace=list(d["trace"]),
            iterations=d["iterations"],
            iterations_to_coverage=d["iterations_to_coverage"],
            coverage_complete=d["coverage_complete"],
            evaluated=[TestSequence.parse(s) for s in d["evaluated"]],
            rand_policy=d.get("rand_policy", RandPolicy.PAPER.value),
            cost_variant=d.get("cost_variant", CostVariant.MAX.value),
            wall_time=d.get("wall_time", 0.0),
        )


def indicator(seq: TestSequence, n: int) -> np.ndarray:
    ind = np.zeros((n, n))
    for a, b in seq.edges():
        ind[a - 1, b - 1] = 1.0
    return ind


def hamming(ind_a: np.ndarray, ind_b: np.ndarray, n_edges: int) -> float:
    """Share of graph edges on which two path indicators differ, in [0, 1]."""
    return float(np.count_nonzero(ind_a != ind_b)) / n_edges


def clamp_bias(bias: np.ndarray, edge_mask: np.ndarray) -> np.ndarray:
    return np.where(edge_mask, np.clip(bias, BIAS_MIN, BIAS_MAX), 0.0)


def pso_velocity(agent: AgentState, guide: np.ndarray, params: PSOParams,
                 edge_mask: np.ndarray, rng) -> None:
    """In-place velocity and bias update toward personal best and ``guide`` indicators."""
    n = edge_mask.shape[0]
    cur = indicator(agent.current, n)
    pb = indicator(agent.personal_best, n)
    r1 = rng.random((n, n))
    r2 = rng.random((n, n))
    v = (params.inertia * agent.velocity
         + params.cognitive * r1 * (pb - cur)
         + params.social * r2 * (guide - cur))
    agent.velocity = np.where(edge_mask, v, 0.0)
    agent.bias = clamp_bias(agent.bias + agent.velocity, edge_mask)


def firefly_step(biases: list[np.ndarray], indicators: list[np.ndarray],
                 brightness, params: FAParams, alpha: float,
                 edge_mask: np.ndarray, rng) -> list[np.ndarray]:
    """One attraction sweep; returns new bias matrices.

    Agent ``i`` moves toward every strictly brighter agent ``j`` by
    ``beta0 * exp(-gamma * r**2) * (ind_j - ind_i)``, ``r`` the normalised
    Hamming distance between their paths, then takes one random step scaled
    by ``alpha``.
    """
    n_edges = int(edge_mask.sum())
    n = edge_mask.shape[0]
    out = []
    for i, bias in enumerate(biases):
        step = np.zeros_like(bias)
        for j in range(len(biases)):
            if brightness[j] > brightness[i]:
                r = hamming(indicators[i], indicators[j], n_edges)
                beta = params.beta0 * np.exp(-params.gamma * r * r)
                step += beta * (indicators[j] - indicators[i])
        if alpha > 0:
            step += alpha * (rng.random((n, n)) - 0.5)
        out.append(clamp_bias(bias + step, edge_mask))
    return out


def scalarize(vectors, lam: float) -> np.ndarray:
    """``lam * norm(priority) - (1 - lam) * norm(cost)`` with min-max scaling
    over the given population; a flat objective normalises to 0.5."""
    arr = np.asarray(vectors, dtype=float).reshape(-1, 2)

    def norm(col):
        lo, hi = col.min(), col.max()
        if hi - lo <= 0:
            return np.full_like(col, 0.5)
        return (col - lo) / (hi - lo)

    return lam * norm(arr[:, 0]) - (1.0 - lam) * norm(arr[:, 1])


class _Run:
    def __init__(self, g: StateGraph, cfg: SwarmConfig):
        self.g = g
        self.cfg = cfg
        self.n = g.n
        self.edge_mask = adjacency_matrix(g)
        self.guidance = init_guidance(g)
        walk_ss, move_ss, obj_ss = np.random.SeedSequence(int(cfg.seed)).spawn(3)
        self.walk_rng = np.random.default_rng(walk_ss)
        self.move_rng = np.random.default_rng(move_ss)
        self.obj_rng = np.random.default_rng(obj_ss)
        self.suite = PathSuite()
        self.priorities: dict[TestSequence, float] = {}
        self.evaluated: list[TestSequence] = []
        self.agents = [
            AgentState(bias=self.edge_mask.astype(float), velocity=np.zeros((self.n, self.n)))
            for _ in range(cfg.agents)
        ]
        self.archive = ParetoArchive(cfg.archive_capacity) if cfg.algorithm.multi_objective else None
        self.alpha = cfg.fa.alpha
        self.ctx: PriorityContext | None = None

    # -- objectives -----------------------------------------------------
    def priority(self, seq: TestSequence) -> float:
        p = self.priorities.get(seq)
        if p is None:
            p = path_priority(seq, self.g, self.cfg.rand_policy, self.obj_rng)
            self.priorities[seq] = p
            self.evaluated.append(seq)
        return p

    def refresh_context(self, suite: PathSuite) -> None:
        prios = [self.priorities[s] for s in suite]
        self.ctx = PriorityContext.for_suite(prios, suite.tc, self.g, self.cfg.cost_variant,
                                             algorithm=self.cfg.algorithm.value)

    def vector(self, seq: TestSequence) -> ObjectiveVector:
        p = self.priority(seq)
        return ObjectiveVector(p, oracle_cost(p, self.ctx))

    def rebuild_archive(self, suite: PathSuite) -> None:
        # costs are suite-relative, so earlier entries go stale whenever tc or
        # the suite maximum changes; re-insert every member under the current context
        self.archive = ParetoArchive(self.cfg.archive_capacity)
        for s in suite:
            self.archive.insert(s, self.vector(s))

    # -- main loop --------------------------------------------------------
    def sample(self, steer: bool) -> None:
        for agent in self.agents:
            weights = self.guidance * agent.bias if steer else self.guidance
            seq = draw_sequence(self.g, weights, self.suite.covered_edges(), self.walk_rng)
            agent.current = seq
            self.priority(seq)
            grown = accept_into_suite(self.suite, seq)
            if grown is not self.suite:
                self.suite = grown
                decay_guidance(self.guidance, seq)

    def update_personal_bests(self) -> None:
        multi = self.cfg.algorithm.multi_objective
        for agent in self.agents:
            cur = agent.current
            if agent.personal_best is None:
                agent.personal_best = cur
            elif multi:
                new, old = self.vector(cur), self.vector(agent.personal_best)
                if dominates(new, old):
                    agent.personal_best = cur
                elif not dominates(old, new) and self.move_rng.random() < 0.5:
                    agent.personal_best = cur
            elif self.priority(cur) > self.priority(agent.personal_best):
                agent.personal_best = cur
            agent.best_fitness = (self.vector(agent.personal_best) if multi
                                  else self.priority(agent.personal_best))

    def global_best(self) -> TestSequence:
        best = max(range(len(self.agents)),
                   key=lambda i: (self.priority(self.agents[i].personal_best), -i))
        return self.agents[best].personal_best

    def move(self) -> None:
        cfg = self.cfg
        if cfg.algorithm is Algorithm.PSO:
            guide = indicator(self.global_best(), self.n)
            for agent in self.agents:
                pso_velocity(agent, guide, cfg.pso, self.edge_mask, self.move_rng)
        elif cfg.algorithm is Algorithm.MOPSO:
            for agent in self.agents:
                leader = self.archive.select_leader(self.move_rng)
                guide = indicator(leader.sequence, self.n)
                pso_velocity(agent, guide, cfg.pso, self.edge_mask, self.move_rng)
        else:
            inds = [indicator(a.current, self.n) for a in self.agents]
            if cfg.algorithm is Algorithm.FA:
                brightness = [self.priority(a.current) for a in self.agents]
            else:
                lam = float(self.move_rng.random())
                brightness = scalarize([self.vector(a.current) for a in self.agents], lam)
            new = firefly_step([a.bias for a in self.agents], inds, brightness, cfg.fa,
                               self.alpha, self.edge_mask, self.move_rng)
            for agent, bias in zip(self.agents, new):
                agent.bias = bias
            self.alpha *= cfg.fa.decay

    def best_marker(self):
        if self.archive is not None:
            return tuple(sorted(self.archive.sequences()))
        return self.priority(self.global_best())

    def trace_value(self) -> float:
        if self.archive is not None:
            return max(v.priority for v in self.archive.vectors())
        return self.priority(self.global_best())

    def execute(self) -> RunResult:
        cfg = self.cfg
        t0 = time.perf_counter()
        trace: list[float] = []
        covered_at = None
        marker = None
        stagnant = 0
        it = 0
        for it in range(1, cfg.max_iterations + 1):
            self.sample(steer=covered_at is not None)
            if covered_at is None and coverage_complete(self.suite, self.g):
                covered_at = it
                log.debug("%s seed=%s agents=%s: coverage at iteration %d",
                          cfg.algorithm.value, cfg.seed, cfg.agents, it)
            self.refresh_context(self.suite)
            if self.archive is not None:
                self.rebuild_archive(self.suite)
            self.update_personal_bests()
            if covered_at is not None:
                self.move()
            trace.append(self.trace_value())
            m = self.best_marker()
            # stagnation only counts once the steering phase has begun
            stagnant = stagnant + 1 if (m == marker and covered_at != it) else 0
            marker = m
            if covered_at is not None and stagnant >= cfg.stagnation:
                break

        # keep the higher-priority member whenever two cover the same transitions
        final = prune_redundant(self.suite, keep_score=self.priority)
        self.refresh_context(final)
        objectives = [self.vector(s) for s in final]
        archive: list = []
        if cfg.algorithm.multi_objective:
            self.rebuild_archive(final)
            archive = [(e.sequence, e.vector) for e in self.archive]
        complete = coverage_complete(final, self.g)
        if not complete:
            log.warning("%s seed=%s agents=%s: coverage incomplete after %d iterations",
                        cfg.algorithm.value, cfg.seed, cfg.agents, it)
        return RunResult(
            algorithm=cfg.algorithm.value,
            agents=cfg.agents,
            seed=int(cfg.seed),
            suite=list(final),
            objectives=objectives,
            archive=archive,
            trace=trace,
            iterations=it,
            iterations_to_coverage=covered_at,
            coverage_complete=complete,
            evaluated=list(self.evaluated),
            rand_policy=cfg.rand_policy.value,
            cost_variant=cfg.cost_variant.value,
            wall_time=time.perf_counter() - t0,
        )


def _check(cfg: SwarmConfig, expected: Algorithm) -> None:
    if cfg.algorithm is not expected:
        raise ConfigError(f"expected a {expected.value} config, got {cfg.algorithm.value}")


def run_pso(g: StateGraph, cfg: SwarmConfig) -> RunResult:
    _check(cfg, Algorithm.PSO)
    return _Run(g, cfg).execute()


def run_mopso(g: StateGraph, cfg: SwarmConfig) -> RunResult:
    _check(cfg, Algorithm.MOPSO)
    return _Run(g, cfg).execute()


def run_fa(g: StateGraph, cfg: SwarmConfig) -> RunResult:
    _check(cfg, Algorithm.FA)
    return _Run(g, cfg).execute()


def run_mofa(g: StateGraph, cfg: SwarmConfig) -> RunResult:
    _check(cfg, Algorithm.MOFA)
    return _Run(g, cfg).execute()


RUNNERS = {
    Algorithm.PSO: run_pso,
    Algorithm.MOPSO: run_mopso,
    Algorithm.FA: run_fa,
    Algorithm.MOFA: run_mofa,
}


def run(g: StateGraph, cfg: SwarmConfig) -> RunResult:
    return RUNNERS[cfg.algorithm](g, cfg)
