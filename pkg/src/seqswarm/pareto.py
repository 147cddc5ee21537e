"""Dominance, non-dominated filtering and the bounded Pareto archive.

Orientation is fixed: priority is maximised, cost is minimised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyArchive
from .objectives import ObjectiveVector
from .paths import TestSequence

EQ_TOL = 1e-9
DEFAULT_CAPACITY = 100


def dominates(a, b, tol: float = EQ_TOL) -> bool:
    no_worse = a[0] >= b[0] - tol and a[1] <= b[1] + tol
    better = a[0] > b[0] + tol or a[1] < b[1] - tol
    return no_worse and better


def _dominance_matrix(vs: Sequence, tol: float = EQ_TOL) -> np.ndarray:
    arr = np.asarray(vs, dtype=float).reshape(-1, 2)
    p, c = arr[:, 0], arr[:, 1]
    no_worse = (p[:, None] >= p[None, :] - tol) & (c[:, None] <= c[None, :] + tol)
    better = (p[:, None] > p[None, :] + tol) | (c[:, None] < c[None, :] - tol)
    # entry [i, j]: i dominates j
    return no_worse & better


def non_dominated_mask(vs: Sequence, tol: float = EQ_TOL) -> np.ndarray:
    if len(vs) == 0:
        return np.zeros(0, dtype=bool)
    return ~_dominance_matrix(vs, tol).any(axis=0)


def non_dominated_filter(vs: Sequence, tol: float = EQ_TOL) -> list:
    """Elements of ``vs`` not dominated by any other element, input order kept."""
    mask = non_dominated_mask(vs, tol)
    return [v for v, keep in zip(vs, mask) if keep]


def non_dominated_brute(vs: Sequence, tol: float = EQ_TOL) -> list[bool]:
    """Pairwise-loop flags; the reference check used before reports are written."""
    return [not any(dominates(w, v, tol) for j, w in enumerate(vs) if j != i)
            for i, v in enumerate(vs)]


def crowding_distances(vs: Sequence) -> np.ndarray:
    """NSGA-II crowding distance over both objectives; boundary points get inf."""
    arr = np.asarray(vs, dtype=float).reshape(-1, 2)
    n = len(arr)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(2):
        order = np.argsort(arr[:, k], kind="stable")
        col = arr[order, k]
        span = col[-1] - col[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span <= 0:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


@dataclass(frozen=True)
class ArchiveEntry:
    sequence: TestSequence
    vector: ObjectiveVector
    serial: int


class ParetoArchive:
    """Mutually non-dominated (sequence, objectives) pairs, bounded by ``capacity``."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._entries: list[ArchiveEntry] = []
        self._serial = 0

    @property
    def entries(self) -> tuple[ArchiveEntry, ...]:
        return tuple(self._entries)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def vectors(self) -> list[ObjectiveVector]:
        return [e.vector for e in self._entries]

    def sequences(self) -> list[TestSequence]:
        return [e.sequence for e in self._entries]

    def insert(self, sequence: TestSequence, vector) -> bool:
        """Insert a candidate; returns whether it was admitted."""
        vector = ObjectiveVector(*vector)
        for e in self._entries:
            if e.sequence == sequence or dominates(e.vector, vector):
                return False
        self._entries = [e for e in self._entries if not dominates(vector, e.vector)]
        self._entries.append(ArchiveEntry(sequence, vector, self._serial))
        self._serial += 1
        while len(self._entries) > self.capacity:
            self._evict_most_crowded()
        return True

    def _evict_most_crowded(self):
        dist = crowding_distances(self.vectors())
        victim = min(range(len(self._entries)),
                     key=lambda i: (dist[i], self._entries[i].serial))
        del self._entries[victim]

    def select_leader(self, rng) -> ArchiveEntry:
        """Roulette pick weighted by crowding distance, favouring sparse regions."""
        if not self._entries:
            raise EmptyArchive("cannot select a leader from an empty archive")
        if len(self._entries) == 1:
            return self._entries[0]
        dist = crowding_distances(self.vectors())
        finite = dist[np.isfinite(dist)]
        top = float(finite.max()) if finite.size and finite.max() > 0 else 1.0
        weights = np.where(np.isfinite(dist), dist, 2.0 * top)
        total = float(weights.sum())
        if total <= 0:
            weights = np.ones(len(dist))
            total = float(len(dist))
        u = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(weights), u, side="right"))
        return self._entries[min(idx, len(self._entries) - 1)]


def archive_insert(ar: ParetoArchive, cand) -> ParetoArchive:
    """Functional-style wrapper: insert ``(sequence, vector)`` and return the archive."""
    ar.insert(*cand)
    return ar


def select_leader(ar: ParetoArchive, rng) -> ArchiveEntry:
    return ar.select_leader(rng)
