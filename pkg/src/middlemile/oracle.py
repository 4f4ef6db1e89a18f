"""Exhaustive reference solvers for small instances.

Nothing here calls into the greedy; the only shared pieces are the coverage
predicate and the tower cost tables.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from middlemile.model import EPS, Heights, InfeasibleInstance, PlanningInstance, cover, initial_heights, los_covered


class OracleRefused(RuntimeError):
    def __init__(self, size: int, limit: int) -> None:
        self.size = size
        self.limit = limit
        super().__init__(f"search space {size} exceeds limit {limit}")


@dataclass(frozen=True)
class OracleResult:
    heights: Heights
    tower_cost: float
    space: int
    checked: int
    elapsed: float


def search_space(instance: PlanningInstance) -> int:
    return len(instance.levels) ** len(instance.terminals)


def brute_force_steiner_tc(instance: PlanningInstance, max_space: int = 1_000_000) -> OracleResult:
    """Cheapest terminal height grid assignment whose coverage connects all terminals.

    Assignments are visited in increasing tower cost, so the first connected
    one is optimal.
    """
    start = time.perf_counter()
    terms = instance.terminals
    levels = np.array(instance.levels)
    size = search_space(instance)
    if size > max_space:
        raise OracleRefused(size, max_space)

    level_cost = np.array([instance.costs.tower(x) for x in instance.levels])
    idx = np.array(list(itertools.product(range(len(levels)), repeat=len(terms))), dtype=np.int64)
    totals = level_cost[idx].sum(axis=1)
    order = np.argsort(totals, kind="stable")

    base = initial_heights(instance)
    for checked, row in enumerate(order, start=1):
        h = dict(base)
        for t, i in zip(terms, idx[row]):
            h[t] = float(levels[i])
        if cover(instance, h).phi == 1:
            return OracleResult(h, float(totals[row]), size, checked, time.perf_counter() - start)
    raise InfeasibleInstance("no grid assignment connects all terminals")


def _reaches(instance: PlanningInstance, h: Mapping[int, float], v: int, u: int) -> bool:
    """Is there a covered path from ``v`` to ``u`` whose interior avoids terminals?"""
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y, e in instance.adjacency[x]:
            if y in seen or not los_covered(e, h):
                continue
            if y == u:
                return True
            if not instance.is_terminal(y):
                seen.add(y)
                queue.append(y)
    return False


def _cheapest_raise(
    instance: PlanningInstance, h: Mapping[int, float], v: int, delta: float, u: int
) -> float | None:
    """Cheapest tower increment at ``u`` making it reachable from ``v``."""
    trial = dict(h)
    trial[v] = h[v] + delta
    tower = instance.costs.tower
    for level in instance.levels:
        if level < h[u] - EPS:
            continue
        trial[u] = level
        if _reaches(instance, trial, v, u):
            return tower(level) - tower(h[u])
    return None


def brute_force_star(
    instance: PlanningInstance, h: Mapping[int, float], v: int, delta: float
) -> tuple[Fraction | float, dict[int, float]]:
    """Best cost-to-benefit ratio for a star at ``v`` by subset enumeration.

    Returns the ratio and the chosen neighbors mapped to their tower cost
    increments.
    """
    state = cover(instance, h)
    tower = instance.costs.tower
    own = Fraction(tower(h[v] + delta) - tower(h[v]))

    reps: dict[int, tuple[float, int]] = {}
    for u in instance.terminals:
        if u == v or state.same(u, v):
            continue
        c = _cheapest_raise(instance, h, v, delta, u)
        if c is None:
            continue
        comp = state.component[u]
        if comp not in reps or (c, u) < reps[comp]:
            reps[comp] = (c, u)

    best: Fraction | float = math.inf
    chosen: dict[int, float] = {}
    items = sorted(reps.values(), key=lambda t: t[1])
    if len(items) > 16:
        raise ValueError(f"{len(items)} representatives is too many to enumerate")
    for k in range(1, len(items) + 1):
        for subset in itertools.combinations(items, k):
            r = (own + sum(Fraction(c) for c, _ in subset)) / k
            if r < best:
                best, chosen = r, {u: c for c, u in subset}
    return best, chosen
