"""Greedy tower-height assignment connecting all terminals to the landline.

Each iteration evaluates every terminal ``v`` with a doubling set of height
increments, asks :func:`star_steiner_tc` for the cheapest cost-to-benefit
star around ``v``, applies the globally best proposal and recomputes coverage.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from middlemile.model import (
    EPS,
    CoverState,
    Heights,
    InfeasibleInstance,
    PlanningInstance,
    SteinerTree,
    cover,
    edge_key,
    initial_heights,
    snap,
)

logger = logging.getLogger(__name__)

INF = math.inf


class NotALogicalNeighbor(LookupError):
    pass


@dataclass(frozen=True)
class RelayPath:
    """Route ``(v, v1, ..., vs, u)``; ``beta`` is the increment needed at ``u``.

    ``beta`` is ``None`` when the last edge cannot be covered below HTMAX.
    """

    vertices: tuple[int, ...]
    beta: float | None

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1

    @property
    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    @property
    def is_direct(self) -> bool:
        return len(self.vertices) == 2

    def rank(self) -> tuple[float, int, tuple[int, ...]]:
        assert self.beta is not None
        return (self.beta, self.hops, self.interior)


@dataclass(frozen=True)
class IncrementProposal:
    center: int
    delta: float
    incr: dict[int, float]
    cost: Fraction
    benefit: int
    ratio: Fraction | float
    routes: dict[int, RelayPath] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.benefit >= 1


@dataclass(frozen=True)
class IterationRecord:
    center: int
    delta: float
    incr: dict[int, float]
    cost: float
    benefit: int
    ratio: float
    phi_before: int
    phi_after: int

    def to_dict(self) -> dict:
        return {
            "center": self.center,
            "delta": self.delta,
            "incr": [[k, v] for k, v in sorted(self.incr.items())],
            "cost": self.cost,
            "benefit": self.benefit,
            "ratio": self.ratio,
            "phi_before": self.phi_before,
            "phi_after": self.phi_after,
        }


@dataclass(frozen=True)
class SteinerSolution:
    heights: Heights
    tree: SteinerTree
    trace: tuple[IterationRecord, ...]

    def tower_cost(self, instance: PlanningInstance) -> float:
        return sum(instance.costs.tower(self.heights[t]) for t in instance.terminals)


def min_increment_to_cover(
    ob: float, fixed: float, current: float, step: float, htmax: float
) -> float | None:
    """Smallest grid increment ``beta`` with ``fixed + current + beta >= 2 * ob``.

    Returns ``None`` when that would push the tower past ``htmax``.
    """
    need = 2.0 * ob - fixed - current
    if need <= EPS:
        return 0.0
    beta = snap(math.ceil(need / step - EPS) * step)
    if current + beta > htmax + EPS:
        return None
    return beta


def _covers(ha: float, hb: float, ob: float) -> bool:
    return ha + hb + EPS >= 2.0 * ob


def _relay_paths(
    instance: PlanningInstance, h: Mapping[int, float], v: int, top: float
) -> dict[int, tuple[int, ...]]:
    """Non-terminals reachable from ``v`` (standing at ``top``) over covered edges.

    Maps each one to its interior path ``(v1, ..., s)``: fewest hops, then the
    lexicographically smallest id sequence. Frontiers are expanded in sorted
    path order so the first discovery of a vertex is its smallest path.
    """
    paths: dict[int, tuple[int, ...]] = {}
    frontier = []
    for b, e in instance.adjacency[v]:
        if not instance.is_terminal(b) and _covers(top, h[b], e.ob):
            frontier.append((b,))
    for p in frontier:
        paths[p[-1]] = p
    while frontier:
        nxt: dict[int, tuple[int, ...]] = {}
        for p in sorted(frontier):
            w = p[-1]
            for y, e in instance.adjacency[w]:
                if instance.is_terminal(y) or y in paths or y in nxt:
                    continue
                if _covers(h[w], h[y], e.ob):
                    nxt[y] = p + (y,)
        paths.update(nxt)
        frontier = list(nxt.values())
    return paths


def logical_neighbors(
    instance: PlanningInstance,
    h: Mapping[int, float],
    v: int,
    delta: float,
    state: CoverState | None = None,
) -> dict[int, tuple[RelayPath, ...]]:
    """Terminals outside ``v``'s component reachable directly or via non-terminals.

    Each neighbor maps to its candidate routes: the direct edge if present, and
    one canonical relay path per last-hop non-terminal.
    """
    state = state or cover(instance, h)
    step, htmax = instance.height_step, instance.levels[-1]
    top = h[v] + delta
    found: dict[int, list[RelayPath]] = {}

    for u, e in instance.adjacency[v]:
        if instance.is_terminal(u) and not state.same(u, v):
            beta = min_increment_to_cover(e.ob, top, h[u], step, htmax)
            found.setdefault(u, []).append(RelayPath((v, u), beta))

    for s, interior in sorted(_relay_paths(instance, h, v, top).items()):
        for u, e in instance.adjacency[s]:
            if u == v or not instance.is_terminal(u) or state.same(u, v):
                continue
            beta = min_increment_to_cover(e.ob, h[s], h[u], step, htmax)
            found.setdefault(u, []).append(RelayPath((v, *interior, u), beta))
    return {u: tuple(routes) for u, routes in sorted(found.items())}


def _best(routes: tuple[RelayPath, ...] | list[RelayPath]) -> RelayPath | None:
    feasible = [r for r in routes if r.beta is not None]
    return min(feasible, key=RelayPath.rank) if feasible else None


def best_relay_path(
    instance: PlanningInstance,
    h: Mapping[int, float],
    v: int,
    delta: float,
    u: int,
    state: CoverState | None = None,
) -> RelayPath:
    routes = logical_neighbors(instance, h, v, delta, state).get(u, ())
    best = _best([r for r in routes if not r.is_direct])
    if best is None:
        raise NotALogicalNeighbor(f"{u} has no coverable relay path from {v}")
    return best


def star_steiner_tc(
    instance: PlanningInstance,
    h: Mapping[int, float],
    v: int,
    delta: float,
    state: CoverState | None = None,
) -> IncrementProposal:
    """Lowest cost-to-benefit star centered at ``v`` raised by ``delta``."""
    state = state or cover(instance, h)
    tower = instance.costs.tower
    cost_v = Fraction(tower.increment(h[v], delta))

    entries = []
    for u, routes in logical_neighbors(instance, h, v, delta, state).items():
        route = _best(routes)
        if route is None:
            continue
        assert route.beta is not None
        c = Fraction(tower.increment(h[u], route.beta))
        entries.append((c, route.beta, u, route))
    entries.sort(key=lambda t: (t[0], t[1], t[2]))

    # one representative per component: the cheapest
    seen: set[int] = set()
    cheapest = []
    for entry in entries:
        comp = state.component[entry[2]]
        if comp not in seen:
            seen.add(comp)
            cheapest.append(entry)

    best_ratio: Fraction | float = INF
    k_best = 0
    total = cost_v
    for k, (c, *_rest) in enumerate(cheapest, start=1):
        total += c
        r = total / k
        if r < best_ratio:
            best_ratio, k_best = r, k

    if k_best == 0:
        return IncrementProposal(v, delta, {}, cost_v, 0, INF)
    chosen = cheapest[:k_best]
    incr = {u: beta for _, beta, u, _ in chosen}
    incr[v] = delta
    cost = cost_v + sum((c for c, *_ in chosen), Fraction(0))
    return IncrementProposal(v, delta, incr, cost, k_best, best_ratio, {u: r for _, _, u, r in chosen})


def doubling_increments(step: float, cap: float) -> list[float]:
    """``step, 2*step, 4*step, ...`` below ``cap``, plus ``cap`` itself."""
    out: list[float] = []
    if cap <= EPS:
        return out
    d = step
    while d <= cap + EPS:
        out.append(snap(d))
        d *= 2
    if not out or abs(out[-1] - cap) > EPS:
        out.append(snap(cap))
    return out


def extract_steiner_tree(state: CoverState, instance: PlanningInstance) -> SteinerTree:
    """BFS tree of the covered subgraph from the landline, minus dangling relays."""
    if state.phi != 1:
        raise ValueError(f"terminals are not connected (phi = {state.phi})")
    root = instance.landline
    adj: dict[int, list[int]] = {}
    for a, b in state.covered:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    parent = {root: root}
    queue = deque([root])
    tree_adj: dict[int, set[int]] = {root: set()}
    while queue:
        x = queue.popleft()
        for y in sorted(adj.get(x, ())):
            if y not in parent:
                parent[y] = x
                tree_adj.setdefault(y, set()).add(x)
                tree_adj[x].add(y)
                queue.append(y)

    leaves = deque(sorted(x for x, n in tree_adj.items() if len(n) == 1 and not instance.is_terminal(x)))
    while leaves:
        x = leaves.popleft()
        if x not in tree_adj or len(tree_adj[x]) != 1:
            continue
        (y,) = tree_adj.pop(x)
        tree_adj[y].discard(x)
        if len(tree_adj[y]) == 1 and not instance.is_terminal(y):
            leaves.append(y)

    edges = {edge_key(a, b) for a, ns in tree_adj.items() for b in ns}
    return SteinerTree(root, tuple(sorted(edges)))


def _select(instance: PlanningInstance, h: Heights, state: CoverState) -> IncrementProposal | None:
    best: IncrementProposal | None = None
    best_key = None
    top = instance.levels[-1]
    for v in instance.terminals:
        for delta in doubling_increments(instance.height_step, top - h[v]):
            p = star_steiner_tc(instance, h, v, delta, state)
            if not p.feasible:
                continue
            key = (p.ratio, p.cost, v, delta)
            if best_key is None or key < best_key:
                best, best_key = p, key
    return best


def steiner_tc_solve(instance: PlanningInstance) -> SteinerSolution:
    h = initial_heights(instance)
    state = cover(instance, h)
    trace: list[IterationRecord] = []
    while state.phi > 1:
        p = _select(instance, h, state)
        if p is None:
            raise InfeasibleInstance(f"no proposal reduces the {state.phi} terminal components")
        for u, inc in p.incr.items():
            h[u] = snap(h[u] + inc)
        new_state = cover(instance, h)
        logger.debug(
            "center %d +%g: cost %s benefit %d phi %d -> %d",
            p.center, p.delta, p.cost, p.benefit, state.phi, new_state.phi,
        )
        trace.append(
            IterationRecord(
                p.center, p.delta, dict(p.incr), float(p.cost), p.benefit,
                float(p.ratio), state.phi, new_state.phi,
            )
        )
        state = new_state
    return SteinerSolution(h, extract_steiner_tree(state, instance), tuple(trace))
