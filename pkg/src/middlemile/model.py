"""Domain types, the line-of-sight rule, coverage and cost accounting.

Everything here is immutable once built; solver modules only read it.
"""

from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping

from networkx.utils import UnionFind

if TYPE_CHECKING:  # pragma: no cover
    from middlemile.cnd import CapacityPlan
    from middlemile.hybrid import HybridPlan

# Absolute tolerance for comparisons on heights, distances and flows.
EPS = 1e-9

EdgeKey = tuple[int, int]
Heights = dict[int, float]

ANTENNA_KINDS = ("PP", "MP", "Omni", "OmniSD")


class InstanceError(ValueError):
    """An instance breaks a structural invariant."""

    def __init__(self, problems: Iterable[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InfeasibleInstance(RuntimeError):
    """No height assignment can connect all terminals."""


class InconsistencyError(ValueError):
    """A plan or height function refers to something the instance lacks."""


class Kind(str, Enum):
    TERMINAL = "terminal"
    NON_TERMINAL = "non_terminal"
    LANDLINE = "landline"


def edge_key(a: int, b: int) -> EdgeKey:
    return (a, b) if a < b else (b, a)


def snap(x: float) -> float:
    """Round away accumulated float noise on grid values."""
    return round(x, 9) + 0.0


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float
    kind: Kind
    demand: float = 0.0
    fixed_height: float | None = None

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def is_terminal(self) -> bool:
        return self.kind is not Kind.NON_TERMINAL


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    ob: float

    @property
    def key(self) -> EdgeKey:
        return edge_key(self.u, self.v)

    def other(self, w: int) -> int:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise InconsistencyError(f"vertex {w} is not an endpoint of edge {self.key}")


@dataclass(frozen=True)
class RadioParams:
    U: float
    R: float
    HTMIN: float
    HTMAX: float
    R_MP: float
    BWMAX: float
    U_Omni: float
    R_Omni: float
    HTOmni: float
    HTOmniSD: float


@dataclass(frozen=True)
class TowerCost:
    """Tower cost as a step function over sorted ``(height, cost)`` breakpoints.

    A height is charged the cost of the shortest listed tower that reaches it,
    so ``cost(h) = cost_i`` for the first breakpoint with ``height_i >= h``.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        pts = tuple(sorted((float(h), float(c)) for h, c in self.breakpoints))
        if not pts:
            raise InstanceError(["cTower needs at least one breakpoint"])
        object.__setattr__(self, "breakpoints", pts)

    @cached_property
    def _heights(self) -> list[float]:
        return [h for h, _ in self.breakpoints]

    @property
    def max_height(self) -> float:
        return self.breakpoints[-1][0]

    def __call__(self, height: float) -> float:
        i = bisect.bisect_left(self._heights, height - EPS)
        if i == len(self.breakpoints):
            raise InconsistencyError(f"height {height} exceeds the tower cost table")
        return self.breakpoints[i][1]

    def increment(self, height: float, delta: float) -> float:
        return self(height + delta) - self(height)

    def is_monotone(self) -> bool:
        costs = [c for _, c in self.breakpoints]
        return all(a <= b for a, b in zip(costs, costs[1:]))


@dataclass(frozen=True)
class LinkCost:
    """Cost of installing ``k`` p2p link copies on one edge.

    Either linear in ``k`` (``unit``) or an explicit table whose entry ``i`` is
    the cost of ``i + 1`` copies; counts past the table extend it with the last
    marginal cost.
    """

    unit: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if (self.unit is None) == (self.table is None):
            raise InstanceError(["cLink needs exactly one of a unit cost or a table"])
        if self.table is not None:
            object.__setattr__(self, "table", tuple(float(c) for c in self.table))

    def __call__(self, copies: int) -> float:
        if copies < 0:
            raise ValueError("negative link count")
        if copies == 0:
            return 0.0
        if self.unit is not None:
            return copies * float(self.unit)
        table = self.table
        assert table is not None
        if copies <= len(table):
            return table[copies - 1]
        step = table[-1] - (table[-2] if len(table) > 1 else 0.0)
        return table[-1] + (copies - len(table)) * step


@dataclass(frozen=True)
class CostTables:
    tower: TowerCost
    link: LinkCost
    antenna: Mapping[str, float]

    def ant(self, kind: str) -> float:
        return float(self.antenna[kind])


@dataclass(frozen=True)
class PowerTable:
    """Monotone reach -> transmit power lookup, ``(max_distance_m, power)`` rows."""

    rows: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(sorted((float(d), float(p)) for d, p in self.rows)))

    def lookup(self, distance: float) -> float:
        for reach, power in self.rows:
            if distance <= reach + EPS:
                return power
        raise ValueError(f"distance {distance:.1f} m is beyond the power table")


DEFAULT_POWER_TABLE = PowerTable(
    ((1000.0, 10.0), (5000.0, 17.0), (10000.0, 20.0), (20000.0, 24.0), (50000.0, 27.0), (100000.0, 30.0))
)


@dataclass(frozen=True)
class PlanningInstance:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    landline: int
    radio: RadioParams
    costs: CostTables
    height_step: float = 1.0
    power_table: PowerTable = field(default=DEFAULT_POWER_TABLE)

    @cached_property
    def by_id(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def edge_map(self) -> dict[EdgeKey, Edge]:
        return {e.key: e for e in self.edges}

    @cached_property
    def adjacency(self) -> dict[int, tuple[tuple[int, Edge], ...]]:
        adj: dict[int, list[tuple[int, Edge]]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append((e.v, e))
            adj[e.v].append((e.u, e))
        return {k: tuple(sorted(lst, key=lambda t: t[0])) for k, lst in adj.items()}

    @cached_property
    def terminals(self) -> tuple[int, ...]:
        return tuple(sorted(v.id for v in self.vertices if v.is_terminal))

    @cached_property
    def non_terminals(self) -> tuple[int, ...]:
        return tuple(sorted(v.id for v in self.vertices if not v.is_terminal))

    @cached_property
    def levels(self) -> tuple[float, ...]:
        """Admissible terminal heights: ``HTMIN + k * height_step`` up to ``HTMAX``."""
        lo, hi, step = self.radio.HTMIN, self.radio.HTMAX, self.height_step
        n = int(math.floor((hi - lo) / step + EPS))
        return tuple(snap(lo + k * step) for k in range(n + 1))

    def is_terminal(self, vid: int) -> bool:
        return self.by_id[vid].is_terminal

    def demand(self, vid: int) -> float:
        return self.by_id[vid].demand

    def dist(self, a: int, b: int) -> float:
        return math.dist(self.by_id[a].pos, self.by_id[b].pos)

    def edge(self, a: int, b: int) -> Edge:
        try:
            return self.edge_map[edge_key(a, b)]
        except KeyError:
            raise InconsistencyError(f"no edge between {a} and {b}") from None


def initial_heights(instance: PlanningInstance) -> Heights:
    """Terminals start at HTMIN; non-terminals keep their fixed towers."""
    h: Heights = {}
    for v in instance.vertices:
        h[v.id] = float(v.fixed_height) if not v.is_terminal else float(instance.radio.HTMIN)  # type: ignore[arg-type]
    return h


def max_heights(instance: PlanningInstance) -> Heights:
    h = initial_heights(instance)
    for t in instance.terminals:
        h[t] = instance.levels[-1]
    return h


def check_heights(instance: PlanningInstance, h: Mapping[int, float]) -> list[str]:
    problems = []
    grid = set(instance.levels)
    for v in instance.vertices:
        if v.id not in h:
            problems.append(f"no height for vertex {v.id}")
            continue
        if v.is_terminal:
            if snap(h[v.id]) not in grid:
                problems.append(f"terminal {v.id} height {h[v.id]} is off the height grid")
        elif abs(h[v.id] - float(v.fixed_height)) > EPS:  # type: ignore[arg-type]
            problems.append(f"non-terminal {v.id} height changed from {v.fixed_height}")
    return problems


def los_covered(e: Edge, h: Mapping[int, float]) -> bool:
    """True when the tower heights at both ends sum to at least twice ``e.ob``."""
    try:
        hu, hv = h[e.u], h[e.v]
    except KeyError as exc:
        raise InconsistencyError(f"no height for vertex {exc.args[0]}") from None
    return hu + hv + EPS >= 2.0 * e.ob


@dataclass(frozen=True)
class CoverState:
    covered: frozenset[EdgeKey]
    component: Mapping[int, int]
    phi: int

    def same(self, a: int, b: int) -> bool:
        return self.component[a] == self.component[b]


def cover(instance: PlanningInstance, h: Mapping[int, float]) -> CoverState:
    uf = UnionFind(v.id for v in instance.vertices)
    covered = []
    for e in instance.edges:
        if los_covered(e, h):
            covered.append(e.key)
            uf.union(e.u, e.v)
    component: dict[int, int] = {}
    for block in uf.to_sets():
        rep = min(block)
        for x in block:
            component[x] = rep
    phi = len({component[t] for t in instance.terminals})
    return CoverState(frozenset(covered), component, phi)


@dataclass(frozen=True)
class SteinerTree:
    """A tree rooted at the landline; edges are stored as sorted keys."""

    root: int
    edges: tuple[EdgeKey, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(sorted(edge_key(a, b) for a, b in self.edges)))

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {self.root: []}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.adjacency))

    @cached_property
    def _rooting(self) -> tuple[dict[int, int | None], dict[int, int]]:
        parent: dict[int, int | None] = {self.root: None}
        depth = {self.root: 0}
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    queue.append(y)
        return parent, depth

    @property
    def parent(self) -> dict[int, int | None]:
        return self._rooting[0]

    @property
    def depth(self) -> dict[int, int]:
        return self._rooting[1]

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        parent = self.parent
        return {x: tuple(y for y in self.adjacency[x] if parent.get(y) == x) for x in self.adjacency}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_spanning_tree(self) -> bool:
        return len(self.parent) == len(self.adjacency) and len(self.edges) == len(self.adjacency) - 1

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while (p := self.parent[path[-1]]) is not None:
            path.append(p)
        return path

    def path(self, a: int, b: int) -> list[int]:
        """Unique tree path from ``a`` to ``b`` (inclusive)."""
        up_a = self.path_to_root(a)
        up_b = self.path_to_root(b)
        on_b = set(up_b)
        i = next(i for i, x in enumerate(up_a) if x in on_b)
        lca = up_a[i]
        return up_a[: i + 1] + list(reversed(up_b[: up_b.index(lca)]))

    def postorder(self) -> Iterator[int]:
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                yield x
                continue
            stack.append((x, True))
            for c in reversed(self.children[x]):
                stack.append((c, False))


@dataclass(frozen=True)
class CostReport:
    tower: float
    link: float
    antenna: float

    @property
    def total(self) -> float:
        return self.tower + self.link + self.antenna

    def to_dict(self) -> dict[str, float]:
        return {"tower": self.tower, "link": self.link, "antenna": self.antenna, "total": self.total}


def total_cost(
    instance: PlanningInstance,
    h: Mapping[int, float],
    capacity: CapacityPlan,
    hybrid: HybridPlan | None = None,
) -> CostReport:
    """Tower cost over terminals, link cost per installed copies, and antennas.

    A plain p2p link copy carries two PP antennas. Edges taken over by a
    hyperlink keep the far-side antenna (PP for MP sectors, OmniSD for omni
    discs) and the hyperlink adds its own antenna once.
    """
    costs = instance.costs
    tree_edges = set(capacity.copies)
    for key in capacity.flow:
        if key not in tree_edges:
            raise InconsistencyError(f"flow on edge {key} which is not in the tree")
        if key not in instance.edge_map:
            raise InconsistencyError(f"edge {key} is not an instance edge")

    heights = dict(h)
    replaced: dict[EdgeKey, str] = {}
    hyper_antennas = 0.0
    if hybrid is not None:
        heights.update(hybrid.height_overrides)
        replaced = hybrid.replaced_edges()
        hyper_antennas += costs.ant("MP") * sum(len(c) for c in hybrid.mp.values())
        hyper_antennas += costs.ant("Omni") * len(hybrid.omni)

    tower = sum(costs.tower(heights[t]) for t in instance.terminals)
    link = sum(costs.link(n) for n in capacity.copies.values())
    antenna = hyper_antennas
    for key, n in capacity.copies.items():
        kind = replaced.get(key)
        if kind == "MP":
            antenna += costs.ant("PP")
        elif kind == "Omni":
            antenna += costs.ant("OmniSD")
        else:
            antenna += 2 * costs.ant("PP") * n
    return CostReport(tower, link, antenna)
