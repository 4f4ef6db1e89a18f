"""Capacity installation on the Steiner tree: groups, hubs, flows, link copies.

Terminals are grouped bottom-up so that no group carries more than ``U``.
Members send their demand to the group hub over the base link of each tree
edge; hubs forward the group aggregate to the landline, and an extra link copy
goes onto a hub path edge whenever the running flow there exceeds the
installed capacity.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import pairwise
from typing import Mapping

from middlemile.model import EPS, EdgeKey, PlanningInstance, SteinerTree, edge_key


class InfeasibleDemand(ValueError):
    pass


class CapacityInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class Group:
    members: tuple[int, ...]
    hub: int
    demand: float
    internal: float

    def to_dict(self) -> dict:
        return {"members": list(self.members), "hub": self.hub, "demand": self.demand, "internal": self.internal}


@dataclass(frozen=True)
class CapacityPlan:
    groups: tuple[Group, ...]
    routes: dict[int, tuple[int, ...]]
    directed: dict[tuple[int, int], float]
    flow: dict[EdgeKey, float]
    copies: dict[EdgeKey, int]
    hub_hops: dict[int, int]

    @property
    def hub_distance_total(self) -> int:
        return sum(self.hub_hops.values())


def select_hub(members: tuple[int, ...] | list[int], tree: SteinerTree) -> int:
    return min(members, key=lambda m: (tree.depth[m], m))


def partition_groups(tree: SteinerTree, demands: Mapping[int, float], U: float) -> list[Group]:
    """Post-order accumulation from the landline root.

    ``demands`` is keyed by terminal id; tree vertices absent from it are
    relays. A vertex first merges the open sets handed up by its children
    (in id order) and then itself; whenever the next piece would push the open
    set past ``U`` the open set is closed as a group and the piece starts a
    new one.
    """
    for t, d in demands.items():
        if d > U + EPS:
            raise InfeasibleDemand(f"terminal {t} demand {d} exceeds link capacity {U}")

    groups: list[Group] = []

    def close(members: list[int], total: float) -> None:
        if not members:
            return
        hub = select_hub(members, tree)
        groups.append(Group(tuple(sorted(members)), hub, total, total - demands[hub]))

    pending: dict[int, tuple[list[int], float]] = {}
    for x in tree.postorder():
        members: list[int] = []
        total = 0.0
        pieces = [pending.pop(c) for c in tree.children[x]]
        if x in demands:
            pieces.append(([x], demands[x]))
        for piece, d in pieces:
            if not piece:
                continue
            if total + d > U + EPS:
                close(members, total)
                members, total = list(piece), d
            else:
                members.extend(piece)
                total += d
        pending[x] = (members, total)
    close(*pending.pop(tree.root))
    return groups


def install_capacity(
    tree: SteinerTree, groups: list[Group] | tuple[Group, ...], demands: Mapping[int, float], U: float
) -> CapacityPlan:
    directed: dict[tuple[int, int], float] = defaultdict(float)
    routes: dict[int, tuple[int, ...]] = {}
    for g in groups:
        up = tree.path_to_root(g.hub)
        for t in g.members:
            to_hub = tree.path(t, g.hub)
            for a, b in pairwise(to_hub):
                directed[(a, b)] += demands[t]
            routes[t] = tuple(to_hub + up[1:])

    flow = {e: directed[e] + directed[(e[1], e[0])] for e in tree.edges}
    copies = {e: 1 for e in tree.edges}
    for e, f in flow.items():
        if f > U + EPS:
            raise CapacityInvariantError(f"intra-group traffic {f} on {e} exceeds one link")

    for g in groups:
        for a, b in pairwise(tree.path_to_root(g.hub)):
            directed[(a, b)] += g.demand
            key = edge_key(a, b)
            flow[key] += g.demand
            while flow[key] > U * copies[key] + EPS:
                copies[key] += 1

    for e in tree.edges:
        if flow[e] > U * copies[e] + EPS:
            raise CapacityInvariantError(f"flow {flow[e]} on {e} exceeds {copies[e]} links")
    return CapacityPlan(
        groups=tuple(groups),
        routes=dict(sorted(routes.items())),
        directed={k: v for k, v in sorted(directed.items()) if v > 0},
        flow=flow,
        copies=copies,
        hub_hops={g.hub: tree.depth[g.hub] for g in groups},
    )


def residual_capacity(flow: float, U: float) -> float:
    """Unused bandwidth ``U * ceil(f / U) - f`` on the links carrying ``flow``.

    Flows within EPS above a multiple of ``U`` (zero included) count as that
    multiple.
    """
    if flow <= EPS:
        return 0.0
    links = max(1, math.ceil((flow - EPS) / U))
    return max(0.0, U * links - flow)


def tree_demands(instance: PlanningInstance, tree: SteinerTree) -> dict[int, float]:
    return {v: instance.demand(v) for v in tree.vertices if instance.is_terminal(v)}


def plan_capacity(instance: PlanningInstance, tree: SteinerTree) -> CapacityPlan:
    demands = tree_demands(instance, tree)
    U = instance.radio.U
    return install_capacity(tree, partition_groups(tree, demands, U), demands, U)
