"""Hyperlink replacement: p2mp sectors and omnidirectional discs.

Both passes only ever swap the links from a vertex to its children; the tree,
routes and flows stay as they are. Sector and disc sizes are tuned down to the
farthest covered child once a configuration is adopted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from middlemile.cnd import CapacityPlan
from middlemile.geometry import (
    ANG_EPS,
    LEN_EPS,
    angle_between,
    bearing,
    discs_overlap,
    in_sector,
    sectors_overlap,
    segment_intersects_sector,
)
from middlemile.model import EPS, EdgeKey, Heights, PlanningInstance, PowerTable, SteinerTree, edge_key

logger = logging.getLogger(__name__)

MIN_BW = 1e-6  # degrees; sector holding only on-axis children
MIN_RAD = 1e-6

PASS_ORDERS = {
    "none": (),
    "mp": ("mp",),
    "omni": ("omni",),
    "mp,omni": ("mp", "omni"),
    "omni,mp": ("omni", "mp"),
}


@dataclass(frozen=True)
class MPConfig:
    apex: int
    target: int
    bw: float
    rad: float
    covered: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"apex": self.apex, "target": self.target, "bw": self.bw, "rad": self.rad, "covered": list(self.covered)}


@dataclass(frozen=True)
class OmniConfig:
    center: int
    rad: float
    covered: tuple[int, ...]
    sd: tuple[int, ...]
    center_height: float
    sd_height: float

    def to_dict(self) -> dict:
        return {
            "center": self.center,
            "rad": self.rad,
            "covered": list(self.covered),
            "sd": list(self.sd),
            "center_height": self.center_height,
            "sd_height": self.sd_height,
        }


@dataclass(frozen=True)
class AntennaPower:
    kind: str
    at: int
    toward: tuple[int, ...]
    count: int
    reach: float
    power: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "at": self.at,
            "toward": list(self.toward),
            "count": self.count,
            "reach": self.reach,
            "power": self.power,
        }


@dataclass
class HybridPlan:
    mp: dict[int, tuple[MPConfig, ...]] = field(default_factory=dict)
    omni: dict[int, OmniConfig] = field(default_factory=dict)
    height_overrides: dict[int, float] = field(default_factory=dict)
    cost_delta: float | None = None
    power: list[AntennaPower] = field(default_factory=list)

    def replaced_edges(self) -> dict[EdgeKey, str]:
        out: dict[EdgeKey, str] = {}
        for cfgs in self.mp.values():
            for c in cfgs:
                for x in c.covered:
                    out[edge_key(c.apex, x)] = "MP"
        for o in self.omni.values():
            for x in o.covered:
                out[edge_key(o.center, x)] = "Omni"
        return out

    @property
    def adopted(self) -> int:
        return sum(len(c) for c in self.mp.values()) + len(self.omni)


def _pos(instance: PlanningInstance, v: int) -> tuple[float, float]:
    return instance.by_id[v].pos


def sector_covers(instance: PlanningInstance, e: EdgeKey, v: int, u: int, bw: float, rad: float) -> bool:
    """Range check for an edge under the sector at ``v`` pointed at ``u``.

    An edge touching ``v`` counts when its far end sits in the sector; any
    other edge counts when its segment meets the sector at all.
    """
    if u == v:
        raise ValueError("sector direction target equals its apex")
    apex, toward = _pos(instance, v), _pos(instance, u)
    a, b = e
    if v in e:
        x = b if a == v else a
        return in_sector(apex, toward, bw, rad, _pos(instance, x))
    return segment_intersects_sector(apex, toward, bw, rad, _pos(instance, a), _pos(instance, b))


def _eligible_children(
    tree: SteinerTree, capacity: CapacityPlan, v: int, taken: Iterable[EdgeKey]
) -> list[int]:
    taken = set(taken)
    return [
        x for x in tree.children[v]
        if capacity.copies[edge_key(v, x)] == 1 and edge_key(v, x) not in taken
    ]


def _mp_ok(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    v: int,
    u: int,
    bw: float,
    rad: float,
    X: list[int],
    adopted: list[MPConfig],
) -> bool:
    costs = instance.costs
    if not costs.ant("MP") < costs.ant("PP") * len(X):
        return False
    if sum(capacity.flow[edge_key(v, x)] for x in X) > instance.radio.U + EPS:
        return False
    own = {edge_key(v, x) for x in X}
    for e in tree.edges:
        if e not in own and sector_covers(instance, e, v, u, bw, rad):
            return False
    direction = bearing(_pos(instance, v), _pos(instance, u))
    return not any(
        sectors_overlap(direction, bw, bearing(_pos(instance, v), _pos(instance, c.target)), c.bw)
        for c in adopted
    )


def _tighten(instance: PlanningInstance, v: int, u: int, X: list[int]) -> tuple[float, float]:
    apex, toward = _pos(instance, v), _pos(instance, u)
    bw = max(2 * max(angle_between(apex, toward, _pos(instance, x)) for x in X), MIN_BW)
    rad = max(max(instance.dist(v, x) for x in X), MIN_RAD)
    return bw, rad


def _tune_sector(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    v: int,
    u: int,
    S: list[int],
    adopted: list[MPConfig],
) -> MPConfig | None:
    apex, toward = _pos(instance, v), _pos(instance, u)
    angle = {x: angle_between(apex, toward, _pos(instance, x)) for x in S}
    bw, rad = instance.radio.BWMAX, instance.radio.R_MP

    def members() -> list[int]:
        return [x for x in S if in_sector(apex, toward, bw, rad, _pos(instance, x))]

    X = members()
    while len(X) > 1 and not _mp_ok(instance, tree, capacity, v, u, bw, rad, X, adopted):
        # evict the child(ren) on the current angular boundary
        widest = max(angle[x] for x in X)
        survivors = [x for x in X if angle[x] < widest - ANG_EPS]
        if not survivors:
            return None
        bw = max(2 * max(angle[x] for x in survivors), MIN_BW)
        rad = max(instance.dist(v, x) for x in survivors)
        X = members()
    if len(X) > 1:
        return MPConfig(v, u, bw, rad, tuple(sorted(X)))
    return None


def mp_ant_replace(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    v: int,
    taken: Iterable[EdgeKey] = (),
) -> tuple[MPConfig, ...]:
    S = sorted(_eligible_children(tree, capacity, v, taken))
    adopted: list[MPConfig] = []
    while S:
        candidates = [c for u in S if (c := _tune_sector(instance, tree, capacity, v, u, S, adopted))]
        if not candidates:
            break
        best = candidates[0]
        for c in candidates[1:]:
            if len(c.covered) > len(best.covered):
                best = c
        bw, rad = _tighten(instance, v, best.target, list(best.covered))
        best = MPConfig(v, best.target, bw, rad, best.covered)
        adopted.append(best)
        S = [x for x in S if x not in best.covered]
    return tuple(adopted)


def _deepest_first(tree: SteinerTree) -> list[int]:
    inner = [x for x in tree.vertices if tree.children[x]]
    return sorted(inner, key=lambda x: (-tree.depth[x], x))


def mp_deploy(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    taken: Iterable[EdgeKey] = (),
) -> dict[int, tuple[MPConfig, ...]]:
    taken = set(taken)
    linkset: dict[int, tuple[MPConfig, ...]] = {}
    for v in _deepest_first(tree):
        cfgs = mp_ant_replace(instance, tree, capacity, v, taken)
        if cfgs:
            linkset[v] = cfgs
            taken.update(edge_key(v, x) for c in cfgs for x in c.covered)
    return linkset


def omni_overlap(pu: tuple[float, float], rad_u: float, pv: tuple[float, float], rad_v: float) -> bool:
    return discs_overlap(pu, rad_u, pv, rad_v)


def _omni_cost_ok(
    instance: PlanningInstance, h: Mapping[int, float], v: int, X: list[int], sd: list[int]
) -> bool:
    c, r = instance.costs, instance.radio
    tower = c.tower
    lhs = (
        c.ant("Omni")
        + c.ant("OmniSD") * len(X)
        + tower(max(r.HTOmni, h[v]))
        + sum(tower(r.HTOmniSD) for _ in sd)
    )
    rhs = 2 * c.ant("PP") * len(X) + tower(h[v]) + sum(tower(h[u]) for u in sd)
    return lhs < rhs


def omni_ant_replace(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    h: Mapping[int, float],
    v_omni: Mapping[int, float],
    v: int,
    taken: Iterable[EdgeKey] = (),
) -> OmniConfig | None:
    """Shrink the child set under a disc at ``v`` until cost, capacity and
    disjointness from ``v_omni`` (center -> radius) all hold."""
    r = instance.radio
    if not instance.is_terminal(v) and h[v] < r.HTOmni - EPS:
        return None  # relay towers are fixed and cannot be raised to HTOmni
    center = _pos(instance, v)
    X = [x for x in _eligible_children(tree, capacity, v, taken) if instance.dist(v, x) <= r.R_Omni + LEN_EPS]
    rad = r.R_Omni

    def flow(x: int) -> float:
        return capacity.flow[edge_key(v, x)]

    def subordinate() -> list[int]:
        return [x for x in X if tree.degree(x) == 1]

    def overlapping() -> bool:
        return any(omni_overlap(_pos(instance, c), rc, center, rad) for c, rc in v_omni.items())

    while X:
        sd = subordinate()
        clash = overlapping()
        if (
            _omni_cost_ok(instance, h, v, X, sd)
            and sum(flow(x) for x in X) <= r.U_Omni + EPS
            and not clash
        ):
            break
        if not clash:
            pool = [x for x in X if x not in sd] or X
            X.remove(max(pool, key=lambda x: (flow(x), x)))
        else:
            X.remove(max(X, key=lambda x: (instance.dist(v, x), x)))
            rad = max((instance.dist(v, x) for x in X), default=0.0)
    if not X:
        return None
    rad = max(max(instance.dist(v, x) for x in X), MIN_RAD)
    return OmniConfig(
        center=v,
        rad=rad,
        covered=tuple(sorted(X)),
        sd=tuple(sorted(subordinate())),
        center_height=max(r.HTOmni, h[v]),
        sd_height=r.HTOmniSD,
    )


def omni_deploy(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    h: Mapping[int, float],
    taken: Iterable[EdgeKey] = (),
) -> tuple[dict[int, OmniConfig], dict[int, float]]:
    taken = set(taken)
    v_omni: dict[int, float] = {}
    linkset: dict[int, OmniConfig] = {}
    overrides: dict[int, float] = {}
    for v in _deepest_first(tree):
        cfg = omni_ant_replace(instance, tree, capacity, h, v_omni, v, taken)
        if cfg is None:
            continue
        linkset[v] = cfg
        v_omni[v] = cfg.rad
        taken.update(edge_key(v, x) for x in cfg.covered)
        if cfg.center_height != h[v]:
            overrides[v] = cfg.center_height
        for x in cfg.sd:
            overrides[x] = cfg.sd_height
    return linkset, overrides


def assign_transmit_power(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    plan: HybridPlan,
    table: PowerTable | None = None,
) -> list[AntennaPower]:
    """Lowest table power reaching each antenna's farthest covered vertex."""
    table = table or instance.power_table
    replaced = plan.replaced_edges()
    out: list[AntennaPower] = []
    for a, b in tree.edges:
        d = instance.dist(a, b)
        kind = replaced.get((a, b))
        if kind is None:
            n = capacity.copies[(a, b)]
            out.append(AntennaPower("PP", a, (b,), n, d, table.lookup(d)))
            out.append(AntennaPower("PP", b, (a,), n, d, table.lookup(d)))
            continue
        apex = _hyper_apex(plan, (a, b), kind)
        far = b if apex == a else a
        out.append(AntennaPower("PP" if kind == "MP" else "OmniSD", far, (apex,), 1, d, table.lookup(d)))
    for cfgs in plan.mp.values():
        for c in cfgs:
            out.append(AntennaPower("MP", c.apex, c.covered, 1, c.rad, table.lookup(c.rad)))
    for o in plan.omni.values():
        out.append(AntennaPower("Omni", o.center, o.covered, 1, o.rad, table.lookup(o.rad)))
    return out


def _hyper_apex(plan: HybridPlan, e: EdgeKey, kind: str) -> int:
    if kind == "MP":
        for cfgs in plan.mp.values():
            for c in cfgs:
                if e in {edge_key(c.apex, x) for x in c.covered}:
                    return c.apex
    else:
        for o in plan.omni.values():
            if e in {edge_key(o.center, x) for x in o.covered}:
                return o.center
    raise KeyError(e)


def deploy_hybrid(
    instance: PlanningInstance,
    tree: SteinerTree,
    capacity: CapacityPlan,
    h: Heights,
    order: str = "mp,omni",
) -> HybridPlan:
    """Run the selected passes in order and return the combined plan.

    ``cost_delta`` and ``power`` are filled in by the caller, which owns cost
    accounting.
    """
    plan = HybridPlan()
    for step in PASS_ORDERS[order]:
        taken = set(plan.replaced_edges())
        if step == "mp":
            plan.mp = mp_deploy(instance, tree, capacity, taken)
        else:
            plan.omni, plan.height_overrides = omni_deploy(instance, tree, capacity, h, taken)
    logger.debug("hybrid %s: %d MP configs, %d omni configs", order, sum(map(len, plan.mp.values())), len(plan.omni))
    return plan
