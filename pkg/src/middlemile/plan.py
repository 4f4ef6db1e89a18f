"""End-to-end planning pipeline and the plan JSON document."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Any

from middlemile.analysis import BoundReport, bound_report
from middlemile.cnd import CapacityPlan, plan_capacity
from middlemile.hybrid import PASS_ORDERS, HybridPlan, assign_transmit_power, deploy_hybrid
from middlemile.instances import digest
from middlemile.model import CostReport, PlanningInstance, total_cost
from middlemile.steiner_tc import SteinerSolution, steiner_tc_solve

logger = logging.getLogger(__name__)

PLAN_FORMAT = "middlemile-plan/1"


@dataclass(frozen=True)
class PlanResult:
    instance: PlanningInstance
    solution: SteinerSolution
    capacity: CapacityPlan
    hybrid: HybridPlan | None
    cost_before: CostReport
    cost: CostReport
    bounds: BoundReport
    mode: str

    def final_heights(self) -> dict[int, float]:
        h = dict(self.solution.heights)
        if self.hybrid is not None:
            h.update(self.hybrid.height_overrides)
        return h


def run_pipeline(instance: PlanningInstance, hybrid: str = "mp,omni") -> PlanResult:
    if hybrid not in PASS_ORDERS:
        raise ValueError(f"unknown hybrid mode {hybrid!r}; choose from {', '.join(PASS_ORDERS)}")
    solution = steiner_tc_solve(instance)
    capacity = plan_capacity(instance, solution.tree)
    before = total_cost(instance, solution.heights, capacity)
    hp: HybridPlan | None = None
    after = before
    if hybrid != "none":
        hp = deploy_hybrid(instance, solution.tree, capacity, solution.heights, hybrid)
        after = total_cost(instance, solution.heights, capacity, hp)
        hp.cost_delta = after.total - before.total
    result = PlanResult(instance, solution, capacity, hp, before, after, bound_report(instance), hybrid)
    logger.info("plan: tower %.1f link %.1f antenna %.1f", after.tower, after.link, after.antenna)
    return result


def _pairs(d: dict) -> list[list]:
    return [[k, v] for k, v in sorted(d.items())]


def to_document(result: PlanResult, *, trace: bool = False) -> dict[str, Any]:
    inst, sol, cap = result.instance, result.solution, result.capacity
    power_plan = result.hybrid if result.hybrid is not None else HybridPlan()
    power = assign_transmit_power(inst, sol.tree, cap, power_plan)
    doc: dict[str, Any] = {
        "format": PLAN_FORMAT,
        "instance_digest": digest(inst),
        "hybrid_mode": result.mode,
        "heights": _pairs(sol.heights),
        "tree": {"root": sol.tree.root, "edges": [list(e) for e in sol.tree.edges]},
        "capacity": {
            "groups": [g.to_dict() for g in cap.groups],
            "routes": [[t, list(r)] for t, r in cap.routes.items()],
            "flow": [[a, b, cap.flow[(a, b)]] for a, b in sol.tree.edges],
            "copies": [[a, b, cap.copies[(a, b)]] for a, b in sol.tree.edges],
        },
        "hybrid": None,
        "power": [p.to_dict() for p in power],
        "cost": result.cost.to_dict(),
        "bounds": result.bounds.to_dict(),
    }
    if result.hybrid is not None:
        hp = result.hybrid
        doc["hybrid"] = {
            "mp": [c.to_dict() for v in sorted(hp.mp) for c in hp.mp[v]],
            "omni": [hp.omni[v].to_dict() for v in sorted(hp.omni)],
            "height_overrides": _pairs(hp.height_overrides),
            "cost_before": result.cost_before.to_dict(),
            "cost_delta": hp.cost_delta,
        }
    if trace:
        doc["trace"] = [r.to_dict() for r in sol.trace]
    return doc


def dumps_plan(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"
