"""Closed-form performance bounds and the worst-case chain construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from middlemile.defaults import DEFAULT_COSTS, DEFAULT_RADIO
from middlemile.model import EPS, CostTables, Edge, Kind, PlanningInstance, RadioParams, Vertex

CASES = (1, 2, 3)


def performance_ratio_bound(a: int, b: int, gamma: float | None, case: int) -> float:
    """Approximation factor of the full pipeline for ``a`` terminals, ``b`` relays.

    Case 1: all demand fits one link. Case 2: uniform demand. Case 3:
    arbitrary demands with ``gamma`` taken against the largest demand.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if a < 2:
        raise ValueError("need at least two terminals")
    if case == 1:
        return 1 + 2 * math.log(a) + b / a
    if gamma is None or not gamma > 0:
        raise ValueError("gamma must be positive")
    return 3 + math.log(a) + b / a + (a + 2 * b) / gamma


@dataclass(frozen=True)
class BoundReport:
    a: int
    b: int
    gamma: float | None
    case: int
    ratio: float

    def to_dict(self) -> dict:
        return {"A": self.a, "B": self.b, "gamma": self.gamma, "case": self.case, "ratio": self.ratio}


def bound_report(instance: PlanningInstance) -> BoundReport:
    U = instance.radio.U
    demands = [instance.demand(t) for t in instance.terminals if t != instance.landline]
    a, b = len(instance.terminals), len(instance.non_terminals)
    if sum(demands) <= U + EPS:
        case = 1
        gamma = U / max(demands) if demands and max(demands) > 0 else None
    elif max(demands) - min(demands) <= EPS:
        case, gamma = 2, U / demands[0]
    else:
        case, gamma = 3, U / max(demands)
    return BoundReport(a, b, gamma, case, performance_ratio_bound(a, b, gamma, case))


def worst_chain_hub_distance(a: int, b: int, gamma: int) -> int:
    """Total hub-to-landline hops on the worst chain: ``(a/gamma - 1)(b + a/2)``."""
    if a <= 0 or b < 0 or gamma <= 0:
        raise ValueError("parameters must be positive")
    if a % gamma:
        raise ValueError(f"gamma={gamma} does not divide |A|={a}")
    groups = a // gamma
    # (groups - 1) * (b + a/2), kept integral
    return (groups - 1) * (2 * b + a) // 2


def build_worst_chain(
    a: int,
    b: int,
    gamma: int,
    demand: float,
    *,
    spacing: float = 1000.0,
    radio: RadioParams = DEFAULT_RADIO,
    costs: CostTables = DEFAULT_COSTS,
) -> PlanningInstance:
    """Path graph: landline 0, relays ``1..b``, then terminals ``b+1..b+a-1``.

    All obstructions are zero so every height works; link capacity is set to
    ``gamma * demand``. The landline carries the same demand as the other
    terminals so that it fills a slot of the last group; with zero demand it
    would absorb an extra terminal when ``gamma == 1``.
    """
    if a < 2 or b < 0 or gamma <= 0 or demand <= 0 or spacing <= 0:
        raise ValueError("parameters must be positive (and a >= 2)")
    if spacing > radio.R:
        raise ValueError("chain spacing exceeds the radio range")
    radio = replace(radio, U=gamma * demand)
    n = a + b
    vertices = []
    for i in range(n):
        if i == 0:
            vertices.append(Vertex(0, 0.0, 0.0, Kind.LANDLINE, float(demand)))
        elif i <= b:
            vertices.append(Vertex(i, i * spacing, 0.0, Kind.NON_TERMINAL, 0.0, radio.HTMIN))
        else:
            vertices.append(Vertex(i, i * spacing, 0.0, Kind.TERMINAL, float(demand)))
    edges = tuple(Edge(i, i + 1, 0.0) for i in range(n - 1))
    return PlanningInstance(tuple(vertices), edges, 0, radio, costs, height_step=5.0)
