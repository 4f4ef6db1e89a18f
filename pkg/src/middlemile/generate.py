"""Seeded random instance generation.

Vertex 0 is the landline, then the remaining terminals, then relays. Layouts
are redrawn from the same stream until every terminal connects at HTMAX, so
a seed always yields the same instance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from middlemile.defaults import DEFAULT_COSTS, DEFAULT_HEIGHT_STEP, DEFAULT_RADIO
from middlemile.instances import validate_instance
from middlemile.model import (
    CostTables,
    Edge,
    Kind,
    PlanningInstance,
    RadioParams,
    Vertex,
    cover,
    max_heights,
    snap,
)

OB_MODELS = ("uniform", "hill")


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenParams:
    terminals: tuple[int, int] = (4, 6)  # landline included
    non_terminals: tuple[int, int] = (0, 4)
    area: float = 12000.0
    demand: tuple[float, float] = (5.0, 40.0)
    ob_model: str = "uniform"
    ob_range: tuple[float, float] = (5.0, 30.0)
    hills: int = 3
    radio: RadioParams = DEFAULT_RADIO
    costs: CostTables = DEFAULT_COSTS
    height_step: float = DEFAULT_HEIGHT_STEP
    attempts: int = 200
    integer_demand: bool = True


def parse_range(text: str, kind: type = int) -> tuple:
    """``"3-6"`` -> ``(3, 6)``; a single value gives a degenerate range."""
    lo, sep, hi = text.partition("-") if not text.startswith("-") else (text, "", "")
    try:
        a = kind(lo)
        b = kind(hi) if sep else a
    except ValueError:
        raise ValueError(f"bad range {text!r}") from None
    if b < a:
        raise ValueError(f"empty range {text!r}")
    return (a, b)


def _terrain(rng: random.Random, params: GenParams):
    lo, hi = params.ob_range
    hills = [
        (rng.uniform(0, params.area), rng.uniform(0, params.area), rng.uniform(lo, hi), rng.uniform(0.1, 0.3) * params.area)
        for _ in range(params.hills)
    ]

    def height(x: float, y: float) -> float:
        return lo + sum(
            max(0.0, peak - lo) * math.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s)) for cx, cy, peak, s in hills
        )

    return height


def _draw(rng: random.Random, params: GenParams) -> PlanningInstance:
    r = params.radio
    n_a = rng.randint(*params.terminals)
    n_b = rng.randint(*params.non_terminals)
    levels = [snap(r.HTMIN + k * params.height_step) for k in range(int((r.HTMAX - r.HTMIN) / params.height_step + 1e-9) + 1)]

    vertices = []
    for i in range(n_a + n_b):
        x, y = rng.uniform(0, params.area), rng.uniform(0, params.area)
        if i == 0:
            vertices.append(Vertex(0, x, y, Kind.LANDLINE, 0.0))
        elif i < n_a:
            d = rng.uniform(*params.demand)
            vertices.append(Vertex(i, x, y, Kind.TERMINAL, float(round(d)) if params.integer_demand else d))
        else:
            vertices.append(Vertex(i, x, y, Kind.NON_TERMINAL, 0.0, rng.choice(levels)))

    terrain = _terrain(rng, params) if params.ob_model == "hill" else None
    edges = []
    for a, b in combinations(vertices, 2):
        if math.dist(a.pos, b.pos) > r.R:
            continue
        if terrain is None:
            ob = rng.uniform(*params.ob_range)
        else:
            ob = terrain((a.x + b.x) / 2, (a.y + b.y) / 2)
        edges.append(Edge(a.id, b.id, round(ob, 3)))
    return PlanningInstance(tuple(vertices), tuple(edges), 0, r, params.costs, params.height_step)


def generate_instance(seed: int, params: GenParams = GenParams()) -> PlanningInstance:
    if params.ob_model not in OB_MODELS:
        raise ValueError(f"unknown obstruction model {params.ob_model!r}")
    rng = random.Random(seed)
    for _ in range(params.attempts):
        inst = _draw(rng, params)
        if validate_instance(inst):
            continue
        if cover(inst, max_heights(inst)).phi == 1:
            return inst
    raise GenerationError(f"seed {seed}: no feasible layout in {params.attempts} attempts")

