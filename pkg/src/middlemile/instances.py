"""Instance JSON (de)serialization and structural validation."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

from middlemile.model import (
    ANTENNA_KINDS,
    DEFAULT_POWER_TABLE,
    EPS,
    CostTables,
    Edge,
    InfeasibleInstance,
    InstanceError,
    Kind,
    LinkCost,
    PlanningInstance,
    PowerTable,
    RadioParams,
    TowerCost,
    Vertex,
    cover,
    max_heights,
)

RADIO_FIELDS = ("U", "R", "HTMIN", "HTMAX", "R_MP", "BWMAX", "U_Omni", "R_Omni", "HTOmni", "HTOmniSD")


def _num(x: Any) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InstanceError([f"expected a number, got {x!r}"])
    return x


def from_dict(data: dict[str, Any], *, validate: bool = True) -> PlanningInstance:
    try:
        vertices = tuple(
            Vertex(
                id=int(v["id"]),
                x=_num(v["x"]),
                y=_num(v["y"]),
                kind=Kind(v["kind"]),
                demand=_num(v.get("demand", 0)),
                fixed_height=None if v.get("fixed_height") is None else _num(v["fixed_height"]),
            )
            for v in data["vertices"]
        )
        edges = tuple(Edge(int(e["u"]), int(e["v"]), _num(e["ob"])) for e in data["edges"])
        radio = RadioParams(**{k: _num(data["radio"][k]) for k in RADIO_FIELDS})
        c = data["costs"]
        clink = c["cLink"]
        link = LinkCost(table=tuple(clink)) if isinstance(clink, list) else LinkCost(unit=_num(clink))
        costs = CostTables(
            tower=TowerCost(tuple((_num(h), _num(v)) for h, v in c["cTower"])),
            link=link,
            antenna={k: _num(c["cAntenna"][k]) for k in ANTENNA_KINDS},
        )
        power = data.get("power_table")
        inst = PlanningInstance(
            vertices=vertices,
            edges=edges,
            landline=int(data["landline"]),
            radio=radio,
            costs=costs,
            height_step=_num(data.get("height_step", 1.0)),
            power_table=PowerTable(tuple((d, p) for d, p in power)) if power else DEFAULT_POWER_TABLE,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError([f"malformed instance: {exc!r}"]) from exc
    if validate:
        problems = validate_instance(inst)
        if problems:
            raise InstanceError(problems)
    return inst


def to_dict(inst: PlanningInstance) -> dict[str, Any]:
    c = inst.costs
    return {
        "vertices": [
            {
                "id": v.id,
                "x": v.x,
                "y": v.y,
                "kind": v.kind.value,
                "demand": v.demand,
                "fixed_height": v.fixed_height,
            }
            for v in inst.vertices
        ],
        "edges": [{"u": e.u, "v": e.v, "ob": e.ob} for e in inst.edges],
        "landline": inst.landline,
        "radio": {k: getattr(inst.radio, k) for k in RADIO_FIELDS},
        "costs": {
            "cTower": [[h, v] for h, v in c.tower.breakpoints],
            "cLink": list(c.link.table) if c.link.table is not None else c.link.unit,
            "cAntenna": {k: c.antenna[k] for k in ANTENNA_KINDS},
        },
        "height_step": inst.height_step,
        "power_table": [[d, p] for d, p in inst.power_table.rows],
    }


def dumps(inst: PlanningInstance) -> str:
    return json.dumps(to_dict(inst), indent=2) + "\n"


def load(path: str | Path, *, validate: bool = True) -> PlanningInstance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceError([f"{path}: not valid JSON ({exc})"]) from exc
    return from_dict(data, validate=validate)


def save(inst: PlanningInstance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst), encoding="utf-8")


def digest(inst: PlanningInstance) -> str:
    canon = json.dumps(to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def validate_instance(inst: PlanningInstance) -> list[str]:
    """Structural checks; feasibility is separate (:func:`check_feasible`)."""
    p: list[str] = []
    r = inst.radio
    for name in RADIO_FIELDS:
        if not getattr(r, name) > 0:
            p.append(f"radio.{name} must be positive")
    if r.HTMIN > r.HTMAX:
        p.append("HTMIN exceeds HTMAX")
    if r.R_MP > r.R + EPS:
        p.append("R_MP exceeds R")
    if not inst.height_step > 0:
        p.append("height_step must be positive")

    ids = [v.id for v in inst.vertices]
    if len(set(ids)) != len(ids):
        p.append("duplicate vertex ids")
    landlines = [v.id for v in inst.vertices if v.kind is Kind.LANDLINE]
    if landlines != [inst.landline]:
        p.append(f"expected exactly one landline with id {inst.landline}, found {landlines}")
    if len(inst.terminals) < 2:
        p.append("need at least two terminals (landline included)")
    for v in inst.vertices:
        if not (math.isfinite(v.x) and math.isfinite(v.y)):
            p.append(f"vertex {v.id} has a non-finite position")
        if v.kind is Kind.NON_TERMINAL:
            if v.demand != 0:
                p.append(f"non-terminal {v.id} has demand {v.demand}")
            if v.fixed_height is None:
                p.append(f"non-terminal {v.id} lacks fixed_height")
            elif not (r.HTMIN - EPS <= v.fixed_height <= r.HTMAX + EPS):
                p.append(f"non-terminal {v.id} fixed_height {v.fixed_height} outside [HTMIN, HTMAX]")
        else:
            if v.fixed_height is not None:
                p.append(f"terminal {v.id} must not carry fixed_height")
            if v.demand < 0 or v.demand > r.U + EPS:
                p.append(f"terminal {v.id} demand {v.demand} outside [0, U]")
            if v.kind is Kind.TERMINAL and v.demand == 0:
                p.append(f"terminal {v.id} has zero demand")

    known = set(ids)
    seen: set[tuple[int, int]] = set()
    for e in inst.edges:
        if e.u not in known or e.v not in known:
            p.append(f"edge ({e.u}, {e.v}) references an unknown vertex")
            continue
        if e.u == e.v:
            p.append(f"self-loop at {e.u}")
        if e.key in seen:
            p.append(f"duplicate edge {e.key}")
        seen.add(e.key)
        if e.ob < 0:
            p.append(f"edge {e.key} has negative obstruction")
        if inst.dist(e.u, e.v) > r.R + EPS:
            p.append(f"edge {e.key} is longer than R")

    tower = inst.costs.tower
    if not tower.is_monotone():
        p.append("cTower is not monotone non-decreasing")
    if tower.max_height < max(r.HTMAX, r.HTOmni, r.HTOmniSD) - EPS:
        p.append("cTower table does not reach HTMAX / HTOmni / HTOmniSD")
    if any(c < 0 for _, c in tower.breakpoints):
        p.append("negative tower cost")
    if any(inst.costs.ant(k) < 0 for k in ANTENNA_KINDS):
        p.append("negative antenna cost")
    link = inst.costs.link
    if (link.unit is not None and link.unit < 0) or (link.table is not None and min(link.table, default=0) < 0):
        p.append("negative link cost")
    return p


def check_feasible(inst: PlanningInstance) -> None:
    """Raise :class:`InfeasibleInstance` unless all terminals connect at HTMAX."""
    state = cover(inst, max_heights(inst))
    if state.phi != 1:
        raise InfeasibleInstance(f"terminals fall into {state.phi} components even at HTMAX")
