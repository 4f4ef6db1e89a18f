"""Independent re-verification of a plan document against its instance.

Works only from the JSON document and the instance. Geometry goes through
shapely and plain vector arithmetic rather than the planner's own predicates,
and flows are rebuilt from the emitted routes.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Any

import networkx as nx
from shapely.geometry import LineString, Polygon

from middlemile.instances import digest
from middlemile.model import PlanningInstance

TOL = 1e-6


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def sector_polygon(apex, toward, bw: float, rad: float) -> Polygon:
    """Polygon inscribed in the closed sector; it never pokes outside it."""
    theta = math.atan2(toward[1] - apex[1], toward[0] - apex[0])
    half = math.radians(bw) / 2
    n = max(2, math.ceil(bw * 2))
    arc = [
        (apex[0] + rad * math.cos(theta - half + 2 * half * i / n), apex[1] + rad * math.sin(theta - half + 2 * half * i / n))
        for i in range(n + 1)
    ]
    return Polygon([apex, *arc])


def _cos_to(apex, toward, p) -> float:
    ax, ay = toward[0] - apex[0], toward[1] - apex[1]
    bx, by = p[0] - apex[0], p[1] - apex[1]
    na, nb = math.hypot(ax, ay), math.hypot(bx, by)
    if nb == 0:
        return 1.0
    return (ax * bx + ay * by) / (na * nb)


def _point_in_sector(apex, toward, bw, rad, p, slack: float) -> bool:
    """Membership with ``slack`` widening (>0) or narrowing (<0) the sector."""
    d = math.dist(apex, p)
    if d > rad + slack * max(1.0, rad):
        return False
    limit = math.radians(bw / 2) + slack
    if limit >= math.pi:
        return True
    if limit < 0:
        return d == 0
    return _cos_to(apex, toward, p) >= math.cos(limit)


def validate_plan(instance: PlanningInstance, doc: dict[str, Any]) -> list[str]:
    p: list[str] = []
    try:
        _validate(instance, doc, p)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        p.append(f"malformed plan document: {exc!r}")
    return p


def _validate(inst: PlanningInstance, doc: dict[str, Any], p: list[str]) -> None:
    r = inst.radio
    costs = inst.costs
    pos = {v.id: v.pos for v in inst.vertices}
    dem = {v.id: v.demand for v in inst.vertices}
    terms = {v.id for v in inst.vertices if v.is_terminal}
    ln = inst.landline

    if doc.get("instance_digest") != digest(inst):
        p.append("instance digest mismatch")

    # heights
    h = {int(k): float(x) for k, x in doc["heights"]}
    grid = [r.HTMIN + k * inst.height_step for k in range(int((r.HTMAX - r.HTMIN) / inst.height_step + TOL) + 1)]
    for v in inst.vertices:
        if v.id not in h:
            p.append(f"vertex {v.id} has no height")
        elif v.is_terminal:
            if not any(abs(h[v.id] - g) <= TOL for g in grid):
                p.append(f"terminal {v.id} height {h[v.id]} off grid")
        elif abs(h[v.id] - v.fixed_height) > TOL:
            p.append(f"relay {v.id} height changed")

    # tree
    obs = {_key(e.u, e.v): e.ob for e in inst.edges}
    tree_edges = [_key(a, b) for a, b in doc["tree"]["edges"]]
    g = nx.Graph()
    g.add_node(ln)
    g.add_edges_from(tree_edges)
    if doc["tree"]["root"] != ln:
        p.append("tree is not rooted at the landline")
    if not nx.is_tree(g):
        p.append("tree edges do not form a tree")
        return
    missing = terms - set(g.nodes)
    if missing:
        p.append(f"terminals {sorted(missing)} not in tree")
    for e in tree_edges:
        if e not in obs:
            p.append(f"tree edge {e} is not an instance edge")
        elif h[e[0]] + h[e[1]] < 2 * obs[e] - TOL:
            p.append(f"tree edge {e} lacks line of sight")
    for x in g.nodes:
        if g.degree(x) == 1 and x not in terms:
            p.append(f"relay {x} is a dangling leaf")
    parent = {ln: None}
    depth = {ln: 0}
    for a, b in nx.bfs_edges(g, ln):
        parent[b] = a
        depth[b] = depth[a] + 1

    # capacity
    cap = doc["capacity"]
    flow = {_key(a, b): float(f) for a, b, f in cap["flow"]}
    copies = {_key(a, b): int(n) for a, b, n in cap["copies"]}
    if set(flow) != set(tree_edges) or set(copies) != set(tree_edges):
        p.append("flow/copies do not match the tree edges")
    routes = {int(t): [int(x) for x in path] for t, path in cap["routes"]}
    seen_members: list[int] = []
    hub_of: dict[int, int] = {}
    for grp in cap["groups"]:
        members = grp["members"]
        seen_members += members
        total = sum(dem[m] for m in members)
        hub = grp["hub"]
        if hub not in members:
            p.append(f"hub {hub} is not a member of its group")
            continue
        if hub != min(members, key=lambda m: (depth.get(m, math.inf), m)):
            p.append(f"hub {hub} is not the member closest to the landline")
        if total > r.U + TOL:
            p.append(f"group with hub {hub} carries {total} > U")
        if total - dem[hub] > r.U - dem[hub] + TOL:
            p.append(f"group with hub {hub} internal traffic too large")
        if abs(grp["demand"] - total) > TOL or abs(grp["internal"] - (total - dem[hub])) > TOL:
            p.append(f"group with hub {hub} misreports its demand")
        for m in members:
            hub_of[m] = hub
    if sorted(seen_members) != sorted(terms & set(g.nodes)):
        p.append("groups do not partition the terminals")

    directed: dict[tuple[int, int], float] = defaultdict(float)
    for t in sorted(terms & set(g.nodes)):
        path = routes.get(t)
        if not path or path[0] != t or path[-1] != ln:
            p.append(f"route of {t} does not run from it to the landline")
            continue
        if t in hub_of and hub_of[t] not in path:
            p.append(f"route of {t} skips its hub")
        for a, b in zip(path, path[1:]):
            if not g.has_edge(a, b):
                p.append(f"route of {t} leaves the tree at ({a}, {b})")
            directed[(a, b)] += dem[t]
    for e in tree_edges:
        f = directed[e] + directed[(e[1], e[0])]
        if abs(f - flow.get(e, math.nan)) > TOL:
            p.append(f"flow on {e} is {flow.get(e)} but routes give {f}")
        if copies.get(e, 0) < 1:
            p.append(f"edge {e} has no link installed")
        if flow.get(e, 0.0) > r.U * copies.get(e, 0) + TOL:
            p.append(f"edge {e} flow exceeds installed capacity")
    for x in g.nodes:
        out = sum(f for (a, _), f in directed.items() if a == x)
        inn = sum(f for (_, b), f in directed.items() if b == x)
        want = -sum(dem[t] for t in terms if t != ln and t in g) if x == ln else dem[x]
        if abs(out - inn - want) > TOL:
            p.append(f"flow conservation fails at {x}")
    if sum(dem[t] for t in terms) <= r.U + TOL and any(n != 1 for n in copies.values()):
        p.append("single-link demand but extra copies installed")

    # hybrid
    hyb = doc.get("hybrid")
    final_h = dict(h)
    replaced: dict[tuple[int, int], str] = {}
    n_mp = n_omni = 0
    if hyb is not None:
        n_mp, n_omni = len(hyb["mp"]), len(hyb["omni"])
        _check_mp(inst, hyb["mp"], tree_edges, parent, flow, copies, pos, replaced, p)
        _check_omni(inst, hyb["omni"], g, parent, flow, copies, pos, h, replaced, p)
        overrides = {int(k): float(x) for k, x in hyb["height_overrides"]}
        expected: dict[int, float] = {}
        for o in hyb["omni"]:
            if o["center_height"] != h[o["center"]]:
                expected[o["center"]] = max(r.HTOmni, h[o["center"]])
            for x in o["sd"]:
                expected[x] = r.HTOmniSD
        if overrides != expected:
            p.append("height overrides do not match omni placements")
        final_h.update(overrides)
        for e in tree_edges:
            if replaced.get(e) != "Omni" and final_h[e[0]] + final_h[e[1]] < 2 * obs[e] - TOL:
                p.append(f"p2p edge {e} loses line of sight after overrides")

    # cost
    tower = sum(costs.tower(final_h[t]) for t in terms)
    link = sum(costs.link(n) for n in copies.values())
    antenna = costs.ant("MP") * n_mp + costs.ant("Omni") * n_omni
    for e, n in copies.items():
        kind = replaced.get(e)
        antenna += costs.ant("PP") if kind == "MP" else costs.ant("OmniSD") if kind == "Omni" else 2 * costs.ant("PP") * n
    c = doc["cost"]
    for name, val in (("tower", tower), ("link", link), ("antenna", antenna), ("total", tower + link + antenna)):
        if abs(c[name] - val) > TOL * max(1.0, abs(val)):
            p.append(f"{name} cost {c[name]} but recomputed {val}")
    if hyb is not None:
        before = hyb["cost_before"]["total"]
        if c["total"] > before + TOL:
            p.append("hyperlinks increased total cost")
        if (n_mp or n_omni) and not c["total"] < before - TOL:
            p.append("hyperlinks adopted without a cost decrease")
        if abs(hyb["cost_delta"] - (c["total"] - before)) > TOL * max(1.0, before):
            p.append("cost_delta inconsistent")


def _check_mp(inst, cfgs, tree_edges, parent, flow, copies, pos, replaced, p) -> None:
    r, costs = inst.radio, inst.costs
    by_apex: dict[int, list] = defaultdict(list)
    for c in cfgs:
        v, u, bw, rad, X = c["apex"], c["target"], c["bw"], c["rad"], c["covered"]
        tag = f"MP sector at {v} toward {u}"
        if u == v:
            p.append(f"{tag}: direction target equals apex")
            continue
        if not (0 < bw <= r.BWMAX + TOL and 0 < rad <= r.R_MP + TOL):
            p.append(f"{tag}: beamwidth/radius out of bounds")
        if len(X) < 2:
            p.append(f"{tag}: covers fewer than two children")
        if not costs.ant("MP") < costs.ant("PP") * len(X):
            p.append(f"{tag}: violates the cost constraint")
        own = set()
        for x in X:
            e = _key(v, x)
            own.add(e)
            if parent.get(x) != v:
                p.append(f"{tag}: {x} is not a child")
            if copies.get(e) != 1:
                p.append(f"{tag}: edge {e} has multiple copies")
            if e in replaced:
                p.append(f"{tag}: edge {e} already replaced")
            replaced[e] = "MP"
            if not _point_in_sector(pos[v], pos[u], bw, rad, pos[x], TOL):
                p.append(f"{tag}: child {x} out of range")
        if sum(flow.get(e, 0.0) for e in own) > r.U + TOL:
            p.append(f"{tag}: violates the capacity constraint")
        poly = sector_polygon(pos[v], pos[u], bw, rad)
        for e in tree_edges:
            if e in own:
                continue
            if v in e:
                far = e[1] if e[0] == v else e[0]
                if _point_in_sector(pos[v], pos[u], bw, rad, pos[far], -TOL):
                    p.append(f"{tag}: interferes with edge {e}")
            elif LineString([pos[e[0]], pos[e[1]]]).intersects(poly):
                p.append(f"{tag}: interferes with edge {e}")
        by_apex[v].append((math.atan2(pos[u][1] - pos[v][1], pos[u][0] - pos[v][0]), bw))
    for v, sectors in by_apex.items():
        for i, (d1, b1) in enumerate(sectors):
            for d2, b2 in sectors[i + 1:]:
                gap = abs(math.atan2(math.sin(d1 - d2), math.cos(d1 - d2)))
                if gap < math.radians(b1 + b2) / 2 - TOL:
                    p.append(f"MP sectors at {v} overlap")


def _check_omni(inst, cfgs, g, parent, flow, copies, pos, h, replaced, p) -> None:
    r, costs = inst.radio, inst.costs
    tower = costs.tower
    for c in cfgs:
        v, rad, X, sd = c["center"], c["rad"], c["covered"], c["sd"]
        tag = f"omni disc at {v}"
        if not X:
            p.append(f"{tag}: covers nothing")
        if not (0 < rad <= r.R_Omni + TOL):
            p.append(f"{tag}: radius out of bounds")
        if not inst.by_id[v].is_terminal and h[v] < r.HTOmni - TOL:
            p.append(f"{tag}: relay tower below HTOmni")
        for x in X:
            e = _key(v, x)
            if parent.get(x) != v:
                p.append(f"{tag}: {x} is not a child")
            if copies.get(e) != 1:
                p.append(f"{tag}: edge {e} has multiple copies")
            if e in replaced:
                p.append(f"{tag}: edge {e} already replaced")
            replaced[e] = "Omni"
            if math.dist(pos[v], pos[x]) > rad + TOL:
                p.append(f"{tag}: child {x} out of range")
        if sorted(sd) != sorted(x for x in X if g.degree(x) == 1):
            p.append(f"{tag}: subordinate set is wrong")
        if sum(flow.get(_key(v, x), 0.0) for x in X) > r.U_Omni + TOL:
            p.append(f"{tag}: violates the capacity constraint")
        lhs = (
            costs.ant("Omni") + costs.ant("OmniSD") * len(X)
            + tower(max(r.HTOmni, h[v])) + len(sd) * tower(r.HTOmniSD)
        )
        rhs = 2 * costs.ant("PP") * len(X) + tower(h[v]) + sum(tower(h[x]) for x in sd)
        if not lhs < rhs:
            p.append(f"{tag}: violates the cost constraint")
    for i, a in enumerate(cfgs):
        for b in cfgs[i + 1:]:
            if math.dist(pos[a["center"]], pos[b["center"]]) < a["rad"] + b["rad"] - TOL:
                p.append(f"omni discs at {a['center']} and {b['center']} overlap")
