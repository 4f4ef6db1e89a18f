from __future__ import annotations

from dataclasses import replace

import pytest

from middlemile.defaults import DEFAULT_COSTS, DEFAULT_RADIO
from middlemile.model import Edge, Kind, PlanningInstance, TowerCost, Vertex

KINDS = {"L": Kind.LANDLINE, "T": Kind.TERMINAL, "N": Kind.NON_TERMINAL}


def make_instance(
    vertices,
    edges,
    *,
    step: float = 5.0,
    tower=None,
    antenna=None,
    link=None,
    **radio,
) -> PlanningInstance:
    """``vertices``: (id, x, y, kind letter[, demand[, fixed_height]]); ``edges``: (u, v, ob)."""
    vs = []
    for row in vertices:
        vid, x, y, k, *rest = row
        demand = rest[0] if rest else (0.0 if k != "T" else 10.0)
        fixed = rest[1] if len(rest) > 1 else (radio.get("HTMIN", DEFAULT_RADIO.HTMIN) if k == "N" else None)
        vs.append(Vertex(vid, float(x), float(y), KINDS[k], float(demand), fixed))
    costs = DEFAULT_COSTS
    if tower is not None:
        costs = replace(costs, tower=TowerCost(tuple(tower)))
    if antenna is not None:
        costs = replace(costs, antenna={**costs.antenna, **antenna})
    if link is not None:
        costs = replace(costs, link=link)
    landline = next(v.id for v in vs if v.kind is Kind.LANDLINE)
    return PlanningInstance(
        tuple(vs),
        tuple(Edge(u, v, float(ob)) for u, v, ob in edges),
        landline,
        replace(DEFAULT_RADIO, **radio),
        costs,
        height_step=step,
    )


def linear_tower(lo: float = 5.0, hi: float = 45.0, step: float = 5.0, rate: float = 10.0):
    out = []
    h = lo
    while h <= hi + 1e-9:
        out.append((h, rate * h))
        h += step
    return out


@pytest.fixture
def two_terminals() -> PlanningInstance:
    return make_instance([(0, 0, 0, "L"), (1, 1000, 0, "T")], [(0, 1, 10)])



# Acceptance criteria report: tests marked ``criterion(n, title)`` get one
# PASS/FAIL line each in the terminal summary, with any "detail" property.
_criteria: dict[int, tuple[str, bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and rep.passed):
        return
    n, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if rep.failed:
        detail = detail or str(rep.longrepr).strip().splitlines()[-1]
    _criteria[n] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_criteria):
        title, ok, detail = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else ""))
