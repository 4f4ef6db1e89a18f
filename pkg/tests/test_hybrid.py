import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import make_instance
from middlemile.checks import validate_plan
from middlemile.cnd import plan_capacity
from middlemile.generate import generate_instance
from middlemile.hybrid import (
    HybridPlan,
    OmniConfig,
    assign_transmit_power,
    mp_ant_replace,
    mp_deploy,
    omni_ant_replace,
    omni_deploy,
    omni_overlap,
    sector_covers,
)
from middlemile.model import PowerTable, SteinerTree, total_cost
from middlemile.plan import run_pipeline, to_document


def star(children, *, demand=10.0, **kw):
    """Landline at the origin with the given leaf children (id, x, y[, demand])."""
    verts = [(0, 0, 0, "L")] + [(c[0], c[1], c[2], "T", c[3] if len(c) > 3 else demand) for c in children]
    inst = make_instance(verts, [(0, c[0], 5) for c in children], **kw)
    tree = SteinerTree(0, tuple((0, c[0]) for c in children))
    return inst, tree, plan_capacity(inst, tree)


def test_sector_covers_examples():
    inst = make_instance(
        [(0, 0, 0, "L"), (1, 1, 0, "T"), (2, 3, 0, "T"), (3, 0, 5, "T"), (4, 20, -1, "T"), (5, 20, 1, "T")],
        [],
    )
    assert sector_covers(inst, (0, 2), 0, 1, 90, 10)
    assert not sector_covers(inst, (0, 3), 0, 1, 90, 10)
    assert not sector_covers(inst, (4, 5), 0, 1, 90, 10)
    with pytest.raises(ValueError):
        sector_covers(inst, (0, 2), 0, 0, 90, 10)


def test_three_children_in_one_sector():
    inst, tree, cap = star([(1, 1000, 0), (2, 2000, 100), (3, 3000, -200)])
    (cfg,) = mp_ant_replace(inst, tree, cap, 0)
    assert cfg.covered == (1, 2, 3)
    assert cfg.bw <= 30
    # tightened to the covered set
    assert cfg.rad == pytest.approx(max(inst.dist(0, x) for x in (1, 2, 3)))


def test_two_children_allowed_one_rejected():
    inst, tree, cap = star([(1, 1000, 100), (2, 1000, -100)])
    (cfg,) = mp_ant_replace(inst, tree, cap, 0)
    assert cfg.covered == (1, 2)

    inst, tree, cap = star([(1, 1000, 0), (2, -1000, 0)])  # opposite sides
    assert mp_ant_replace(inst, tree, cap, 0) == ()


def test_foreign_edge_blocks_sector():
    verts = [(0, 0, 0, "L"), (1, 1000, 100, "T"), (2, 1000, -100, "T"), (3, 500, 0, "T"), (4, 500, 3000, "T")]
    inst = make_instance(verts, [(0, 1, 5), (0, 2, 5), (0, 3, 5), (3, 4, 5)])
    tree = SteinerTree(0, ((0, 1), (0, 2), (0, 3), (3, 4)))
    cap = plan_capacity(inst, tree)
    assert mp_ant_replace(inst, tree, cap, 0) == ()


def test_sector_capacity_limits_cover():
    inst, tree, cap = star([(1, 3000, 400, 60), (2, 2000, 50, 50), (3, 3000, -100, 45)])
    assert set(cap.copies.values()) == {1}
    # all three would carry 155 > U = 100; dropping the widest member (1) leaves 95
    (cfg,) = mp_ant_replace(inst, tree, cap, 0)
    assert cfg.covered == (2, 3)


def test_mp_deploy_visits_deeper_first():
    verts = [(0, 0, 0, "L"), (1, 1000, 0, "T"), (2, 2000, 100, "T"), (3, 2000, -100, "T")]
    inst = make_instance(verts, [(0, 1, 5), (1, 2, 5), (1, 3, 5)])
    tree = SteinerTree(0, ((0, 1), (1, 2), (1, 3)))
    linkset = mp_deploy(inst, tree, plan_capacity(inst, tree))
    assert list(linkset) == [1]
    assert linkset[1][0].covered == (2, 3)


def test_mp_deploy_empty_without_branching():
    inst = make_instance([(0, 0, 0, "L"), (1, 1000, 0, "T"), (2, 2000, 0, "T")], [(0, 1, 5), (1, 2, 5)])
    tree = SteinerTree(0, ((0, 1), (1, 2)))
    assert mp_deploy(inst, tree, plan_capacity(inst, tree)) == {}


@pytest.mark.parametrize("d, expected", [(8, True), (10, False), (9, False)])
def test_omni_overlap_examples(d, expected):
    assert omni_overlap((0, 0), 5, (d, 0), 4) is expected


TALL = [(10, 100), (15, 300), (20, 700), (25, 1300), (30, 2000), (35, 3000)]


def test_omni_covers_tall_leaves():
    inst, tree, cap = star([(1, 1000, 0), (2, -1000, 0), (3, 0, 1000)], tower=TALL)
    h = {0: 30.0, 1: 30.0, 2: 30.0, 3: 30.0}
    cfg = omni_ant_replace(inst, tree, cap, h, {}, 0)
    assert cfg is not None
    assert cfg.covered == (1, 2, 3) and cfg.sd == (1, 2, 3)
    assert cfg.rad == pytest.approx(1000)


def test_omni_evicts_max_flow_first():
    inst, tree, cap = star([(1, 1000, 0, 6), (2, -1000, 0, 7)], tower=TALL, U_Omni=10)
    h = {0: 30.0, 1: 30.0, 2: 30.0}
    cfg = omni_ant_replace(inst, tree, cap, h, {}, 0)
    assert cfg.covered == (1,)


def test_omni_overlap_evicts_farthest():
    verts = [(0, 0, 0, "L"), (1, 1000, 0, "T"), (2, 3000, 0, "T"), (9, -5000, 0, "T")]
    inst = make_instance(verts, [(0, 1, 5), (0, 2, 5), (0, 9, 5)], tower=TALL)
    tree = SteinerTree(0, ((0, 1), (0, 2)))
    cap = plan_capacity(inst, tree)
    h = {0: 30.0, 1: 30.0, 2: 30.0, 9: 30.0}
    cfg = omni_ant_replace(inst, tree, cap, h, {9: 2500.0}, 0)
    assert cfg.covered == (1,) and cfg.rad == pytest.approx(1000)


def test_omni_rejected_when_not_worth_it():
    inst, tree, cap = star([(1, 1000, 0), (2, -1000, 0)])
    h = {0: 10.0, 1: 10.0, 2: 10.0}
    # raising the centre to 30 m costs more than it saves
    assert omni_ant_replace(inst, tree, cap, h, {}, 0) is None
    assert omni_deploy(inst, tree, cap, h) == ({}, {})


def test_omni_deploy_two_far_subtrees():
    verts = [
        (0, 0, 0, "L"),
        (1, 5000, 0, "T"), (2, 5500, 500, "T"), (3, 5500, -500, "T"),
        (4, -5000, 0, "T"), (5, -5500, 500, "T"), (6, -5500, -500, "T"),
    ]
    edges = [(0, 1, 5), (1, 2, 5), (1, 3, 5), (0, 4, 5), (4, 5, 5), (4, 6, 5)]
    inst = make_instance(verts, edges, tower=TALL, R=12000)
    tree = SteinerTree(0, tuple((a, b) for a, b, _ in edges))
    cap = plan_capacity(inst, tree)
    h = {v: 30.0 for v in range(7)}
    linkset, overrides = omni_deploy(inst, tree, cap, h)
    assert sorted(linkset) == [1, 4]
    assert overrides == {2: 10.0, 3: 10.0, 5: 10.0, 6: 10.0}


def test_power_from_final_radius():
    inst, tree, cap = star([(1, 800, 0), (2, -800, 0)], tower=TALL)
    table = PowerTable(((1000, 1.0), (5000, 2.0), (10000, 3.0)))
    omni = OmniConfig(0, 800.0, (1, 2), (1, 2), 30.0, 10.0)
    powers = assign_transmit_power(inst, tree, cap, HybridPlan(omni={0: omni}), table)
    (center,) = [p for p in powers if p.kind == "Omni"]
    assert center.power == 1.0  # not the 6 km initial radius
    assert {p.kind for p in powers} == {"Omni", "OmniSD"}


def test_power_table_examples():
    table = PowerTable(((5000, 1.0), (10000, 2.0)))
    assert table.lookup(8000) == 2.0
    assert table.lookup(0) == 1.0


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10_000), st.sampled_from(["mp", "omni", "mp,omni", "omni,mp"]))
def test_hybrid_preserves_and_saves(seed, mode):
    inst = generate_instance(seed)
    base = run_pipeline(inst, "none")
    res = run_pipeline(inst, mode)
    assert res.solution.tree == base.solution.tree
    assert res.capacity.routes == base.capacity.routes
    assert res.capacity.flow == base.capacity.flow
    assert res.cost.total <= base.cost.total
    if res.hybrid.adopted:
        assert res.cost.total < base.cost.total
    parents = res.solution.tree.parent
    # hyperlinks only take over links to the apex's children, never its uplink
    for cfgs in res.hybrid.mp.values():
        assert all(parents[x] == c.apex for c in cfgs for x in c.covered)
    for o in res.hybrid.omni.values():
        assert all(parents[x] == o.center for x in o.covered)
    assert validate_plan(inst, to_document(res)) == []
    assert total_cost(inst, res.solution.heights, res.capacity, res.hybrid) == res.cost
