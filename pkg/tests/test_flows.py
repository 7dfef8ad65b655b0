from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from surflab.flows import (
    NotDivergenceFree, OrientationMismatch, base_flow, gm_flute_tree_flow, lift_flow_t2,
    lift_flow_t3, project_flow_t2, t3_cluster_values, tree_edge_value, uniform_tree_flow,
)
from surflab.generators import grid, transform_t2, transform_t3
from surflab.graph_core import build_truncation
from surflab.potential_theory import dirichlet_energy, divergence, net_inflow
from surflab.type_classifier import truncate


@given(*[st.floats(-1e3, 1e3) for _ in range(4)])
def test_t3_cluster_balance(e3, e4, e5, e6):
    f, g, h = t3_cluster_values(e3, e4, e5, e6)
    # the identities that make each cluster vertex balanced
    assert f == e6 + e5
    assert g - f == pytest.approx(e4)
    assert g - h == pytest.approx(e3)


def test_t3_cluster_examples():
    assert t3_cluster_values(1, 1, 1, 1) == (2, 3, 2)
    assert t3_cluster_values(0, 0, 0, 0) == (0, 0, 0)


def _interior_div(view, flow, source):
    div = divergence(view, flow)
    mask = view.interior_mask()
    mask[view.idx(source)] = False
    return float(np.max(np.abs(div[mask])))


@pytest.fixture(scope="module")
def t3_lift():
    base_view, flow, r = base_flow(grid(3), 12)
    t3_view = truncate(transform_t3(grid(3)), 5)
    return base_view, flow, r, t3_view, lift_flow_t3(base_view, flow, t3_view)


def test_t3_lift_divergence_free(t3_lift):
    _, _, _, t3_view, lifted = t3_lift
    assert _interior_div(t3_view, lifted, t3_view.root) < 1e-9
    # unit flux leaves the source cluster
    clusters = {v for v in t3_view.vertices if transform_t3(grid(3)).split(v)[0] == 0}
    inflow = net_inflow(t3_view, lifted)
    assert sum(inflow[t3_view.idx(v)] for v in clusters) == pytest.approx(-1.0, abs=1e-9)


def test_t3_lift_energy_bounded(t3_lift):
    _, _, r, _, lifted = t3_lift
    assert dirichlet_energy(lifted) <= 14 * r


def test_t3_lift_rejects_wrong_view():
    base_view, flow, _ = base_flow(grid(3), 4)
    with pytest.raises(OrientationMismatch):
        lift_flow_t3(base_view, flow, build_truncation(grid(3), 2))


def test_t3_lift_rejects_divergent_flow():
    base_view, flow, _ = base_flow(grid(3), 4)
    t3_view = truncate(transform_t3(grid(3)), 2)
    bad = flow.copy()
    bad[len(bad) // 2] += 0.5
    with pytest.raises(NotDivergenceFree):
        lift_flow_t3(base_view, bad, t3_view)


def test_t2_roundtrip_exact():
    base_view, flow, _ = base_flow(grid(2), 10)
    t2_view = truncate(transform_t2(grid(2)), 6)
    lifted = lift_flow_t2(base_view, flow, t2_view)
    gview, gflow, report = project_flow_t2(t2_view, lifted)
    assert report.flagged == []
    assert report.source_flux == pytest.approx(1.0, abs=1e-9)
    assert report.max_interior_divergence < 1e-9
    lookup = base_view.edge_lookup()
    for (t, h), val in zip(zip(gview.tails, gview.heads), gflow):
        assert val == flow[lookup[(t, h)]]


def test_t2_projection_flags_perturbation():
    base_view, flow, _ = base_flow(grid(2), 10)
    gen = transform_t2(grid(2))
    t2_view = truncate(gen, 6)
    lifted = lift_flow_t2(base_view, flow, t2_view)
    target = grid(2).vertex((2, 1))
    for e, (t, h) in enumerate(zip(t2_view.tails, t2_view.heads)):
        if gen.edge_role(t, h)[0] == "internal" and gen.split(t)[0] == target:
            lifted[e] += 0.25
    _, _, report = project_flow_t2(t2_view, lifted)
    assert report.flagged == [target]


def test_uniform_tree_flow_energy():
    view, flow = uniform_tree_flow(10, exact=True)
    energy = sum(x * x for x in flow)
    assert energy == Fraction(2, 3) * (1 - Fraction(1, 2 ** 10))
    div = divergence(view, flow)
    interior = [i for i, b in enumerate(view.boundary) if not b and i != view.idx(0)]
    assert all(div[i] == 0 for i in interior)
    assert tree_edge_value(1, True) == Fraction(1, 3)
    assert tree_edge_value(3) == pytest.approx(1 / 12)


def test_gm_flute_flow_preserves_energy():
    view, flow = gm_flute_tree_flow(12)
    tv, tflow = uniform_tree_flow(6)
    # inner part of the routed flow has the tree energy level by level
    assert dirichlet_energy(flow) <= 2 / 3 + 1e-12
    assert _interior_div(view, flow, view.root) < 1e-12
    assert -net_inflow(view, flow)[view.idx(view.root)] == pytest.approx(1.0)
    assert dirichlet_energy(tflow) <= dirichlet_energy(flow)


def test_base_flow_radius():
    with pytest.raises(ValueError):
        base_flow(grid(2), 1)
    with pytest.raises(ValueError):
        uniform_tree_flow(0)
