"""Per-asset feasibility test against independent cut enumeration."""

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from gridcuts.feasibility import ft_edge, ft_sweep, is_saturated
from gridcuts.fixtures import (
    five_bus,
    nine_bus,
    random_network,
    six_bus_ring,
    three_path_six_bus,
)
from gridcuts.flowgraph import FlowError
from gridcuts.model import Branch, Bus, PowerNetwork
from gridcuts.netflow import build_flow, cut_transfer
from gridcuts.oracles import enumerate_cuts
from gridcuts.units import to_mw


def nx_reroute_capacity(network, state, branch):
    """Independent max-flow oracle over the latent-capacity graph."""
    br = network.branch_map[branch]
    vf, vt = (
        (br.from_bus, br.to_bus)
        if state.flow_units(branch) >= 0
        else (br.to_bus, br.from_bus)
    )
    g = nx.DiGraph()
    for bid in state.live_branch_ids():
        if bid == branch:
            continue
        b2 = network.branch_map[bid]
        f, t = b2.from_bus, b2.to_bus
        cf = state.cap_units(state._eidx(bid), +1)
        cr = state.cap_units(state._eidx(bid), -1)
        g.add_edge(f, t, capacity=g.get_edge_data(f, t, {"capacity": 0})["capacity"] + cf)
        g.add_edge(t, f, capacity=g.get_edge_data(t, f, {"capacity": 0})["capacity"] + cr)
    if vf not in g or vt not in g or not nx.has_path(g, vf, vt):
        return 0
    return nx.maximum_flow_value(g, vf, vt)


class TestNineBus:
    def test_headline_margin(self):
        net = nine_bus()
        state = build_flow(net)
        r = ft_edge(net, state, "4-1")
        assert r.margin_mw == -35.86
        assert r.special
        assert r.kcrit == {"4-1", "6-7"}
        assert r.cluster1 == {4, 5, 6}

    def test_margin_seed_invariant(self):
        net = nine_bus()
        margins = {
            ft_edge(net, build_flow(net, ordering="seeded", seed=s), "4-1").margin_units
            for s in range(15)
        }
        assert len(margins) == 1

    def test_sweep_specials(self):
        net = nine_bus()
        results = ft_sweep(net, build_flow(net))
        specials = {r.branch: r for r in results if r.special}
        # both members of the saturated two-branch cut fail the test
        assert set(specials) == {"4-1", "6-7"}
        assert specials["6-7"].margin_mw == -35.86

    def test_sweep_skips_zero_flow(self):
        net = nine_bus()
        state = build_flow(net)
        tested = {r.branch for r in ft_sweep(net, state)}
        for bid in state.live_branch_ids():
            if state.flow_units(bid) == 0:
                assert bid not in tested

    def test_removed_branch_rejected(self):
        net = nine_bus()
        state = build_flow(net).remove_branch("4-1")
        with pytest.raises(FlowError):
            ft_edge(net, state, "4-1")


class TestFiveBus:
    def test_case1_special(self):
        net = five_bus(1)
        r = ft_edge(net, build_flow(net), "3-4")
        assert r.margin_mw == -31.0
        assert r.kcrit == {"3-4", "3-5", "1-5"}

    def test_case2_clears(self):
        net = five_bus(2)
        r = ft_edge(net, build_flow(net), "3-4")
        assert not r.special
        assert r.margin_mw >= 0

    def test_margin_equals_min_bipartition_margin(self):
        for case in (1, 2):
            net = five_bus(case)
            state = build_flow(net)
            for r in ft_sweep(net, state):
                enum = enumerate_cuts(net, state, r.branch)
                assert r.margin_units == enum.min_margin_units(), r.branch


class TestMarginIdentity:
    def assert_identity(self, net, state, r):
        ratings = sum(
            net.branch_map[b].rating_mw for b in r.kcrit if b != r.branch
        )
        toward = set(net.bus_map) - r.cluster1
        transfer = cut_transfer(state, r.kcrit, toward)
        assert r.margin_mw == pytest.approx(ratings - transfer, abs=1e-9)

    def test_nine_bus_identity(self):
        net = nine_bus()
        state = build_flow(net)
        r = ft_edge(net, state, "4-1")
        # 300 - 335.86 = -35.86
        self.assert_identity(net, state, r)

    def test_identity_across_sweeps(self):
        for make in (nine_bus, lambda: five_bus(1), lambda: three_path_six_bus(100.0)):
            net = make()
            state = build_flow(net)
            for r in ft_sweep(net, state):
                self.assert_identity(net, state, r)


class TestRadial:
    def test_radial_branch_flagged(self):
        net = PowerNetwork(
            "radial",
            [Bus(1, gen_mw=10.0), Bus(2, load_mw=10.0)],
            [Branch("a", 1, 2, rating_mw=20.0)],
        )
        r = ft_edge(net, build_flow(net), "a")
        assert r.radial
        assert r.special
        assert r.margin_mw == -10.0
        assert r.kcrit == {"a"}


class TestIsSaturated:
    def test_basic(self):
        assert is_saturated([100.0, 50.0], [80.0, 60.0])
        assert not is_saturated([100.0, 50.0], [100.0, 50.0])

    def test_counterflow_relieves(self):
        assert not is_saturated([100.0, -30.0], [60.0, 20.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            is_saturated([1.0], [1.0, 2.0])


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_reroute_capacity_matches_networkx_maxflow(seed):
    net = random_network(seed, n_buses=12)
    state = build_flow(net)
    for r in ft_sweep(net, state):
        assert r.tc_units == nx_reroute_capacity(net, state, r.branch)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_margin_matches_enumeration_on_small_graphs(seed):
    net = random_network(seed, n_buses=10)
    state = build_flow(net)
    for r in ft_sweep(net, state):
        if r.radial:
            continue
        enum = enumerate_cuts(net, state, r.branch)
        assert r.margin_units == enum.min_margin_units(), r.branch
