"""Validation oracles: linearized physical dispatch and cut enumeration."""

import pytest
from hypothesis import given, settings, strategies as st

from gridcuts.fixtures import five_bus, nine_bus, random_network, three_path_six_bus
from gridcuts.model import Branch, Bus, NetworkError, PowerNetwork
from gridcuts.netflow import build_flow
from gridcuts.oracles import (
    IslandingError,
    dc_post_contingency_overloads,
    dc_solve,
    enumerate_cuts,
)
from gridcuts.units import to_mw


class TestDcSolve:
    def test_kcl_holds(self):
        net = nine_bus()
        sol = dc_solve(net, slack=1)
        for bus in net.bus_map:
            net_out = 0.0
            for br in net.live_branches():
                f = sol.branch_flows_mw[br.id]
                if br.from_bus == bus:
                    net_out += f
                elif br.to_bus == bus:
                    net_out -= f
            assert net_out == pytest.approx(net.net_injection(bus), abs=1e-6)

    def test_nine_bus_reference_split(self):
        # the fixture's reactances are fitted to this dispatch of the
        # generation/load cut: 172.51 / 121.96 / 86.39
        sol = dc_solve(nine_bus(), slack=1)
        assert sol.branch_flows_mw["4-1"] == pytest.approx(172.51, abs=0.05)
        assert sol.branch_flows_mw["9-2"] == pytest.approx(121.96, abs=0.05)
        assert sol.branch_flows_mw["9-3"] == pytest.approx(86.39, abs=0.05)

    def test_slack_default_largest_generator(self):
        sol = dc_solve(nine_bus())
        assert sol.slack == 4
        assert sol.angles_rad[4] == 0.0

    def test_missing_reactance_rejected(self):
        net = PowerNetwork(
            "x",
            [Bus(1, gen_mw=1.0), Bus(2, load_mw=1.0)],
            [Branch("a", 1, 2, rating_mw=5.0)],
        )
        with pytest.raises(NetworkError, match="reactance"):
            dc_solve(net)

    def test_unknown_slack_rejected(self):
        with pytest.raises(NetworkError, match="slack"):
            dc_solve(nine_bus(), slack=42)

    def test_disconnected_network_rejected(self):
        net = PowerNetwork(
            "split",
            [Bus(1, gen_mw=1.0), Bus(2, load_mw=1.0), Bus(3), Bus(4)],
            [
                Branch("a", 1, 2, rating_mw=5.0, reactance_pu=0.1),
                Branch("b", 3, 4, rating_mw=5.0, reactance_pu=0.1),
            ],
        )
        with pytest.raises(IslandingError):
            dc_solve(net)


class TestPostContingency:
    def test_three_path_overloads(self):
        # losing the direct tie pushes 75 MW onto the 45 MW low-impedance
        # corridor in the linearized dispatch
        net = three_path_six_bus(100.0)
        overloads = dict(dc_post_contingency_overloads(net, 1, "1-2"))
        assert overloads["1-3"] == pytest.approx(30.0, abs=1e-6)
        assert "1-5" not in overloads

    def test_islanding_outage_rejected(self):
        net = PowerNetwork(
            "spur",
            [Bus(1, gen_mw=1.0), Bus(2, load_mw=1.0)],
            [Branch("a", 1, 2, rating_mw=5.0, reactance_pu=0.1)],
        )
        with pytest.raises(IslandingError):
            dc_post_contingency_overloads(net, 1, "a")

    def test_unknown_branch_rejected(self):
        with pytest.raises(NetworkError):
            dc_post_contingency_overloads(nine_bus(), 1, "nope")


class TestEnumeration:
    def test_record_count_is_all_bipartitions(self):
        net = five_bus(1)
        state = build_flow(net)
        enum = enumerate_cuts(net, state, "3-4")
        assert len(enum.records) == 2 ** (len(net.buses) - 2)

    def test_five_bus_published_cut_values(self):
        net = five_bus(1)
        state = build_flow(net)
        enum = enumerate_cuts(net, state, "3-4")
        by_cluster = {r.cluster1: r for r in enum.records}
        k2 = by_cluster[frozenset({1, 2, 3})]
        assert k2.transfer_mw == 231.0
        assert k2.capacity_mw == 200.0
        assert k2.cut == {"3-4", "3-5", "1-5"}
        k1 = by_cluster[frozenset({1, 2, 3, 5})]
        assert (k1.transfer_mw, k1.capacity_mw) == (231.0, 250.0)
        k3 = by_cluster[frozenset({1, 3})]
        assert (k3.transfer_mw, k3.capacity_mw) == (594.0, 820.0)
        k4 = by_cluster[frozenset({3, 5})]
        assert (k4.transfer_mw, k4.capacity_mw) == (264.0, 820.0)

    def test_five_bus_case2_scaled_cut_values(self):
        net = five_bus(2)
        state = build_flow(net)
        enum = enumerate_cuts(net, state, "3-4")
        by_cluster = {r.cluster1: r for r in enum.records}
        assert by_cluster[frozenset({1, 2, 3})].transfer_mw == pytest.approx(189.0)
        assert by_cluster[frozenset({1, 2, 3, 5})].transfer_mw == pytest.approx(189.0)
        assert by_cluster[frozenset({1, 3})].transfer_mw == pytest.approx(486.0)
        assert by_cluster[frozenset({3, 5})].transfer_mw == pytest.approx(216.0)
        assert enum.min_margin_units() > 0

    def test_saturated_listing(self):
        net = five_bus(1)
        state = build_flow(net)
        enum = enumerate_cuts(net, state, "3-4")
        sats = enum.saturated()
        assert any(r.cluster1 == frozenset({1, 2, 3}) for r in sats)

    def test_too_large_rejected(self):
        net = random_network(1, n_buses=20)
        state = build_flow(net)
        branch = next(b for b in state.live_branch_ids() if state.flow_units(b) != 0)
        with pytest.raises(NetworkError, match="too large"):
            enumerate_cuts(net, state, branch)

    def test_transfer_independent_of_flow_solution(self):
        net = nine_bus()
        enums = [
            enumerate_cuts(net, build_flow(net, ordering="seeded", seed=s), "4-1")
            for s in range(5)
        ]
        base = {r.cluster1: r.transfer_units for r in enums[0].records}
        for e in enums[1:]:
            assert {r.cluster1: r.transfer_units for r in e.records} == base


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_dc_solution_respects_kcl_on_random_networks(seed):
    net = random_network(seed, n_buses=12)
    sol = dc_solve(net)
    for bus in net.bus_map:
        net_out = sum(
            sol.branch_flows_mw[br.id] * (1 if br.from_bus == bus else -1)
            for br in net.live_branches()
            if bus in (br.from_bus, br.to_bus)
        )
        assert net_out == pytest.approx(net.net_injection(bus), abs=1e-6)
