"""Event-sourced pipeline orchestration."""

import pytest

from gridcuts.caseio import Scenario, ScenarioEvent, load_case, load_scenario
from gridcuts.fixtures import data_path, five_bus, nine_bus, random_network, six_bus_ring
from gridcuts.model import Branch, Bus, PowerNetwork
from gridcuts.netflow import Infeasible
from gridcuts.session import EventRecord, SessionError, run_scenario, start


class TestStart:
    def test_nine_bus_base_specials(self):
        s = start(nine_bus())
        specials = s.specials()
        # both members of the saturated two-branch cut fail the test
        assert set(specials) == {"4-1", "6-7"}
        assert specials["4-1"].margin_mw == -35.86
        assert specials["4-1"].kcrit == {"4-1", "6-7"}
        assert s.status == "nominal"

    def test_ample_capacity_no_specials(self):
        s = start(six_bus_ring())
        assert s.specials() == {}

    def test_replay_same_seed_identical(self):
        a = start(nine_bus(), seed=11)
        b = start(nine_bus(), seed=11)
        assert a.snapshot_key() == b.snapshot_key()

    def test_infeasible_network_propagates(self):
        net = PowerNetwork(
            "tight",
            [Bus(1, gen_mw=100.0), Bus(2, load_mw=100.0)],
            [Branch("a", 1, 2, rating_mw=60.0)],
        )
        with pytest.raises(Infeasible):
            start(net)


class TestApplyEvent:
    def test_unknown_branch(self):
        with pytest.raises(SessionError, match="unknown branch"):
            start(nine_bus()).apply_event("nope")

    def test_double_outage_rejected(self):
        s = start(nine_bus())
        s.apply_event("7-8")
        with pytest.raises(SessionError, match="already out of service"):
            s.apply_event("7-8")

    def test_new_specials_are_set_difference(self):
        s = start(nine_bus())
        rec = s.apply_event("4-5")
        new_ids = {d["branch"] for d in rec.new_specials}
        # 4-1 and 6-7 were already special at base and stay attributed there
        assert "4-1" not in new_ids and "6-7" not in new_ids
        assert set(rec.specials_after) >= new_ids | {"4-1", "6-7"}

    def test_saturated_status_blocks_next_event(self):
        net = PowerNetwork(
            "twopath",
            [Bus(1, gen_mw=100.0), Bus(2, load_mw=100.0), Bus(3)],
            [
                Branch("direct", 1, 2, rating_mw=70.0),
                Branch("a", 1, 3, rating_mw=40.0),
                Branch("b", 3, 2, rating_mw=40.0),
            ],
        )
        s = start(net)
        rec = s.apply_event("direct")
        assert rec.status == "saturated"
        assert rec.deficit_mw == 60.0
        with pytest.raises(SessionError, match="remedial action required"):
            s.apply_event("a")

    def test_islanding_recorded(self):
        net = PowerNetwork(
            "spur",
            [Bus(1, gen_mw=10.0), Bus(2), Bus(3, load_mw=10.0)],
            [
                Branch("a", 1, 2, rating_mw=20.0),
                Branch("b", 2, 3, rating_mw=20.0),
            ],
        )
        s = start(net)
        rec = s.apply_event("b")
        assert rec.status == "islanded"
        assert rec.islanded_buses == [3]
        assert rec.island_imbalance_mw == -10.0


class TestWhatIf:
    def test_equals_apply(self):
        s = start(nine_bus())
        probe = s.what_if("4-5")
        real = s.apply_event("4-5")
        assert probe.key() == real.key()

    def test_is_non_mutating_and_idempotent(self):
        s = start(nine_bus())
        before = s.snapshot_key()
        a = s.what_if("4-5")
        b = s.what_if("4-5")
        assert s.snapshot_key() == before
        assert len(s.event_log) == 0
        assert a.key() == b.key()

    def test_zero_flow_branch_empty_deltas(self):
        net = six_bus_ring()
        s = start(net)
        zero = next(
            b for b in s.state.live_branch_ids() if s.state.flow_units(b) == 0
        )
        rec = s.what_if(zero)
        assert rec.flow_mw == 0.0
        assert rec.rerouted_mw == 0.0
        assert rec.new_specials == []


class TestUndo:
    def test_apply_then_undo_restores_base(self):
        s = start(nine_bus())
        base = s.snapshot_key()
        s.apply_event("4-5")
        assert s.snapshot_key() != base
        s.undo()
        assert s.snapshot_key() == base
        assert s.event_log == []

    def test_two_events_two_undos(self):
        s = start(nine_bus())
        base = s.snapshot_key()
        s.apply_event("4-5")
        mid = s.snapshot_key()
        s.apply_event("7-8")
        s.undo()
        assert s.snapshot_key() == mid
        s.undo()
        assert s.snapshot_key() == base

    def test_undo_redo_replay_deterministic(self):
        s = start(nine_bus())
        first = s.apply_event("4-5")
        s.undo()
        second = s.apply_event("4-5")
        assert first.key() == second.key()

    def test_empty_log_rejected(self):
        with pytest.raises(SessionError, match="nothing to undo"):
            start(nine_bus()).undo()


class TestRemedial:
    def test_reduce_by_margin_clears_special(self):
        s = start(nine_bus())
        kcrit = s.results["4-1"].kcrit
        rec = s.remedial_scale(kcrit, 35.86)
        assert rec.specials_after == []
        assert s.results["4-1"].margin_mw >= 0

    def test_zero_reduction_rejected(self):
        s = start(nine_bus())
        with pytest.raises(SessionError, match="positive"):
            s.remedial_scale({"4-1", "6-7"}, 0.0)

    def test_reduction_above_transfer_rejected(self):
        s = start(nine_bus())
        with pytest.raises(SessionError, match="exceeds"):
            s.remedial_scale({"4-1", "6-7"}, 1000.0)

    def test_non_cut_branch_set_rejected(self):
        s = start(nine_bus())
        with pytest.raises(SessionError, match="not a cut"):
            s.remedial_scale({"4-1"}, 5.0)

    def test_recovers_saturated_session(self):
        net = PowerNetwork(
            "twopath",
            [Bus(1, gen_mw=100.0), Bus(2, load_mw=100.0), Bus(3)],
            [
                Branch("direct", 1, 2, rating_mw=70.0),
                Branch("a", 1, 3, rating_mw=40.0),
                Branch("b", 3, 2, rating_mw=40.0),
            ],
        )
        s = start(net)
        s.apply_event("direct")
        assert s.status == "saturated"
        s.remedial_scale({"a"}, 60.0)
        assert s.status == "nominal"
        s.apply_event("a")  # events allowed again


class TestScaleInjections:
    def test_scaling_clears_special(self):
        s = start(five_bus(1))
        assert "3-4" in s.specials()
        rec = s.scale_injections(9.0 / 11.0)
        assert "3-4" not in rec.specials_after
        assert s.results["3-4"].margin_mw >= 0

    def test_negative_factor_rejected(self):
        with pytest.raises(SessionError):
            start(five_bus(1)).scale_injections(-1.0)


class TestScenarioRunner:
    def test_event_study_rows(self):
        scen_path = data_path("ieee118_hurricane.scen")
        scen = load_scenario(scen_path)
        net = load_case(scen.resolve_case(scen_path))
        session, rows = run_scenario(net, scen)
        assert [r["event"] for r in rows] == [
            "base",
            "outage 15-33",
            "outage 19-34",
            "outage 37-38",
            "outage 49-66",
            "outage 47-69",
        ]
        assert rows[0]["new_special_assets"] == ["26-30"]
        assert rows[3]["new_special_assets"] == ["42-49"]
        assert rows[5]["new_special_assets"] == ["59-56", "63-59", "63-64", "64-65"]
        assert session.status == "nominal"

    def test_mixed_event_types(self):
        scen = Scenario(
            name="mixed",
            case_path="-",
            seed=None,
            events=[
                ScenarioEvent("outage", {"branch": "7-8"}),
                ScenarioEvent(
                    "remedial", {"cut": ["4-1", "6-7"], "reduce_by_mw": 35.86}
                ),
                ScenarioEvent("scale_injections", {"factor": 0.5}),
            ],
        )
        session, rows = run_scenario(nine_bus(), scen)
        assert len(rows) == 4
        assert session.status == "nominal"
        assert session.specials() == {}


def test_shortlist_audit_matches_full_resweep_on_sequences():
    """Session-level equality of shortlisted vs exhaustive re-testing."""
    for seed in range(4):
        net = random_network(seed, n_buses=14)
        fast = start(net)
        slow = start(net)
        outages = 0
        for branch in sorted(fast.state.live_branch_ids()):
            if outages >= 3 or fast.status != "nominal":
                break
            if fast.state.flow_units(branch) == 0:
                continue
            a = fast.apply_event(branch, use_shortlist=True)
            b = slow.apply_event(branch, use_shortlist=False)
            outages += 1
            assert a.specials_after == b.specials_after
            assert {d["branch"]: d["margin_mw"] for d in a.new_specials} == {
                d["branch"]: d["margin_mw"] for d in b.new_specials
            }
