"""Serialization: native case/scenario formats, MATPOWER subset, reports."""

import json

import pytest

from gridcuts import caseio
from gridcuts.caseio import (
    ParseError,
    Scenario,
    ScenarioEvent,
    dumps_case,
    dumps_scenario,
    load_case,
    load_matpower,
    loads_case,
    loads_scenario,
    write_report,
)
from gridcuts.fixtures import data_path, nine_bus


MINIMAL = """
case mini base_mva=100
bus 1 gen=10
bus 2 load=10
branch a from=1 to=2 rating=20 x=0.1
"""


class TestNativeCase:
    def test_minimal_two_bus(self):
        net = loads_case(MINIMAL)
        assert len(net.buses) == 2
        assert len(net.branches) == 1
        assert net.branch_map["a"].rating_mw == 20.0
        assert net.branch_map["a"].reactance_pu == 0.1

    def test_roundtrip_identity(self):
        net = nine_bus()
        text = dumps_case(net)
        again = loads_case(text)
        assert dumps_case(again) == text
        assert [(b.id, b.gen_mw, b.load_mw) for b in again.buses] == [
            (b.id, b.gen_mw, b.load_mw) for b in net.buses
        ]

    def test_out_of_service_branch_roundtrip(self):
        text = MINIMAL + "branch b from=1 to=2 rating=5 status=0\n"
        net = loads_case(text)
        assert not net.branch_map["b"].in_service
        assert "status=0" in dumps_case(net)

    def test_comments_and_blank_lines_ignored(self):
        net = loads_case("# header\n\n" + MINIMAL + "  # trailing comment line\n")
        assert len(net.buses) == 2

    def test_duplicate_branch_id_names_line(self):
        text = MINIMAL + "branch a from=2 to=1 rating=5\n"
        with pytest.raises(ParseError, match="duplicate-branch"):
            loads_case(text)

    def test_unknown_field_has_line_number(self):
        with pytest.raises(ParseError, match=":3:"):
            loads_case("case x\nbus 1\nbus 2 fuel=coal\n")

    def test_missing_required_branch_field(self):
        with pytest.raises(ParseError, match="rating"):
            loads_case("case x\nbus 1\nbus 2\nbranch a from=1 to=2\n")

    def test_malformed_number(self):
        with pytest.raises(ParseError):
            loads_case("case x\nbus 1 gen=ten\n")

    def test_seventeen_digit_roundtrip(self):
        value = 0.1 + 0.2  # not representable exactly in decimal
        text = f"case x\nbus 1 gen={value!r}\nbus 2 load={value!r}\nbranch a from=1 to=2 rating=9\n"
        net = loads_case(text)
        assert net.bus_map[1].gen_mw == value
        assert loads_case(dumps_case(net)).bus_map[1].gen_mw == value


MATPOWER_MINI = """
function mpc = mini
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
\t1\t3\t0\t0\t0\t0\t1\t1\t0\t138\t1\t1.06\t0.94;
\t2\t1\t90\t30\t0\t0\t1\t1\t0\t138\t1\t1.06\t0.94;
];
mpc.gen = [
\t1\t90\t0\t300\t-300\t1\t100\t1\t200\t0;
\t1\t10\t0\t300\t-300\t1\t100\t0\t200\t0;
];
mpc.branch = [
\t1\t2\t0.01\t0.05\t0\t120\t0\t0\t0\t0\t1\t-360\t360;
\t1\t2\t0.01\t0.05\t0\t0\t0\t0\t0\t0\t0\t-360\t360;
];
mpc.gencost = [
\t2\t0\t0\t3\t0.01\t40\t0;
];
"""


class TestMatpower:
    def test_mapping(self):
        warnings = []
        net = load_matpower(MATPOWER_MINI, warnings_out=warnings)
        assert len(net.buses) == 2
        assert net.bus_map[2].load_mw == 90.0
        # off-line generator row ignored
        assert net.bus_map[1].gen_mw == 90.0
        br = net.branch_map["1-2"]
        assert br.rating_mw == 120.0
        assert br.reactance_pu == 0.05
        # second parallel circuit: off-line, unlimited rating
        br2 = net.branch_map["1-2#2"]
        assert not br2.in_service
        assert any("gencost" in w for w in warnings)
        assert any("RATE_A=0" in w for w in warnings)

    def test_full_topology_fixture_counts(self):
        net = load_case(data_path("case118.m"))
        assert len(net.buses) == 118
        assert len(net.branches) == 186

    def test_missing_matrix_rejected(self):
        with pytest.raises(ParseError, match="mpc.branch"):
            load_matpower("function mpc = x\nmpc.bus = [\n1 1 0 0 0 0 1 1 0 138 1 1.1 0.9;\n];\n")

    def test_unterminated_matrix_rejected(self):
        with pytest.raises(ParseError, match="unterminated"):
            load_matpower("mpc.bus = [\n1 1 0 0 0 0 1 1 0 138 1 1.1 0.9;\n")


class TestScenario:
    def test_roundtrip(self):
        scen = Scenario(
            name="s",
            case_path="net.case",
            seed=3,
            events=[
                ScenarioEvent("outage", {"branch": "4-1"}),
                ScenarioEvent("scale_injections", {"factor": 0.9}),
                ScenarioEvent(
                    "remedial", {"cut": ["4-1", "6-7"], "reduce_by_mw": 35.86}
                ),
            ],
        )
        text = dumps_scenario(scen)
        again = loads_scenario(text)
        assert again.name == "s"
        assert again.seed == 3
        assert [e.type for e in again.events] == [
            "outage",
            "scale_injections",
            "remedial",
        ]
        assert again.events[2].payload == {
            "cut": ["4-1", "6-7"],
            "reduce_by_mw": 35.86,
        }
        assert dumps_scenario(again) == text

    def test_shipped_scenario_parses(self):
        scen = loads_scenario(data_path("ieee118_hurricane.scen").read_text())
        assert scen.case_path == "ieee118.case"
        assert [e.payload["branch"] for e in scen.events] == [
            "15-33",
            "19-34",
            "37-38",
            "49-66",
            "47-69",
        ]

    def test_missing_case_rejected(self):
        with pytest.raises(ParseError, match="no case"):
            loads_scenario("scenario x\nevent outage a\n")

    def test_unknown_event_rejected(self):
        with pytest.raises(ParseError, match="unknown event"):
            loads_scenario("case x.case\nevent explode a\n")


ROWS = [
    {
        "event": "base",
        "new_special_assets": ["26-30"],
        "kcrit": [["25-23", "25-27", "26-30"]],
        "margin_mw": [-77.0],
        "ups_s": 0.1,
        "sa_s": 0.0,
        "ft_s": 0.2,
        "total_s": 0.3,
    },
    {
        "event": "outage 15-33",
        "new_special_assets": [],
        "kcrit": [],
        "margin_mw": [],
    },
]


class TestReports:
    def test_empty_json_is_header_only(self):
        data = json.loads(write_report([], format="json"))
        assert data["rows"] == []
        assert "event" in data["columns"]

    def test_empty_csv_is_header_only(self):
        lines = write_report([], format="csv").decode().splitlines()
        assert lines == ["event,new_special_assets,kcrit,margin_mw"]

    def test_json_roundtrip_structure(self):
        data = json.loads(write_report(ROWS, format="json"))
        assert data["rows"][0]["new_special_assets"] == ["26-30"]
        assert data["rows"][0]["margin_mw"] == [-77.0]
        assert json.loads(write_report(ROWS, format="json")) == data

    def test_table_shape(self):
        text = write_report(ROWS, format="table").decode()
        lines = text.splitlines()
        assert "event" in lines[0] and "margin" in lines[0]
        assert len(lines) == 2 + len(ROWS)  # header + rule + rows
        assert "26-30" in lines[2]

    def test_timings_only_on_request(self):
        assert b"ups_s" not in write_report(ROWS, format="json")
        assert b"ups_s" in write_report(ROWS, format="json", timings=True)

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            write_report(ROWS, format="xml")


def test_shipped_case_loads_and_validates():
    from gridcuts.model import validate

    net = load_case(data_path("ieee118.case"))
    assert len(net.buses) == 118
    assert len(net.branches) == 179  # parallel circuits merged
    assert validate(net).ok
