"""Case, scenario, and report serialization.

Native case and scenario files are line-delimited structured text so
fixtures stay hand-auditable; a MATPOWER-subset parser covers the bus/gen/
branch matrices of a case function body.  All floats are written with 17
significant digits, which round-trips IEEE doubles exactly and keeps replay
byte-deterministic.
"""

from __future__ import annotations

import csv
import io as _io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .model import Branch, Bus, NetworkError, PowerNetwork, validate, validate_parts


class ParseError(Exception):
    """Input file is malformed; carries file/line context."""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _fmt(x: float) -> str:
    return format(x, ".17g")


# ---------------------------------------------------------------------------
# native case format
#
#   case <name> [base_mva=<mva>]
#   bus <id> [gen=<mw>] [load=<mw>]
#   branch <id> from=<bus> to=<bus> rating=<mw> [x=<pu>] [status=0|1]
#
# '#' starts a comment; blank lines are ignored.
# ---------------------------------------------------------------------------

def _kv_fields(parts: list[str], path: str, lineno: int) -> dict[str, str]:
    out = {}
    for p in parts:
        if "=" not in p:
            raise ParseError(path, lineno, f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        if k in out:
            raise ParseError(path, lineno, f"duplicate field {k!r}")
        out[k] = v
    return out


def _check_issues(report, path: str) -> None:
    if not report.ok:
        first = report.errors[0]
        raise ParseError(path, 0, f"[{first.code}] {first.message}")


def loads_case(text: str, path: str = "<string>") -> PowerNetwork:
    name = Path(path).stem if path != "<string>" else "unnamed"
    base_mva = 100.0
    buses: list[Bus] = []
    branches: list[Branch] = []
    saw_case = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "case":
                if saw_case:
                    raise ParseError(path, lineno, "duplicate case header")
                saw_case = True
                if len(parts) < 2:
                    raise ParseError(path, lineno, "case header needs a name")
                name = parts[1]
                kv = _kv_fields(parts[2:], path, lineno)
                base_mva = float(kv.pop("base_mva", base_mva))
                if kv:
                    raise ParseError(path, lineno, f"unknown fields {sorted(kv)}")
            elif kind == "bus":
                if len(parts) < 2:
                    raise ParseError(path, lineno, "bus line needs an id")
                bid = int(parts[1])
                kv = _kv_fields(parts[2:], path, lineno)
                gen = float(kv.pop("gen", 0.0))
                load = float(kv.pop("load", 0.0))
                if kv:
                    raise ParseError(path, lineno, f"unknown fields {sorted(kv)}")
                buses.append(Bus(bid, gen_mw=gen, load_mw=load))
            elif kind == "branch":
                if len(parts) < 2:
                    raise ParseError(path, lineno, "branch line needs an id")
                brid = parts[1]
                kv = _kv_fields(parts[2:], path, lineno)
                try:
                    frm = int(kv.pop("from"))
                    to = int(kv.pop("to"))
                    rating = float(kv.pop("rating"))
                except KeyError as exc:
                    raise ParseError(
                        path, lineno, f"branch missing required field {exc.args[0]!r}"
                    ) from None
                x = kv.pop("x", None)
                status = kv.pop("status", "1")
                if kv:
                    raise ParseError(path, lineno, f"unknown fields {sorted(kv)}")
                branches.append(
                    Branch(
                        brid,
                        frm,
                        to,
                        rating_mw=rating,
                        reactance_pu=float(x) if x is not None else None,
                        in_service=status not in ("0", "false"),
                    )
                )
            else:
                raise ParseError(path, lineno, f"unknown record kind {kind!r}")
        except (ValueError, NetworkError) as exc:
            raise ParseError(path, lineno, str(exc)) from None
    _check_issues(validate_parts(buses, branches), path)
    return PowerNetwork(name, buses, branches, base_mva)


def dumps_case(network: PowerNetwork) -> str:
    lines = [f"case {network.name} base_mva={_fmt(network.base_mva)}"]
    for b in network.buses:
        lines.append(f"bus {b.id} gen={_fmt(b.gen_mw)} load={_fmt(b.load_mw)}")
    for br in network.branches:
        parts = [
            f"branch {br.id} from={br.from_bus} to={br.to_bus}",
            f"rating={_fmt(br.rating_mw)}",
        ]
        if br.reactance_pu is not None:
            parts.append(f"x={_fmt(br.reactance_pu)}")
        if not br.in_service:
            parts.append("status=0")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# MATPOWER subset
# ---------------------------------------------------------------------------

_MATRIX_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[", re.S)


def _matpower_matrices(text: str, path: str) -> tuple[dict, list[str]]:
    """Extract numeric matrices/scalars assigned to mpc.* fields."""
    out: dict[str, object] = {}
    warnings: list[str] = []
    # scalars like mpc.baseMVA = 100;
    for m in re.finditer(r"mpc\.(\w+)\s*=\s*([0-9.eE+-]+)\s*;", text):
        out[m.group(1)] = float(m.group(2))
    for m in _MATRIX_RE.finditer(text):
        name = m.group(1)
        start = m.end()
        end = text.find("];", start)
        if end < 0:
            lineno = text.count("\n", 0, m.start()) + 1
            raise ParseError(path, lineno, f"unterminated matrix mpc.{name}")
        body = text[start:end]
        rows = []
        for rawline in body.split("\n"):
            line = rawline.split("%", 1)[0].strip().rstrip(";")
            if not line:
                continue
            try:
                rows.append([float(t) for t in line.replace(",", " ").split()])
            except ValueError:
                if name in ("bus", "gen", "branch"):
                    lineno = text.count("\n", 0, m.start()) + 1
                    raise ParseError(
                        path, lineno, f"non-numeric row in mpc.{name}: {line!r}"
                    ) from None
                rows = []
                break
        out[name] = rows
    supported = {"version", "baseMVA", "bus", "gen", "branch"}
    for k in out:
        if k not in supported:
            warnings.append(f"ignoring unsupported MATPOWER field mpc.{k}")
    return out, warnings


def load_matpower(
    text: str, path: str = "<string>", warnings_out: Optional[list[str]] = None
) -> PowerNetwork:
    mats, warnings = _matpower_matrices(text, path)
    if warnings_out is not None:
        warnings_out.extend(warnings)
    for req in ("bus", "branch"):
        if req not in mats or not isinstance(mats[req], list):
            raise ParseError(path, 0, f"missing mpc.{req} matrix")
    base_mva = float(mats.get("baseMVA", 100.0))

    load_by_bus: dict[int, float] = {}
    bus_ids: list[int] = []
    for row in mats["bus"]:  # BUS_I TYPE PD QD ...
        bid = int(row[0])
        bus_ids.append(bid)
        load_by_bus[bid] = float(row[2])
    gen_by_bus: dict[int, float] = {}
    for row in mats.get("gen", []):  # GEN_BUS PG QG QMAX QMIN VG MBASE STATUS ...
        status = float(row[7]) if len(row) > 7 else 1.0
        if status <= 0:
            continue
        bid = int(row[0])
        gen_by_bus[bid] = gen_by_bus.get(bid, 0.0) + float(row[1])

    buses = [
        Bus(b, gen_mw=gen_by_bus.get(b, 0.0), load_mw=max(load_by_bus.get(b, 0.0), 0.0))
        for b in sorted(set(bus_ids))
    ]

    branches: list[Branch] = []
    counts: dict[tuple[int, int], int] = {}
    for row in mats["branch"]:  # F_BUS T_BUS R X B RATE_A ... STATUS(idx 10)
        f, t = int(row[0]), int(row[1])
        x = float(row[3])
        rate = float(row[5])
        status = int(row[10]) if len(row) > 10 else 1
        key = (f, t)
        counts[key] = counts.get(key, 0) + 1
        suffix = "" if counts[key] == 1 else f"#{counts[key]}"
        if rate <= 0:
            # MATPOWER uses RATE_A=0 for "unlimited"
            rate = 1e9
            if warnings_out is not None:
                warnings_out.append(
                    f"branch {f}-{t}{suffix}: RATE_A=0 treated as unlimited"
                )
        branches.append(
            Branch(
                f"{f}-{t}{suffix}",
                f,
                t,
                rating_mw=rate,
                reactance_pu=x if x > 0 else None,
                in_service=status != 0,
            )
        )
    name = Path(path).stem if path != "<string>" else "matpower-case"
    _check_issues(validate_parts(buses, branches), path)
    return PowerNetwork(name, buses, branches, base_mva)


def load_case(path: Union[str, Path], format: Optional[str] = None) -> PowerNetwork:
    """Load a network from a file; format inferred from the extension.

    ``.m`` files are parsed as MATPOWER, everything else as native.
    """
    p = Path(path)
    text = p.read_text()
    if format is None:
        format = "matpower" if p.suffix == ".m" else "native"
    if format == "matpower":
        return load_matpower(text, str(p))
    if format == "native":
        return loads_case(text, str(p))
    raise ValueError(f"unknown case format {format!r}")


def save_case(network: PowerNetwork, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_case(network))


# ---------------------------------------------------------------------------
# scenario format
#
#   scenario <name>
#   case <path relative to the scenario file>
#   seed <int>            (optional; deterministic ordering when absent)
#   event outage <branch id>
#   event scale_injections <factor>
#   event remedial cut=<id,id,...> reduce_by=<mw>
# ---------------------------------------------------------------------------

@dataclass
class ScenarioEvent:
    type: str  # outage | scale_injections | remedial
    payload: dict


@dataclass
class Scenario:
    name: str
    case_path: str
    seed: Optional[int]
    events: list[ScenarioEvent] = field(default_factory=list)

    def resolve_case(self, scenario_path: Union[str, Path]) -> Path:
        base = Path(scenario_path).parent
        return (base / self.case_path).resolve()


def loads_scenario(text: str, path: str = "<string>") -> Scenario:
    name = Path(path).stem if path != "<string>" else "unnamed"
    case_path: Optional[str] = None
    seed: Optional[int] = None
    events: list[ScenarioEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "scenario":
                name = parts[1]
            elif kind == "case":
                case_path = parts[1]
            elif kind == "seed":
                seed = int(parts[1])
            elif kind == "event":
                etype = parts[1]
                if etype == "outage":
                    events.append(ScenarioEvent("outage", {"branch": parts[2]}))
                elif etype == "scale_injections":
                    events.append(
                        ScenarioEvent("scale_injections", {"factor": float(parts[2])})
                    )
                elif etype == "remedial":
                    kv = _kv_fields(parts[2:], path, lineno)
                    events.append(
                        ScenarioEvent(
                            "remedial",
                            {
                                "cut": kv["cut"].split(","),
                                "reduce_by_mw": float(kv["reduce_by"]),
                            },
                        )
                    )
                else:
                    raise ParseError(path, lineno, f"unknown event type {etype!r}")
            else:
                raise ParseError(path, lineno, f"unknown record kind {kind!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise ParseError(path, lineno, f"malformed line: {exc}") from None
    if case_path is None:
        raise ParseError(path, 0, "scenario has no case line")
    return Scenario(name=name, case_path=case_path, seed=seed, events=events)


def load_scenario(path: Union[str, Path]) -> Scenario:
    p = Path(path)
    return loads_scenario(p.read_text(), str(p))


def dumps_scenario(s: Scenario) -> str:
    lines = [f"scenario {s.name}", f"case {s.case_path}"]
    if s.seed is not None:
        lines.append(f"seed {s.seed}")
    for ev in s.events:
        if ev.type == "outage":
            lines.append(f"event outage {ev.payload['branch']}")
        elif ev.type == "scale_injections":
            lines.append(f"event scale_injections {_fmt(ev.payload['factor'])}")
        elif ev.type == "remedial":
            cut = ",".join(ev.payload["cut"])
            lines.append(
                f"event remedial cut={cut} reduce_by={_fmt(ev.payload['reduce_by_mw'])}"
            )
        else:
            raise ValueError(f"unknown event type {ev.type!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

REPORT_COLUMNS = ["event", "new_special_assets", "kcrit", "margin_mw"]
TIMING_COLUMNS = ["ups_s", "sa_s", "ft_s", "total_s"]


def _report_rows(records: list[dict], timings: bool) -> list[dict]:
    rows = []
    for rec in records:
        row = {
            "event": rec["event"],
            "new_special_assets": list(rec.get("new_special_assets", [])),
            "kcrit": [sorted(k) for k in rec.get("kcrit", [])],
            "margin_mw": list(rec.get("margin_mw", [])),
        }
        if timings:
            for col in TIMING_COLUMNS:
                row[col] = rec.get(col, 0.0)
        rows.append(row)
    return rows


def write_report(records: list[dict], format: str = "table", timings: bool = False) -> bytes:
    """Render per-event result rows.

    Each record carries: event label, new special assets, their limiting
    cut-sets, and their margins; timing columns are included only on request
    because wall-clock noise would break byte-identical replay.
    """
    rows = _report_rows(records, timings)
    cols = REPORT_COLUMNS + (TIMING_COLUMNS if timings else [])
    if format == "json":
        return (json.dumps({"columns": cols, "rows": rows}, indent=2) + "\n").encode()
    if format == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow(
                [
                    row["event"],
                    ";".join(row["new_special_assets"]),
                    ";".join("{" + ",".join(k) + "}" for k in row["kcrit"]),
                    ";".join(_fmt(m) for m in row["margin_mw"]),
                ]
                + [_fmt(row[c]) for c in TIMING_COLUMNS if timings]
            )
        return buf.getvalue().encode()
    if format == "table":
        header = ["event", "new special assets", "limiting cut-sets", "margin (MW)"]
        if timings:
            header += ["ups (s)", "sa (s)", "ft (s)", "total (s)"]
        table = [header]
        for row in rows:
            cells = [
                row["event"],
                ", ".join(row["new_special_assets"]) or "-",
                "; ".join("{" + ", ".join(k) + "}" for k in row["kcrit"]) or "-",
                ", ".join(_fmt(m) for m in row["margin_mw"]) or "-",
            ]
            if timings:
                cells += [f"{row[c]:.2f}" for c in TIMING_COLUMNS]
            table.append(cells)
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        out_lines = []
        for i, r in enumerate(table):
            out_lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if i == 0:
                out_lines.append("  ".join("-" * w for w in widths))
        return ("\n".join(out_lines) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}")
