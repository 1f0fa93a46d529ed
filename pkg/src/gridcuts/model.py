"""Immutable multigraph model of a power network.

Buses carry gross generation and load in MW; branches are rated edges that
may come with a per-unit reactance (needed only by the DC oracle).  Parallel
circuits are kept distinct by branch id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .units import to_units

BusId = int
BranchId = str

BALANCE_TOL_MW = 1e-6


class NetworkError(Exception):
    """Raised for structural problems that make a network unusable."""


@dataclass(frozen=True)
class Bus:
    id: BusId
    gen_mw: float = 0.0
    load_mw: float = 0.0

    def __post_init__(self) -> None:
        if self.gen_mw < 0:
            raise NetworkError(f"bus {self.id}: gen_mw must be >= 0")
        if self.load_mw < 0:
            raise NetworkError(f"bus {self.id}: load_mw must be >= 0")


@dataclass(frozen=True)
class Branch:
    id: BranchId
    from_bus: BusId
    to_bus: BusId
    rating_mw: float
    reactance_pu: Optional[float] = None
    in_service: bool = True

    def __post_init__(self) -> None:
        if self.rating_mw <= 0:
            raise NetworkError(f"branch {self.id}: rating_mw must be > 0")
        if self.from_bus == self.to_bus:
            raise NetworkError(f"branch {self.id}: self-loop not allowed")
        if self.reactance_pu is not None and self.reactance_pu <= 0:
            raise NetworkError(f"branch {self.id}: reactance_pu must be > 0")


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    def add(self, severity: str, code: str, message: str) -> None:
        self.issues.append(Issue(severity, code, message))

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


class PowerNetwork:
    """Immutable after construction; safe to share across readers.

    Structural integrity (unique ids, resolvable endpoints) is enforced here;
    softer properties (balance, connectivity, reactances) are reported by
    :func:`validate` so a caller can decide how to react.
    """

    def __init__(
        self,
        name: str,
        buses: Iterable[Bus],
        branches: Iterable[Branch],
        base_mva: float = 100.0,
    ):
        self.name = name
        self.base_mva = base_mva
        self.buses = tuple(sorted(buses, key=lambda b: b.id))
        self.branches = tuple(sorted(branches, key=lambda b: b.id))

        self.bus_map: dict[BusId, Bus] = {}
        for bus in self.buses:
            if bus.id in self.bus_map:
                raise NetworkError(f"duplicate bus id {bus.id}")
            self.bus_map[bus.id] = bus

        self.branch_map: dict[BranchId, Branch] = {}
        for br in self.branches:
            if br.id in self.branch_map:
                raise NetworkError(f"duplicate branch id {br.id}")
            if br.from_bus not in self.bus_map:
                raise NetworkError(
                    f"branch {br.id}: dangling endpoint bus {br.from_bus}"
                )
            if br.to_bus not in self.bus_map:
                raise NetworkError(f"branch {br.id}: dangling endpoint bus {br.to_bus}")
            self.branch_map[br.id] = br

        # bus -> incident in-service branch ids, expansion order (BusId, BranchId)
        adj: dict[BusId, list[BranchId]] = {b.id: [] for b in self.buses}
        for br in self.branches:
            if br.in_service:
                adj[br.from_bus].append(br.id)
                adj[br.to_bus].append(br.id)
        for bid in adj:
            adj[bid].sort(
                key=lambda brid: (
                    self._other_end(brid, bid),
                    brid,
                )
            )
        self.adjacency: dict[BusId, tuple[BranchId, ...]] = {
            k: tuple(v) for k, v in adj.items()
        }

    def _other_end(self, branch_id: BranchId, bus: BusId) -> BusId:
        br = self.branch_map[branch_id]
        return br.to_bus if br.from_bus == bus else br.from_bus

    # -- queries ----------------------------------------------------------

    def live_branches(self) -> list[Branch]:
        return [b for b in self.branches if b.in_service]

    def net_injection(self, bus: BusId) -> float:
        """gen_mw - load_mw at a bus."""
        if bus not in self.bus_map:
            raise NetworkError(f"unknown bus id {bus}")
        b = self.bus_map[bus]
        return b.gen_mw - b.load_mw

    def net_injection_units(self, bus: BusId) -> int:
        b = self.bus_map[bus]
        return to_units(b.gen_mw) - to_units(b.load_mw)

    def cut_between(self, cluster1: set[BusId]) -> set[BranchId]:
        """In-service branches with exactly one endpoint in ``cluster1``."""
        if not cluster1:
            raise NetworkError("cluster1 must be nonempty")
        unknown = cluster1 - self.bus_map.keys()
        if unknown:
            raise NetworkError(f"unknown bus ids in cluster: {sorted(unknown)}")
        if len(cluster1) == len(self.buses):
            raise NetworkError("cluster1 must be a proper subset of the vertex set")
        return {
            br.id
            for br in self.branches
            if br.in_service and (br.from_bus in cluster1) != (br.to_bus in cluster1)
        }

    def total_gen_mw(self) -> float:
        return sum(b.gen_mw for b in self.buses)

    def total_load_mw(self) -> float:
        return sum(b.load_mw for b in self.buses)

    def connected_components(self, exclude: set[BranchId] = frozenset()) -> list[set[BusId]]:
        """Components over in-service branches, optionally excluding some."""
        seen: set[BusId] = set()
        comps: list[set[BusId]] = []
        for bus in self.bus_map:
            if bus in seen:
                continue
            comp = {bus}
            stack = [bus]
            seen.add(bus)
            while stack:
                u = stack.pop()
                for brid in self.adjacency[u]:
                    if brid in exclude:
                        continue
                    v = self._other_end(brid, u)
                    if v not in seen:
                        seen.add(v)
                        comp.add(v)
                        stack.append(v)
            comps.append(comp)
        return comps

    def with_injections(self, gen: dict[BusId, float], load: dict[BusId, float]) -> "PowerNetwork":
        """Copy with per-bus gen/load overridden where given."""
        buses = [
            Bus(
                b.id,
                gen_mw=gen.get(b.id, b.gen_mw),
                load_mw=load.get(b.id, b.load_mw),
            )
            for b in self.buses
        ]
        return PowerNetwork(self.name, buses, self.branches, self.base_mva)


def validate_parts(buses: Iterable[Bus], branches: Iterable[Branch]) -> ValidationReport:
    """Structural checks on raw parts: duplicate ids, dangling endpoints.

    Used by parsers before a PowerNetwork is constructed (construction
    rejects these outright).
    """
    report = ValidationReport()
    bus_ids: set[BusId] = set()
    for bus in buses:
        if bus.id in bus_ids:
            report.add("error", "duplicate-bus", f"duplicate bus id {bus.id}")
        bus_ids.add(bus.id)
    branch_ids: set[BranchId] = set()
    for br in branches:
        if br.id in branch_ids:
            report.add("error", "duplicate-branch", f"duplicate branch id {br.id}")
        branch_ids.add(br.id)
        for end in (br.from_bus, br.to_bus):
            if end not in bus_ids:
                report.add(
                    "error",
                    "dangling-endpoint",
                    f"branch {br.id} references absent bus {end}",
                )
    return report


def validate(network: PowerNetwork) -> ValidationReport:
    """Report balance mismatch, disconnection, and missing reactances.

    Duplicate ids and dangling endpoints are rejected at construction time;
    parsers run :func:`validate_parts` first and surface those through the
    same Issue vocabulary.
    """
    report = ValidationReport()

    mismatch = network.total_gen_mw() - network.total_load_mw()
    if abs(mismatch) > BALANCE_TOL_MW:
        report.add(
            "error",
            "balance",
            f"generation/load mismatch of {mismatch:.6f} MW "
            f"(tolerance {BALANCE_TOL_MW} MW)",
        )

    comps = network.connected_components()
    # Buses with no live attachment and no injection are inert; anything else
    # outside the main component is an error.
    if len(comps) > 1:
        main = max(comps, key=len)
        for comp in comps:
            if comp is main:
                continue
            inert = all(
                network.bus_map[b].gen_mw == 0
                and network.bus_map[b].load_mw == 0
                and not network.adjacency[b]
                for b in comp
            )
            sev = "warning" if inert else "error"
            report.add(
                sev,
                "disconnected",
                f"component {sorted(comp)} is disconnected from the main network",
            )

    missing_x = [b.id for b in network.live_branches() if b.reactance_pu is None]
    if missing_x:
        report.add(
            "warning",
            "missing-reactance",
            f"{len(missing_x)} branch(es) without reactance_pu "
            f"(DC oracle unavailable): {missing_x[:10]}",
        )
    return report
