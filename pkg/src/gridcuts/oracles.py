"""Independent validation oracles.

A DC power-flow solver (impedance-faithful, linearized) and exhaustive
bipartition enumeration give the test suite two routes to every headline
number the flow engine produces.  Neither shares code with the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .flowgraph import FlowState
from .model import Branch, BranchId, BusId, NetworkError, PowerNetwork
from .units import to_units

KCL_TOL_MW = 1e-6


class IslandingError(NetworkError):
    """The requested outage disconnects the network; no DC solution exists."""


@dataclass
class DcSolution:
    slack: BusId
    angles_rad: dict[BusId, float]
    branch_flows_mw: dict[BranchId, float]  # from->to positive


def _dc_matrices(network: PowerNetwork, branches: list[Branch]):
    buses = [b.id for b in network.buses]
    index = {bid: i for i, bid in enumerate(buses)}
    n = len(buses)
    B = np.zeros((n, n))
    for br in branches:
        if br.reactance_pu is None:
            raise NetworkError(f"branch {br.id} has no reactance_pu; DC model unavailable")
        y = 1.0 / br.reactance_pu
        i, j = index[br.from_bus], index[br.to_bus]
        B[i, i] += y
        B[j, j] += y
        B[i, j] -= y
        B[j, i] -= y
    p = np.array([network.net_injection(bid) / network.base_mva for bid in buses])
    return buses, index, B, p


def dc_solve(
    network: PowerNetwork,
    slack: Optional[BusId] = None,
    exclude: frozenset[BranchId] = frozenset(),
) -> DcSolution:
    """Linear DC power flow; angles in radians with the slack pinned to 0."""
    branches = [b for b in network.live_branches() if b.id not in exclude]
    if slack is None:
        slack = max(network.buses, key=lambda b: (b.gen_mw, -b.id)).id
    if slack not in network.bus_map:
        raise NetworkError(f"unknown slack bus {slack}")

    buses, index, B, p = _dc_matrices(network, branches)
    s = index[slack]
    keep = [i for i in range(len(buses)) if i != s]
    B_red = B[np.ix_(keep, keep)]
    p_red = p[keep]
    try:
        theta_red = np.linalg.solve(B_red, p_red)
    except np.linalg.LinAlgError:
        raise IslandingError("singular DC system: network is disconnected") from None
    # a singular-but-consistent system can slip through LU on some inputs;
    # verify the residual instead of trusting the factorization
    if not np.allclose(B_red @ theta_red, p_red, atol=1e-8):
        raise IslandingError("DC system inconsistent: network is disconnected")

    theta = np.zeros(len(buses))
    theta[keep] = theta_red
    angles = {bid: float(theta[index[bid]]) for bid in buses}
    flows = {}
    for br in branches:
        flows[br.id] = float(
            network.base_mva
            * (theta[index[br.from_bus]] - theta[index[br.to_bus]])
            / br.reactance_pu
        )
    return DcSolution(slack=slack, angles_rad=angles, branch_flows_mw=flows)


def dc_post_contingency_overloads(
    network: PowerNetwork, slack: Optional[BusId], outage: BranchId
) -> list[tuple[BranchId, float]]:
    """Re-solve without ``outage`` and list branches loaded past their rating."""
    if outage not in network.branch_map:
        raise NetworkError(f"unknown branch {outage!r}")
    comps = network.connected_components(exclude={outage})
    if len(comps) > 1:
        raise IslandingError(f"outage of {outage!r} islands the network")
    sol = dc_solve(network, slack, exclude=frozenset({outage}))
    out = []
    for br in network.live_branches():
        if br.id == outage:
            continue
        flow = abs(sol.branch_flows_mw[br.id])
        if flow > br.rating_mw + KCL_TOL_MW:
            out.append((br.id, flow - br.rating_mw))
    out.sort(key=lambda t: t[0])
    return out


@dataclass
class CutRecord:
    cluster1: frozenset[BusId]
    cut: frozenset[BranchId]
    transfer_units: int  # net injection of cluster1 (positive = exports)
    capacity_units: int  # sum of ratings excluding the examined branch

    @property
    def transfer_mw(self) -> float:
        return self.transfer_units / 1e9

    @property
    def capacity_mw(self) -> float:
        return self.capacity_units / 1e9


@dataclass
class CutEnumeration:
    branch: BranchId
    records: list[CutRecord]

    def min_margin_units(self) -> int:
        """min over bipartitions of capacity - required transfer; equals the
        feasibility-test margin by max-flow/min-cut duality.  An importing
        cluster1 (negative transfer) relaxes the cut, so the signed value is
        used as-is."""
        return min(r.capacity_units - r.transfer_units for r in self.records)

    def saturated(self) -> list[CutRecord]:
        return [r for r in self.records if r.transfer_units > r.capacity_units]


def enumerate_cuts(
    network: PowerNetwork,
    state: FlowState,
    branch: BranchId,
    max_buses: int = 16,
) -> CutEnumeration:
    """All bipartitions separating the endpoints of ``branch``.

    cluster1 holds the exporting endpoint (per the flow sign in ``state``),
    so a positive transfer means the cut must carry power out of cluster1.
    """
    live_ids = set(state.live_branch_ids())
    if branch not in live_ids:
        raise NetworkError(f"branch {branch!r} not live")
    br = network.branch_map[branch]
    vf, vt = (br.from_bus, br.to_bus) if state.flow_units(branch) >= 0 else (
        br.to_bus,
        br.from_bus,
    )
    buses = [b.id for b in network.buses]
    if len(buses) > max_buses:
        raise NetworkError(
            f"network too large for exhaustive enumeration "
            f"({len(buses)} > {max_buses} buses)"
        )
    free = [b for b in buses if b not in (vf, vt)]
    inj = {b: network.net_injection_units(b) for b in buses}
    live = [network.branch_map[bid] for bid in sorted(live_ids)]

    records = []
    for mask in range(1 << len(free)):
        cluster = {vf}
        for i, b in enumerate(free):
            if mask >> i & 1:
                cluster.add(b)
        cut = set()
        cap = 0
        for b2 in live:
            if (b2.from_bus in cluster) != (b2.to_bus in cluster):
                cut.add(b2.id)
                if b2.id != branch:
                    cap += to_units(b2.rating_mw)
        transfer = sum(inj[b] for b in cluster)
        records.append(
            CutRecord(
                cluster1=frozenset(cluster),
                cut=frozenset(cut),
                transfer_units=transfer,
                capacity_units=cap,
            )
        )
    return CutEnumeration(branch=branch, records=records)
