"""Per-asset feasibility test.

For a branch carrying flow f, the test measures how much of that flow the
rest of the network could absorb if the branch were lost (its rerouting
capacity), by repeatedly saturating shortest unsaturated paths between the
branch endpoints in a private copy of the latent-capacity graph.  A negative
margin (capacity minus flow) marks the branch as a special asset and the
reachability frontier of the saturated graph yields its limiting critical
cut-set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .flowgraph import FlowError, FlowState
from .model import BranchId, BusId, PowerNetwork
from .units import to_mw


@dataclass
class FTResult:
    branch: BranchId
    from_bus: BusId  # exporting endpoint (test direction follows the flow)
    to_bus: BusId
    flow_mw: float
    tc_mw: float
    margin_mw: float
    special: bool
    kcrit: set[BranchId]
    cluster1: set[BusId]
    certificate: set[BranchId]
    radial: bool = False
    kcrit_tied: bool = False
    paths_used: int = 0
    elapsed_s: float = 0.0
    # exact fixed-point values, used where tests demand exact arithmetic
    tc_units: int = 0
    margin_units: int = 0

    def summary(self) -> dict:
        return {
            "branch": self.branch,
            "flow_mw": self.flow_mw,
            "tc_mw": self.tc_mw,
            "margin_mw": self.margin_mw,
            "special": self.special,
            "kcrit": sorted(self.kcrit),
            "radial": self.radial,
        }


def ft_edge(network: PowerNetwork, state: FlowState, branch: BranchId) -> FTResult:
    """Feasibility-test one live branch against the current flow solution."""
    t0 = time.perf_counter()
    topo = state.topo
    e0 = state._eidx(branch)
    if state.removed[e0]:
        raise FlowError(f"branch {branch!r} is removed")
    f0 = state.flow[e0]
    br = network.branch_map[branch]
    if f0 >= 0:
        vf, vt = br.from_bus, br.to_bus
    else:
        vf, vt = br.to_bus, br.from_bus

    work = state.clone()
    work.removed[e0] = True

    tc = 0
    touched: set[BranchId] = set()
    paths = 0
    max_iter = topo.n_branches * len(topo.bus_ids) + 1
    while True:
        path = work.shortest_unsaturated_path(vf, vt)
        if path is None:
            break
        cp = work.bottleneck_units(path)
        work.push_units(path, cp)
        tc += cp
        touched |= path.branch_ids()
        paths += 1
        if paths > max_iter:  # Edmonds-Karp style hard cap; should not trigger
            raise FlowError(f"feasibility test for {branch!r} failed to terminate")

    radial = paths == 0 and vt not in work.reachable(vf, ignore_capacity=True)

    cluster1 = work.reachable(vf, ignore_capacity=False)
    kcrit = {
        bid
        for bid in work.live_branch_ids()
        if (network.branch_map[bid].from_bus in cluster1)
        != (network.branch_map[bid].to_bus in cluster1)
    }
    kcrit.add(branch)

    # a differing sink-side min cut means several cuts tie at the margin
    cluster2 = work.reachable_reverse(vt)
    tied = (set(network.bus_map) - cluster2) != cluster1

    margin = tc - abs(f0)
    return FTResult(
        branch=branch,
        from_bus=vf,
        to_bus=vt,
        flow_mw=to_mw(abs(f0)),
        tc_mw=to_mw(tc),
        margin_mw=to_mw(margin),
        special=margin < 0,
        kcrit=kcrit,
        cluster1=cluster1,
        certificate=touched | kcrit,
        radial=radial,
        kcrit_tied=tied,
        paths_used=paths,
        elapsed_s=time.perf_counter() - t0,
        tc_units=tc,
        margin_units=margin,
    )


def ft_sweep(
    network: PowerNetwork,
    state: FlowState,
    branches: Optional[Iterable[BranchId]] = None,
) -> list[FTResult]:
    """Feasibility-test every live branch with nonzero flow.

    Zero-flow branches cannot have a negative margin (rerouting capacity is
    nonnegative) and are skipped.  Results are ordered by branch id, so the
    sweep output is independent of evaluation order.
    """
    if branches is None:
        candidates = state.live_branch_ids()
    else:
        candidates = sorted(set(branches))
    out = []
    for bid in candidates:
        if state.is_removed(bid):
            continue
        if state.flow_units(bid) == 0:
            continue
        out.append(ft_edge(network, state, bid))
    out.sort(key=lambda r: r.branch)
    return out


def is_saturated(cut_flows: list[float], cut_ratings: list[float]) -> bool:
    """True when the transfer required of a cut exceeds its total rating.

    ``cut_flows`` are oriented toward the importing cluster; magnitudes are
    summed signed, so counter-flowing members relieve the cut.
    """
    if len(cut_flows) != len(cut_ratings):
        raise ValueError(
            f"length mismatch: {len(cut_flows)} flows vs {len(cut_ratings)} ratings"
        )
    from .units import to_units

    return sum(to_units(f) for f in cut_flows) > sum(to_units(r) for r in cut_ratings)
