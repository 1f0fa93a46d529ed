"""Builds a valid graph-theoretic network flow from the injections.

Sources are drained into sinks along successive shortest unsaturated paths.
Because the search runs over the full bidirectional latent-capacity graph,
augmentation can cancel earlier routing decisions, which makes the procedure
a true max-flow: it fails only when a cut of the network genuinely cannot
carry the required transfer.
"""

from __future__ import annotations

import random
from typing import Optional

from .flowgraph import FlowState
from .model import BALANCE_TOL_MW, BranchId, BusId, NetworkError, PowerNetwork
from .units import to_mw, to_units


class Infeasible(Exception):
    """Demand cannot be met: carries the residual deficit and limiting cut."""

    def __init__(self, deficit_mw: float, limiting_cut: set[BranchId], cluster1: set[BusId]):
        self.deficit_mw = deficit_mw
        self.limiting_cut = limiting_cut
        self.cluster1 = cluster1
        super().__init__(
            f"flow infeasible: {deficit_mw} MW of demand cannot be served; "
            f"limiting cut {sorted(limiting_cut)}"
        )


def _injection_units(network: PowerNetwork) -> tuple[dict[BusId, int], dict[BusId, int]]:
    """Quantized gross supplies and demands, adjusted to exact balance.

    Sub-tolerance rounding residue is assigned to the largest source (or sink)
    so the integer totals match exactly.
    """
    supply = {b.id: to_units(b.gen_mw) for b in network.buses if b.gen_mw > 0}
    demand = {b.id: to_units(b.load_mw) for b in network.buses if b.load_mw > 0}
    diff = sum(supply.values()) - sum(demand.values())
    if diff != 0:
        if abs(to_mw(diff)) > BALANCE_TOL_MW:
            raise NetworkError(
                f"network unbalanced by {to_mw(diff)} MW; validate() first"
            )
        if diff > 0:
            top = max(supply, key=lambda b: (supply[b], -b))
            supply[top] -= diff
        else:
            top = max(demand, key=lambda b: (demand[b], -b))
            demand[top] += diff
    return supply, demand


def build_flow(
    network: PowerNetwork,
    ordering: str = "deterministic",
    seed: Optional[int] = None,
) -> FlowState:
    """Route all generation to all load without violating any rating.

    ordering="deterministic" always picks the lowest-id bus with remaining
    supply/demand; ordering="seeded" draws source/sink choices from an RNG
    seeded with ``seed`` (recorded by the session for replay).
    """
    if ordering not in ("deterministic", "seeded"):
        raise ValueError(f"unknown ordering {ordering!r}")
    rng = random.Random(seed) if ordering == "seeded" else None

    supply, demand = _injection_units(network)
    state = FlowState(network)

    # A bus carrying both gross generation and load serves itself first, so
    # only the net surplus/shortfall ever travels the network.
    for bus in list(supply):
        if bus in demand:
            x = min(supply[bus], demand[bus])
            supply[bus] -= x
            demand[bus] -= x
            if supply[bus] == 0:
                del supply[bus]
            if demand[bus] == 0 and bus in demand:
                del demand[bus]

    def pick(remaining: dict[BusId, int], exclude: set[BusId]) -> Optional[BusId]:
        candidates = sorted(b for b in remaining if b not in exclude)
        if not candidates:
            return None
        if rng is None:
            return candidates[0]
        return rng.choice(candidates)

    blocked: set[tuple[BusId, BusId]] = set()
    vg = pick(supply, set())
    vl = pick(demand, set())
    while demand:
        if vg is None or vl is None:
            break
        path = state.shortest_unsaturated_path(vg, vl)
        if path is None:
            blocked.add((vg, vl))
            # try other sinks for this source, then other sources
            vl2 = pick(demand, {t for s, t in blocked if s == vg})
            if vl2 is not None:
                vl = vl2
                continue
            vg2 = pick(
                supply,
                {s for s in supply if all((s, t) in blocked for t in demand)},
            )
            if vg2 is None:
                break
            vg = vg2
            vl = pick(demand, {t for s, t in blocked if s == vg})
            continue
        cp = state.bottleneck_units(path) if path.steps else min(supply[vg], demand[vl])
        fp = min(supply[vg], demand[vl], cp)
        if path.steps:
            state.push_units(path, fp)
        blocked.clear()
        supply[vg] -= fp
        demand[vl] -= fp
        if supply[vg] == 0:
            del supply[vg]
            vg = pick(supply, set())
        if vl in demand and demand[vl] == 0:
            del demand[vl]
            vl = pick(demand, set())

    if demand:
        deficit = sum(demand.values())
        cluster1: set[BusId] = set()
        for s in supply:
            cluster1 |= state.reachable(s, ignore_capacity=False)
        if not cluster1 or len(cluster1) == len(network.buses):
            # degenerate (no supply left or sinks unreachable only by capacity
            # bookkeeping); fall back to the sink side
            cluster1 = set(network.bus_map) - set(demand)
        cut = {
            bid
            for bid in state.live_branch_ids()
            if (network.branch_map[bid].from_bus in cluster1)
            != (network.branch_map[bid].to_bus in cluster1)
        }
        raise Infeasible(to_mw(deficit), cut, cluster1)

    return state


def cut_transfer_units(state: FlowState, cut: set[BranchId], toward: set[BusId]) -> int:
    network = state.network
    crossing = {
        bid
        for bid in state.live_branch_ids()
        if (network.branch_map[bid].from_bus in toward)
        != (network.branch_map[bid].to_bus in toward)
    }
    if crossing != set(cut):
        raise NetworkError(
            f"branch set is not the cut of the given cluster: "
            f"cut={sorted(cut)} crossing={sorted(crossing)}"
        )
    total = 0
    for bid in cut:
        br = network.branch_map[bid]
        f = state.flow_units(bid)
        total += f if br.to_bus in toward else -f
    return total


def cut_transfer(state: FlowState, cut: set[BranchId], toward: set[BusId]) -> float:
    """Net MW flowing across ``cut`` into the ``toward`` cluster.

    For a balanced network this equals the net injection of the complement
    cluster, whatever valid flow solution is loaded.
    """
    return to_mw(cut_transfer_units(state, cut, toward))
