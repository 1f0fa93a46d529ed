"""Incremental rerouting of flow after a branch outage.

The lost branch's flow is pushed over successive shortest unsaturated paths
between its endpoints.  A positive residual deficit means the outage
saturates a cut; a disconnection is reported as islanding instead.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .flowgraph import FlowError, FlowState, Path
from .model import BranchId, BusId, PowerNetwork
from .units import to_mw


@dataclass
class Islanding:
    separated_buses: set[BusId]
    imbalance_mw: float


@dataclass
class UpdateResult:
    branch: BranchId
    flow_mw: float  # |f| on the branch at outage time
    rerouted_mw: float
    deficit_mw: float
    paths: list[tuple[Path, float]] = field(default_factory=list)
    changed_branches: set[BranchId] = field(default_factory=set)
    islanding: Optional[Islanding] = None
    pruned_branches: set[BranchId] = field(default_factory=set)
    elapsed_s: float = 0.0


def apply_outage(
    network: PowerNetwork, state: FlowState, branch: BranchId
) -> tuple[FlowState, UpdateResult]:
    """Remove a live branch and reroute its flow; returns (new state, record).

    The input state is not modified.  On saturation the returned state
    under-delivers ``deficit_mw``; the caller decides the consequences.
    """
    t0 = time.perf_counter()
    e0 = state._eidx(branch)
    if state.removed[e0]:
        raise FlowError(f"branch {branch!r} already removed")
    br = network.branch_map[branch]
    f0 = state.flow[e0]
    if f0 >= 0:
        vf, vt = br.from_bus, br.to_bus
    else:
        vf, vt = br.to_bus, br.from_bus

    work = state.clone()
    work.removed[e0] = True
    result = UpdateResult(
        branch=branch,
        flow_mw=to_mw(abs(f0)),
        rerouted_mw=0.0,
        deficit_mw=0.0,
    )

    # islanding check: the endpoints may sit in different components now
    side_f = work.reachable(vf, ignore_capacity=True)
    if vt not in side_f:
        side_t = work.reachable(vt, ignore_capacity=True)
        # report the smaller side; ties go to the importing end
        sep = side_t if len(side_t) <= len(side_f) else side_f
        imbalance = sum(network.net_injection_units(b) for b in sep)
        result.islanding = Islanding(separated_buses=sep, imbalance_mw=to_mw(imbalance))
        if imbalance == 0:
            # balanced island: prune it and continue on the remainder
            topo = work.topo
            pruned = set()
            for e in range(topo.n_branches):
                if work.removed[e]:
                    continue
                if topo.bus_ids[topo.from_idx[e]] in sep:
                    work.removed[e] = True
                    pruned.add(topo.branch_ids[e])
            result.pruned_branches = pruned
        else:
            result.deficit_mw = to_mw(abs(f0))
        result.elapsed_s = time.perf_counter() - t0
        return work, result

    remaining = abs(f0)
    rerouted = 0
    while remaining > 0:
        path = work.shortest_unsaturated_path(vf, vt)
        if path is None:
            break
        cp = work.bottleneck_units(path)
        fp = min(remaining, cp)
        work.push_units(path, fp)
        remaining -= fp
        rerouted += fp
        result.paths.append((path, to_mw(fp)))
        result.changed_branches |= path.branch_ids()

    result.rerouted_mw = to_mw(rerouted)
    result.deficit_mw = to_mw(remaining)
    result.elapsed_s = time.perf_counter() - t0
    return work, result
