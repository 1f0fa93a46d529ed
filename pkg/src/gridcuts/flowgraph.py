"""Paired flow / latent-capacity view of a network.

The two directed headrooms of a branch carrying signed flow f with rating r
are r - f (canonical direction) and r + f (reverse).  A FlowState keeps the
signed flows; capacities are always derived, so the pairing identity
c_fw + c_rev = 2r can never drift.

Flows are integers in 1e-9 MW units (see units.py).  A directed step is
saturated when its headroom is below one unit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .model import BranchId, BusId, NetworkError, PowerNetwork
from .units import to_mw, to_units


class FlowError(Exception):
    """Raised for invalid flow-graph operations."""


class Topology:
    """Integer-indexed view of a network, shared by all FlowStates over it."""

    def __init__(self, network: PowerNetwork):
        self.network = network
        self.bus_ids = [b.id for b in network.buses]
        self.bus_index = {bid: i for i, bid in enumerate(self.bus_ids)}
        live = network.live_branches()
        self.branch_ids = [b.id for b in live]
        self.branch_index = {bid: i for i, bid in enumerate(self.branch_ids)}
        self.from_idx = [self.bus_index[b.from_bus] for b in live]
        self.to_idx = [self.bus_index[b.to_bus] for b in live]
        self.rating = [to_units(b.rating_mw) for b in live]

        # adj[u] = ((branch_idx, neighbor_idx, sign), ...) in ascending
        # (neighbor BusId, BranchId) order so BFS tie-breaking is deterministic.
        adj: list[list[tuple[int, int, int]]] = [[] for _ in self.bus_ids]
        for e, br in enumerate(live):
            u, v = self.from_idx[e], self.to_idx[e]
            adj[u].append((e, v, +1))
            adj[v].append((e, u, -1))
        for u in range(len(adj)):
            adj[u].sort(key=lambda t: (self.bus_ids[t[1]], self.branch_ids[t[0]]))
        self.adj = [tuple(a) for a in adj]

    @property
    def n_branches(self) -> int:
        return len(self.branch_ids)


def topology(network: PowerNetwork) -> Topology:
    topo = getattr(network, "_topology", None)
    if topo is None:
        topo = Topology(network)
        network._topology = topo  # type: ignore[attr-defined]
    return topo


@dataclass(frozen=True)
class Path:
    """Simple path as (branch id, direction) steps; +1 walks from->to."""

    start: BusId
    steps: tuple[tuple[BranchId, int], ...]

    def end(self, network: PowerNetwork) -> BusId:
        bus = self.start
        for brid, sign in self.steps:
            br = network.branch_map[brid]
            bus = br.to_bus if sign > 0 else br.from_bus
        return bus

    def reversed(self, network: PowerNetwork) -> "Path":
        return Path(
            self.end(network), tuple((b, -s) for b, s in reversed(self.steps))
        )

    def branch_ids(self) -> set[BranchId]:
        return {b for b, _ in self.steps}


class FlowState:
    """Signed branch flows plus the removed-branch set; a cloneable value."""

    def __init__(self, network: PowerNetwork):
        self.network = network
        self.topo = topology(network)
        self.flow: list[int] = [0] * self.topo.n_branches
        self.removed: list[bool] = [False] * self.topo.n_branches

    def clone(self) -> "FlowState":
        other = FlowState.__new__(FlowState)
        other.network = self.network
        other.topo = self.topo
        other.flow = list(self.flow)
        other.removed = list(self.removed)
        return other

    # -- unit-level accessors (engine) ------------------------------------

    def _eidx(self, branch: BranchId) -> int:
        try:
            return self.topo.branch_index[branch]
        except KeyError:
            raise FlowError(f"unknown or out-of-service branch {branch!r}") from None

    def cap_units(self, e: int, sign: int) -> int:
        return self.topo.rating[e] - sign * self.flow[e]

    def flow_units(self, branch: BranchId) -> int:
        return self.flow[self._eidx(branch)]

    def live_branch_ids(self) -> list[BranchId]:
        return [
            bid
            for e, bid in enumerate(self.topo.branch_ids)
            if not self.removed[e]
        ]

    def is_removed(self, branch: BranchId) -> bool:
        return self.removed[self._eidx(branch)]

    # -- MW accessors ------------------------------------------------------

    def flow_mw(self, branch: BranchId) -> float:
        return to_mw(self.flow_units(branch))

    def c_fw_mw(self, branch: BranchId) -> float:
        e = self._eidx(branch)
        return to_mw(self.cap_units(e, +1))

    def c_rev_mw(self, branch: BranchId) -> float:
        e = self._eidx(branch)
        return to_mw(self.cap_units(e, -1))

    # -- operations --------------------------------------------------------

    def shortest_unsaturated_path(
        self, frm: BusId, to: BusId, extra_removed: Optional[list[bool]] = None
    ) -> Optional[Path]:
        """Minimum-hop path with positive headroom on every step, or None.

        ``extra_removed`` lets the feasibility test exclude one more branch
        without cloning the state.
        """
        topo = self.topo
        try:
            s = topo.bus_index[frm]
            t = topo.bus_index[to]
        except KeyError as exc:
            raise FlowError(f"unknown bus {exc.args[0]!r}") from None
        if s == t:
            return Path(frm, ())
        removed = self.removed
        flow = self.flow
        rating = topo.rating
        parent: list[Optional[tuple[int, int, int]]] = [None] * len(topo.bus_ids)
        visited = [False] * len(topo.bus_ids)
        visited[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            for e, v, sign in topo.adj[u]:
                if visited[v] or removed[e]:
                    continue
                if extra_removed is not None and extra_removed[e]:
                    continue
                if rating[e] - sign * flow[e] <= 0:
                    continue
                visited[v] = True
                parent[v] = (u, e, sign)
                if v == t:
                    steps: list[tuple[BranchId, int]] = []
                    w = t
                    while w != s:
                        pu, pe, psign = parent[w]  # type: ignore[misc]
                        steps.append((topo.branch_ids[pe], psign))
                        w = pu
                    steps.reverse()
                    return Path(frm, tuple(steps))
                q.append(v)
        return None

    def bottleneck_units(self, path: Path) -> int:
        if not path.steps:
            raise FlowError("bottleneck of an empty path is undefined")
        out = None
        for brid, sign in path.steps:
            e = self._eidx(brid)
            if self.removed[e]:
                raise FlowError(f"path uses removed branch {brid!r}")
            c = self.cap_units(e, sign)
            out = c if out is None else min(out, c)
        return out  # type: ignore[return-value]

    def path_bottleneck(self, path: Path) -> float:
        return to_mw(self.bottleneck_units(path))

    def push_units(self, path: Path, amount: int) -> "FlowState":
        if amount <= 0:
            raise FlowError(f"push amount must be positive, got {to_mw(amount)} MW")
        if amount > self.bottleneck_units(path):
            raise FlowError(
                f"push amount {to_mw(amount)} MW exceeds path bottleneck "
                f"{to_mw(self.bottleneck_units(path))} MW"
            )
        for brid, sign in path.steps:
            e = self.topo.branch_index[brid]
            self.flow[e] += sign * amount
        return self

    def push_along_path(self, path: Path, amount_mw: float) -> "FlowState":
        return self.push_units(path, to_units(amount_mw))

    def remove_branch(self, branch: BranchId) -> "FlowState":
        e = self._eidx(branch)
        if self.removed[e]:
            raise FlowError(f"branch {branch!r} already removed")
        self.removed[e] = True  # last flow value is retained for rerouting
        return self

    # -- diagnostics -------------------------------------------------------

    def reachable(self, frm: BusId, ignore_capacity: bool = True) -> set[BusId]:
        """Buses reachable from ``frm`` over live branches.

        With ignore_capacity=False only steps with positive headroom are
        traversed (the saturated-graph reachability of min-cut extraction).
        """
        topo = self.topo
        s = topo.bus_index[frm]
        seen = [False] * len(topo.bus_ids)
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for e, v, sign in topo.adj[u]:
                if seen[v] or self.removed[e]:
                    continue
                if not ignore_capacity and self.cap_units(e, sign) <= 0:
                    continue
                seen[v] = True
                stack.append(v)
        return {topo.bus_ids[i] for i in range(len(seen)) if seen[i]}

    def reachable_reverse(self, to: BusId) -> set[BusId]:
        """Buses with an unsaturated directed route into ``to``."""
        topo = self.topo
        t = topo.bus_index[to]
        seen = [False] * len(topo.bus_ids)
        seen[t] = True
        stack = [t]
        while stack:
            u = stack.pop()
            for e, v, sign in topo.adj[u]:
                # step v -> u has direction -sign relative to u's adjacency
                if seen[v] or self.removed[e]:
                    continue
                if self.cap_units(e, -sign) <= 0:
                    continue
                seen[v] = True
                stack.append(v)
        return {topo.bus_ids[i] for i in range(len(seen)) if seen[i]}

    def imbalance_units(self) -> dict[BusId, int]:
        """Per-bus (flow out - flow in) - net injection; all zero when the
        flow solution is conservative and demand is fully served."""
        topo = self.topo
        net = [0] * len(topo.bus_ids)
        for e in range(topo.n_branches):
            if self.removed[e]:
                continue
            net[topo.from_idx[e]] += self.flow[e]
            net[topo.to_idx[e]] -= self.flow[e]
        out = {}
        for i, bid in enumerate(topo.bus_ids):
            out[bid] = net[i] - self.network.net_injection_units(bid)
        return out

    def check_invariants(self) -> None:
        topo = self.topo
        for e in range(topo.n_branches):
            if self.removed[e]:
                continue
            if abs(self.flow[e]) > topo.rating[e]:
                raise FlowError(
                    f"branch {topo.branch_ids[e]}: |flow| exceeds rating "
                    f"({to_mw(self.flow[e])} vs {to_mw(topo.rating[e])} MW)"
                )

    def snapshot(self) -> tuple:
        """Deterministic value identity for replay comparisons."""
        return (tuple(self.flow), tuple(self.removed))
