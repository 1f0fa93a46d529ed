"""Event-sourced orchestration of the analysis pipeline.

A session owns a network, its current flow solution, and the certificate
store from the latest feasibility sweep.  Outage events run the incremental
update, shortlist the assets whose verdict may have changed, and re-test
only those; snapshots make what-if evaluation and undo trivial and keep the
whole history replayable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .feasibility import FTResult, ft_sweep
from .flowgraph import FlowError, FlowState
from .model import Branch, BranchId, BusId, NetworkError, PowerNetwork
from .netflow import build_flow
from .shortlist import CertificateStore, refresh, shortlist
from .units import to_mw, to_units
from .update import UpdateResult, apply_outage


class SessionError(Exception):
    """An operation conflicts with the session's current status or log."""


@dataclass
class EventRecord:
    label: str
    type: str  # outage | scale_injections | remedial
    branch: Optional[BranchId]
    status: str  # session status after the event
    flow_mw: float = 0.0
    rerouted_mw: float = 0.0
    deficit_mw: float = 0.0
    islanded_buses: list[BusId] = field(default_factory=list)
    island_imbalance_mw: float = 0.0
    retested: list[BranchId] = field(default_factory=list)
    new_specials: list[dict] = field(default_factory=list)
    specials_after: list[BranchId] = field(default_factory=list)
    ups_s: float = 0.0
    sa_s: float = 0.0
    ft_s: float = 0.0
    total_s: float = 0.0

    def key(self) -> tuple:
        """Deterministic identity, excluding wall-clock fields."""
        return (
            self.label,
            self.type,
            self.branch,
            self.status,
            self.flow_mw,
            self.rerouted_mw,
            self.deficit_mw,
            tuple(self.islanded_buses),
            self.island_imbalance_mw,
            tuple(self.retested),
            tuple(
                (d["branch"], d["margin_mw"], tuple(d["kcrit"])) for d in self.new_specials
            ),
            tuple(self.specials_after),
        )

    def report_row(self) -> dict:
        return {
            "event": self.label,
            "new_special_assets": [d["branch"] for d in self.new_specials],
            "kcrit": [d["kcrit"] for d in self.new_specials],
            "margin_mw": [d["margin_mw"] for d in self.new_specials],
            "ups_s": self.ups_s,
            "sa_s": self.sa_s,
            "ft_s": self.ft_s,
            "total_s": self.total_s,
        }


def _without_branches(network: PowerNetwork, removed: set[BranchId]) -> PowerNetwork:
    if not removed:
        return network
    branches = [
        replace(br, in_service=False) if br.id in removed else br
        for br in network.branches
    ]
    return PowerNetwork(network.name, network.buses, branches, network.base_mva)


class Session:
    """Single-writer pipeline state; use :func:`start` to create one."""

    def __init__(
        self,
        network: PowerNetwork,
        state: FlowState,
        store: CertificateStore,
        results: dict[BranchId, FTResult],
        seed: Optional[int],
    ):
        self.base_network = network
        self.network = network
        self.state = state
        self.store = store
        self.results = results  # latest FT result per tested branch
        self.seed = seed
        self.status = "nominal"
        self.outaged: set[BranchId] = set()
        self.event_log: list[EventRecord] = []
        self._snapshots: list[tuple] = []

    # -- introspection -----------------------------------------------------

    def specials(self) -> dict[BranchId, FTResult]:
        return {b: r for b, r in self.results.items() if r.special}

    def snapshot_key(self) -> tuple:
        """Value identity of the analysis state, for replay comparisons."""
        return (
            self.state.snapshot(),
            self.store.snapshot(),
            tuple(sorted(self.outaged)),
            self.status,
            tuple(sorted((b, r.margin_units) for b, r in self.results.items())),
        )

    def _take_snapshot(self) -> tuple:
        return (
            self.network,
            self.state.clone(),
            self.store.clone(),
            dict(self.results),
            set(self.outaged),
            self.status,
        )

    def _restore(self, snap: tuple) -> None:
        (
            self.network,
            self.state,
            self.store,
            self.results,
            self.outaged,
            self.status,
        ) = (snap[0], snap[1].clone(), snap[2].clone(), dict(snap[3]), set(snap[4]), snap[5])

    def clone(self) -> "Session":
        other = Session.__new__(Session)
        other.base_network = self.base_network
        other.network = self.network
        other.state = self.state.clone()
        other.store = self.store.clone()
        other.results = dict(self.results)
        other.seed = self.seed
        other.status = self.status
        other.outaged = set(self.outaged)
        other.event_log = list(self.event_log)
        other._snapshots = list(self._snapshots)
        return other

    # -- operations --------------------------------------------------------

    def apply_event(
        self, outage: BranchId, use_shortlist: bool = True
    ) -> EventRecord:
        """Outage + incremental update + shortlisted feasibility re-tests.

        ``use_shortlist=False`` re-tests every branch instead; the result
        must be identical and CI uses the equality as an audit.
        """
        if self.status != "nominal":
            raise SessionError(
                f"session status is {self.status!r}; remedial action required "
                f"before further events"
            )
        if outage not in self.network.branch_map:
            raise SessionError(f"unknown branch {outage!r}")
        if outage in self.outaged or self.state.is_removed(outage):
            raise SessionError(f"branch {outage!r} is already out of service")

        t0 = time.perf_counter()
        snap = self._take_snapshot()
        before = set(self.specials())

        new_state, update = apply_outage(self.network, self.state, outage)

        t1 = time.perf_counter()
        if use_shortlist:
            to_test = shortlist(self.store, update)
        else:
            to_test = set(new_state.live_branch_ids())
        t2 = time.perf_counter()

        results = ft_sweep(self.network, new_state, to_test)
        t3 = time.perf_counter()

        self.state = new_state
        self.outaged.add(outage)
        self.results.pop(outage, None)
        for bid in update.pruned_branches:
            self.results.pop(bid, None)
        for bid in to_test:
            # a shortlisted branch skipped by the sweep (zero flow) cannot be
            # special any more; drop its stale verdict
            self.results.pop(bid, None)
        for r in results:
            self.results[r.branch] = r
        self.store = refresh(self.store, results)

        if update.islanding is not None and update.islanding.imbalance_mw != 0:
            self.status = "islanded"
        elif update.deficit_mw > 0:
            self.status = "saturated"
        else:
            self.status = "nominal"

        after = self.specials()
        new_ids = sorted(set(after) - before)
        record = EventRecord(
            label=f"outage {outage}",
            type="outage",
            branch=outage,
            status=self.status,
            flow_mw=update.flow_mw,
            rerouted_mw=update.rerouted_mw,
            deficit_mw=update.deficit_mw,
            islanded_buses=sorted(update.islanding.separated_buses)
            if update.islanding
            else [],
            island_imbalance_mw=update.islanding.imbalance_mw
            if update.islanding
            else 0.0,
            retested=sorted(to_test),
            new_specials=[
                {
                    "branch": b,
                    "margin_mw": after[b].margin_mw,
                    "kcrit": sorted(after[b].kcrit),
                }
                for b in new_ids
            ],
            specials_after=sorted(after),
            ups_s=update.elapsed_s,
            sa_s=t2 - t1,
            ft_s=t3 - t2,
            total_s=time.perf_counter() - t0,
        )
        self.event_log.append(record)
        self._snapshots.append(snap)
        return record

    def what_if(self, outage: BranchId, use_shortlist: bool = True) -> EventRecord:
        """Evaluate an outage on a private copy; the session is unchanged."""
        probe = self.clone()
        return probe.apply_event(outage, use_shortlist=use_shortlist)

    def undo(self) -> "Session":
        if not self.event_log:
            raise SessionError("event log is empty; nothing to undo")
        self.event_log.pop()
        self._restore(self._snapshots.pop())
        return self

    def _rebuild(self, network: PowerNetwork, label: str, etype: str) -> EventRecord:
        """Swap in a re-dispatched network, rebuild flow, full re-sweep."""
        t0 = time.perf_counter()
        snap = self._take_snapshot()
        before = set(self.specials())
        live = _without_branches(network, self.outaged)
        state = build_flow(
            live,
            ordering="seeded" if self.seed is not None else "deterministic",
            seed=self.seed,
        )
        t1 = time.perf_counter()
        results = ft_sweep(live, state)
        t2 = time.perf_counter()
        self.network = network
        self.state = state
        self.results = {r.branch: r for r in results}
        self.store = refresh(CertificateStore(generation=self.store.generation), results)
        self.status = "nominal"
        after = self.specials()
        new_ids = sorted(set(after) - before)
        record = EventRecord(
            label=label,
            type=etype,
            branch=None,
            status=self.status,
            retested=sorted(r.branch for r in results),
            new_specials=[
                {
                    "branch": b,
                    "margin_mw": after[b].margin_mw,
                    "kcrit": sorted(after[b].kcrit),
                }
                for b in new_ids
            ],
            specials_after=sorted(after),
            ups_s=t1 - t0,
            ft_s=t2 - t1,
            total_s=time.perf_counter() - t0,
        )
        self.event_log.append(record)
        self._snapshots.append(snap)
        return record

    def remedial_scale(
        self, cut: set[BranchId], reduce_by_mw: float
    ) -> EventRecord:
        """Uniformly scale down exporting-side generation and importing-side
        load so the transfer across ``cut`` drops by ``reduce_by_mw``."""
        if reduce_by_mw <= 0:
            raise SessionError(
                f"reduce_by_mw must be positive, got {reduce_by_mw}"
            )
        cut = set(cut)
        live = _without_branches(self.network, self.outaged)
        for bid in cut:
            if bid not in live.branch_map or not live.branch_map[bid].in_service:
                raise SessionError(f"branch {bid!r} is not a live branch")

        cluster1 = self._cut_side(live, cut)
        # scheduled transfer: what the exporting side injects toward the cut,
        # which can exceed the delivered flow while the session is saturated
        transfer = sum(live.net_injection_units(b) for b in cluster1)
        if transfer < 0:
            cluster1 = set(live.bus_map) - cluster1
            transfer = -transfer
        reduce_units = to_units(reduce_by_mw)
        if reduce_units > transfer:
            raise SessionError(
                f"requested reduction {reduce_by_mw} MW exceeds the cut transfer "
                f"{to_mw(transfer)} MW"
            )
        gen_total = sum(self.network.bus_map[b].gen_mw for b in cluster1)
        cluster2 = set(live.bus_map) - cluster1
        load_total = sum(self.network.bus_map[b].load_mw for b in cluster2)
        if gen_total <= 0 or load_total <= 0:
            raise SessionError("cut has no scalable generation/load pair")
        if reduce_by_mw > gen_total or reduce_by_mw > load_total:
            raise SessionError(
                "scaling by the requested amount would drive an injection negative"
            )
        gf = 1.0 - reduce_by_mw / gen_total
        lf = 1.0 - reduce_by_mw / load_total
        gen = {
            b: self.network.bus_map[b].gen_mw * gf
            for b in cluster1
            if self.network.bus_map[b].gen_mw > 0
        }
        load = {
            b: self.network.bus_map[b].load_mw * lf
            for b in cluster2
            if self.network.bus_map[b].load_mw > 0
        }
        network = self.network.with_injections(gen, load)
        label = f"remedial cut={{{','.join(sorted(cut))}}} reduce_by={reduce_by_mw}"
        return self._rebuild(network, label, "remedial")

    def scale_injections(self, factor: float) -> EventRecord:
        """Scale every injection by ``factor`` and re-run the base pipeline."""
        if factor < 0:
            raise SessionError(f"factor must be >= 0, got {factor}")
        gen = {b.id: b.gen_mw * factor for b in self.network.buses if b.gen_mw > 0}
        load = {b.id: b.load_mw * factor for b in self.network.buses if b.load_mw > 0}
        network = self.network.with_injections(gen, load)
        return self._rebuild(network, f"scale_injections {factor}", "scale_injections")

    @staticmethod
    def _cut_side(network: PowerNetwork, cut: set[BranchId]) -> set[BusId]:
        """One side of the bipartition induced by ``cut``.

        Valid iff two-coloring the components linked by the cut branches
        succeeds with every cut branch crossing colors.
        """
        comps = network.connected_components(exclude=cut)
        comp_of: dict[BusId, int] = {}
        for i, comp in enumerate(comps):
            for b in comp:
                comp_of[b] = i
        color: dict[int, int] = {}
        # union-find-free 2-coloring over the quotient graph
        adj: dict[int, list[int]] = {i: [] for i in range(len(comps))}
        for bid in cut:
            br = network.branch_map[bid]
            a, b = comp_of[br.from_bus], comp_of[br.to_bus]
            if a == b:
                raise SessionError(
                    f"branch set is not a cut: {bid!r} does not cross a bipartition"
                )
            adj[a].append(b)
            adj[b].append(a)
        for start in range(len(comps)):
            if start in color:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in color:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        raise SessionError(
                            "branch set is not a cut: no bipartition has exactly "
                            "these branches crossing"
                        )
        side = {b for b, c in comp_of.items() if color[c] == 0}
        if not side or len(side) == len(network.bus_map):
            raise SessionError("branch set is not a proper cut")
        return side


def start(network: PowerNetwork, seed: Optional[int] = None) -> Session:
    """Build the base flow, run the full feasibility sweep, store certificates."""
    state = build_flow(
        network,
        ordering="seeded" if seed is not None else "deterministic",
        seed=seed,
    )
    results = ft_sweep(network, state)
    store = refresh(CertificateStore(), results)
    return Session(
        network=network,
        state=state,
        store=store,
        results={r.branch: r for r in results},
        seed=seed,
    )


def run_scenario(network, scenario, use_shortlist: bool = True):
    """Play a scenario's events; returns (session, per-event report rows)."""
    session = start(network, scenario.seed)
    base = EventRecord(
        label="base",
        type="base",
        branch=None,
        status=session.status,
        specials_after=sorted(session.specials()),
        new_specials=[
            {
                "branch": b,
                "margin_mw": r.margin_mw,
                "kcrit": sorted(r.kcrit),
            }
            for b, r in sorted(session.specials().items())
        ],
    )
    rows = [base.report_row()]
    for ev in scenario.events:
        if ev.type == "outage":
            rec = session.apply_event(ev.payload["branch"], use_shortlist=use_shortlist)
        elif ev.type == "scale_injections":
            rec = session.scale_injections(ev.payload["factor"])
        elif ev.type == "remedial":
            rec = session.remedial_scale(
                set(ev.payload["cut"]), ev.payload["reduce_by_mw"]
            )
        else:
            raise SessionError(f"unknown event type {ev.type!r}")
        rows.append(rec.report_row())
    return session, rows
