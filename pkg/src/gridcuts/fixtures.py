"""Built-in study networks used by the test suite, docs, and CLI demos.

Each builder returns a fresh PowerNetwork.  The headline numbers these
fixtures are engineered to produce (cut transfers, margins, critical cut
memberships) are asserted by the test suite against independent oracles.
"""

from __future__ import annotations

import random
from typing import Callable, Optional

from .model import Branch, Bus, PowerNetwork

# Nine-bus ring-and-chord study system.  All branches rated 300 MW; the
# reactances were fitted so the DC dispatch of the three-member cut between
# the generation block {4..9} and the load block {1,2,3} splits as
# 172.51 / 121.96 / 86.39 MW, while every graph-flow solution carries exactly
# 380.86 MW across that cut in total.
_FIX9_BUSES = (
    (1, 0.0, 120.0),
    (2, 0.0, 110.0),
    (3, 0.0, 150.86),
    (4, 208.0, 0.0),
    (5, 60.0, 0.0),
    (6, 67.86, 0.0),
    (7, 0.0, 0.0),
    (8, 0.0, 0.0),
    (9, 45.0, 0.0),
)
_FIX9_BRANCHES = (
    ("4-1", 4, 1, 0.181488),
    ("4-5", 4, 5, 0.114663),
    ("5-6", 5, 6, 0.086315),
    ("6-7", 6, 7, 0.060607),
    ("7-8", 7, 8, 0.095655),
    ("8-9", 8, 9, 0.095629),
    ("7-9", 7, 9, 0.083140),
    ("9-2", 9, 2, 0.064229),
    ("9-3", 9, 3, 0.153083),
    ("1-2", 1, 2, 0.156220),
    ("2-3", 2, 3, 0.083626),
)


def nine_bus() -> PowerNetwork:
    """Meshed nine-bus system with one saturated generation/load cut."""
    buses = [Bus(i, gen_mw=g, load_mw=l) for i, g, l in _FIX9_BUSES]
    branches = [
        Branch(bid, f, t, rating_mw=300.0, reactance_pu=x)
        for bid, f, t, x in _FIX9_BRANCHES
    ]
    return PowerNetwork("nine-bus", buses, branches)


def six_bus_ring() -> PowerNetwork:
    """Six-bus ring with a single 25 MW transfer on a chord.

    Losing branch 5-6 reroutes the full 25 MW over the bus sequence
    5, 4, 1, 6 with zero deficit.
    """
    buses = [
        Bus(1),
        Bus(2),
        Bus(3),
        Bus(4),
        Bus(5, gen_mw=25.0),
        Bus(6, load_mw=25.0),
    ]
    edges = [
        ("5-6", 5, 6),
        ("4-5", 4, 5),
        ("1-4", 1, 4),
        ("1-6", 1, 6),
        ("1-2", 1, 2),
        ("2-3", 2, 3),
        ("3-4", 3, 4),
    ]
    branches = [
        Branch(bid, f, t, rating_mw=100.0, reactance_pu=0.1) for bid, f, t in edges
    ]
    return PowerNetwork("six-bus-ring", buses, branches)


def three_path_six_bus(injection_mw: float = 100.0) -> PowerNetwork:
    """Six-bus system: one direct tie plus two longer corridors.

    A single generator at bus 1 serves a single load at bus 2 over the
    direct branch 1-2 (60 MW) and two three-hop corridors rated 45 MW each.
    The corridor reactances differ (0.3 total vs 0.9 total), so the DC
    dispatch loads the short corridor far above its proportional share.

    With injection_mw=100 the loss of 1-2 both saturates a cut (margin -10)
    and overloads the short corridor in the DC model.  With injection_mw=85
    the cut keeps a +5 MW margin yet the DC model still overloads the short
    corridor -- the canonical case the cut-based test cannot see.
    """
    buses = [
        Bus(1, gen_mw=injection_mw),
        Bus(2, load_mw=injection_mw),
        Bus(3),
        Bus(4),
        Bus(5),
        Bus(6),
    ]
    branches = [
        Branch("1-2", 1, 2, rating_mw=60.0, reactance_pu=0.15),
        Branch("1-3", 1, 3, rating_mw=45.0, reactance_pu=0.1),
        Branch("3-4", 3, 4, rating_mw=45.0, reactance_pu=0.1),
        Branch("4-2", 4, 2, rating_mw=45.0, reactance_pu=0.1),
        Branch("1-5", 1, 5, rating_mw=45.0, reactance_pu=0.3),
        Branch("5-6", 5, 6, rating_mw=45.0, reactance_pu=0.3),
        Branch("6-2", 6, 2, rating_mw=45.0, reactance_pu=0.3),
    ]
    return PowerNetwork("three-path-six-bus", buses, branches)


def five_bus(case: int = 1) -> PowerNetwork:
    """Five-bus system with two generators and two loads.

    case=1 is the stressed dispatch (branch 3-4 is a special asset with a
    -31 MW margin); case=2 scales every injection by 9/11, which clears all
    negative margins (minimum bipartition margin +11 MW).
    """
    if case == 1:
        scale = 1.0
    elif case == 2:
        scale = 9.0 / 11.0
    else:
        raise ValueError(f"case must be 1 or 2, got {case}")
    buses = [
        Bus(1, gen_mw=330.0 * scale),
        Bus(2, load_mw=363.0 * scale),
        Bus(3, gen_mw=264.0 * scale),
        Bus(4, load_mw=231.0 * scale),
        Bus(5),
    ]
    branches = [
        Branch("1-2", 1, 2, rating_mw=200.0, reactance_pu=0.1),
        Branch("2-3", 2, 3, rating_mw=420.0, reactance_pu=0.1),
        Branch("3-4", 3, 4, rating_mw=120.0, reactance_pu=0.1),
        Branch("3-5", 3, 5, rating_mw=50.0, reactance_pu=0.1),
        Branch("1-5", 1, 5, rating_mw=150.0, reactance_pu=0.1),
        Branch("4-5", 4, 5, rating_mw=250.0, reactance_pu=0.1),
    ]
    return PowerNetwork("five-bus", buses, branches)


def random_network(
    seed: int,
    n_buses: int = 20,
    extra_edge_factor: float = 0.6,
    max_injection_mw: float = 100.0,
    rating_slack: float = 1.5,
) -> PowerNetwork:
    """Random connected balanced network, always flow-feasible.

    A random spanning tree guarantees connectivity; chords add meshing.
    Ratings are set to ``rating_slack`` times the flow a simple greedy
    routing would load onto each branch, with a floor, so a valid flow
    solution always exists.
    """
    rng = random.Random(seed)
    n = n_buses
    bus_ids = list(range(1, n + 1))

    edges: list[tuple[int, int]] = []
    seen_pairs: set[tuple[int, int]] = set()
    shuffled = list(bus_ids)
    rng.shuffle(shuffled)
    for i in range(1, n):
        a = shuffled[rng.randrange(i)]
        b = shuffled[i]
        pair = (min(a, b), max(a, b))
        edges.append(pair)
        seen_pairs.add(pair)
    n_extra = int(n * extra_edge_factor)
    tries = 0
    while n_extra > 0 and tries < 50 * n:
        tries += 1
        a, b = rng.sample(bus_ids, 2)
        pair = (min(a, b), max(a, b))
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        edges.append(pair)
        n_extra -= 1

    n_sources = max(1, n // 4)
    n_sinks = max(1, n // 3)
    roles = list(bus_ids)
    rng.shuffle(roles)
    sources = roles[:n_sources]
    sinks = roles[n_sources : n_sources + n_sinks]
    gen = {b: round(rng.uniform(10.0, max_injection_mw), 2) for b in sources}
    total_gen = sum(gen.values())
    weights = [rng.uniform(0.5, 1.5) for _ in sinks]
    wsum = sum(weights)
    load = {}
    acc = 0.0
    for b, w in zip(sinks[:-1], weights[:-1]):
        load[b] = round(total_gen * w / wsum, 2)
        acc += load[b]
    load[sinks[-1]] = round(total_gen - acc, 2)

    # provisional huge ratings, route greedily, then shrink with slack
    buses = [Bus(b, gen_mw=gen.get(b, 0.0), load_mw=load.get(b, 0.0)) for b in bus_ids]
    big = [
        Branch(f"{a}-{b}", a, b, rating_mw=1e9, reactance_pu=round(rng.uniform(0.05, 0.3), 4))
        for a, b in edges
    ]
    probe = PowerNetwork("probe", buses, big)
    from .netflow import build_flow  # local import avoids a cycle at module load

    state = build_flow(probe)
    branches = []
    for br in big:
        f = abs(state.flow_mw(br.id))
        rating = max(round(f * rating_slack, 2), 25.0)
        branches.append(
            Branch(br.id, br.from_bus, br.to_bus, rating_mw=rating, reactance_pu=br.reactance_pu)
        )
    return PowerNetwork(f"random-{seed}", buses, branches)


def synthetic_grid(
    n_buses: int = 2000,
    n_branches: int = 3000,
    seed: int = 7,
    rating_slack: float = 1.3,
) -> PowerNetwork:
    """Large synthetic meshed grid for throughput measurements.

    Spanning tree plus random chords; roughly 5% generator buses and 15%
    load buses.  Ratings leave ``rating_slack`` headroom over a reference
    routing so the base case is comfortably feasible.
    """
    rng = random.Random(seed)
    n = n_buses
    bus_ids = list(range(1, n + 1))
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    order = list(bus_ids)
    rng.shuffle(order)
    for i in range(1, n):
        # bias attachment toward recent buses for a transmission-like diameter
        j = rng.randrange(max(0, i - 40), i)
        a, b = order[j], order[i]
        pair = (min(a, b), max(a, b))
        edges.append(pair)
        seen.add(pair)
    while len(edges) < n_branches:
        a, b = rng.sample(bus_ids, 2)
        pair = (min(a, b), max(a, b))
        if pair in seen:
            continue
        seen.add(pair)
        edges.append(pair)

    roles = list(bus_ids)
    rng.shuffle(roles)
    n_gen = n // 20
    n_load = (3 * n) // 20
    gens = roles[:n_gen]
    loads = roles[n_gen : n_gen + n_load]
    gen = {b: round(rng.uniform(50.0, 500.0), 1) for b in gens}
    total = sum(gen.values())
    w = [rng.uniform(0.5, 1.5) for _ in loads]
    ws = sum(w)
    load = {}
    acc = 0.0
    for b, wi in zip(loads[:-1], w[:-1]):
        load[b] = round(total * wi / ws, 1)
        acc += load[b]
    load[loads[-1]] = round(total - acc, 1)

    buses = [Bus(b, gen_mw=gen.get(b, 0.0), load_mw=load.get(b, 0.0)) for b in bus_ids]
    big = [
        Branch(f"{a}-{b}", a, b, rating_mw=1e9, reactance_pu=round(rng.uniform(0.02, 0.2), 4))
        for a, b in edges
    ]
    probe = PowerNetwork("probe", buses, big)
    from .netflow import build_flow

    state = build_flow(probe)
    branches = []
    for br in big:
        f = abs(state.flow_mw(br.id))
        rating = max(round(f * rating_slack, 1), 50.0)
        branches.append(
            Branch(br.id, br.from_bus, br.to_bus, rating_mw=rating, reactance_pu=br.reactance_pu)
        )
    return PowerNetwork(f"synthetic-{n_buses}", buses, branches)


def data_path(name: str):
    """Path to a packaged data file (cases, scenarios)."""
    from importlib import resources

    return resources.files("gridcuts") / "data" / name


def ieee118() -> PowerNetwork:
    """118-bus study network with the engineered ratings overlay."""
    from .caseio import load_case

    return load_case(data_path("ieee118.case"))


FIXTURES: dict[str, Callable[[], PowerNetwork]] = {
    "nine-bus": nine_bus,
    "six-bus-ring": six_bus_ring,
    "three-path-100": lambda: three_path_six_bus(100.0),
    "three-path-85": lambda: three_path_six_bus(85.0),
    "five-bus-case1": lambda: five_bus(1),
    "five-bus-case2": lambda: five_bus(2),
    "ieee118": ieee118,
}


def get_fixture(name: str) -> PowerNetwork:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(
            f"unknown fixture {name!r}; available: {sorted(FIXTURES)}"
        ) from None
