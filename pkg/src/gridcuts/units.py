"""Fixed-point power arithmetic.

All flows, capacities and injections are carried internally as integers in
units of 1e-9 MW.  Integer arithmetic keeps augmentation exactly reversible,
makes replay byte-identical, and turns every 1e-9 MW tolerance in the test
suite into an exact comparison.
"""

from __future__ import annotations

UNITS_PER_MW = 10**9


def to_units(mw: float) -> int:
    """Quantize a MW value to integer units of 1e-9 MW."""
    return round(mw * UNITS_PER_MW)


def to_mw(units: int) -> float:
    return units / UNITS_PER_MW
