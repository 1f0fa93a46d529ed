"""Cut-saturation screening for meshed transmission networks.

The package builds a graph-theoretic network flow over a rated grid model,
tests every loaded branch for post-outage rerouting capacity, reroutes flow
incrementally after outages, and shortlists the assets whose verdict an
outage can have changed.  Independent DC and cut-enumeration oracles back
the test suite.
"""

from .model import (
    BALANCE_TOL_MW,
    Branch,
    BranchId,
    Bus,
    BusId,
    NetworkError,
    PowerNetwork,
    validate,
)
from .flowgraph import FlowError, FlowState, Path
from .netflow import Infeasible, build_flow, cut_transfer
from .feasibility import FTResult, ft_edge, ft_sweep, is_saturated
from .update import Islanding, UpdateResult, apply_outage
from .shortlist import CertificateStore, refresh, shortlist

__version__ = "0.1.0"

__all__ = [
    "BALANCE_TOL_MW",
    "Branch",
    "BranchId",
    "Bus",
    "BusId",
    "CertificateStore",
    "FlowError",
    "FlowState",
    "FTResult",
    "Infeasible",
    "Islanding",
    "NetworkError",
    "Path",
    "PowerNetwork",
    "UpdateResult",
    "apply_outage",
    "build_flow",
    "cut_transfer",
    "ft_edge",
    "ft_sweep",
    "is_saturated",
    "refresh",
    "shortlist",
    "validate",
    "__version__",
]
