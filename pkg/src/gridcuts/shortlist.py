"""Shortlisting of assets whose feasibility result may have changed.

Each feasibility test leaves a certificate: every branch its augmenting
paths touched plus its limiting cut members.  After an outage, only assets
whose certificate intersects the set of disturbed branches need re-testing;
everything else provably kept both its rerouting capacity and its margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .feasibility import FTResult
from .model import BranchId
from .update import UpdateResult


class StaleStoreError(Exception):
    """The store does not correspond to the session's current sweep."""


@dataclass
class CertificateStore:
    certificates: dict[BranchId, frozenset[BranchId]] = field(default_factory=dict)
    generation: int = 0

    def clone(self) -> "CertificateStore":
        return CertificateStore(dict(self.certificates), self.generation)

    def snapshot(self) -> tuple:
        return (
            tuple(sorted((k, tuple(sorted(v))) for k, v in self.certificates.items())),
            self.generation,
        )


def refresh(store: CertificateStore, results: list[FTResult]) -> CertificateStore:
    """New store with certificates replaced for the re-tested branches."""
    out = store.clone()
    for r in results:
        out.certificates[r.branch] = frozenset(r.certificate)
    out.generation += 1
    return out


def shortlist(
    store: CertificateStore,
    update: UpdateResult,
    expected_generation: int | None = None,
) -> set[BranchId]:
    """Branches whose feasibility test must be re-run after ``update``.

    Disturbed = branches on the rerouting paths plus the outaged branch
    itself (an asset whose certificate used the lost branch has lost part of
    its indirect capacity even if no flow moved).  Pruned island branches are
    dropped.
    """
    if expected_generation is not None and store.generation != expected_generation:
        raise StaleStoreError(
            f"store generation {store.generation} != expected {expected_generation}"
        )
    disturbed = set(update.changed_branches) | {update.branch}
    out = {
        asset
        for asset, cert in store.certificates.items()
        if cert & disturbed
    }
    out |= update.changed_branches
    out.discard(update.branch)
    out -= update.pruned_branches
    return out
