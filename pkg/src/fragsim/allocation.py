"""Core allocation state shared by every migration policy.

A fragment lives at exactly one site at a time (no replicas). Policies
observe access events and return a :class:`MigrationDecision`; the
simulation engine applies moves through :func:`apply_migration` so that
ownership changes and policy counter bookkeeping stay in lockstep.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Optional

from .topology import SiteId, Topology

FragmentId = int


class UnknownFragmentError(KeyError):
    pass


class DestEqualsOwnerError(ValueError):
    pass


@dataclass(frozen=True)
class Fragment:
    """A unit of data; ``size`` scales migration transfer cost."""

    id: FragmentId
    size: float = 1.0

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError(f"fragment {self.id}: size must be positive, got {self.size}")


class AccessEvent(NamedTuple):
    step: int
    fragment: FragmentId
    requester: SiteId


# Stay decisions are emitted once per access on the hot path, so identical
# ones are interned instead of rebuilt (they are immutable anyway).
_STAY_CACHE: dict = {}


@dataclass(frozen=True)
class MigrationDecision:
    """Outcome of a policy consultation: keep the fragment or move it.

    ``dest is None`` means stay. ``reason`` is a short machine-readable
    tag for decision logs, and ``inhibition`` carries the fuzzy inhibition
    level for policies that compute one.
    """

    fragment: FragmentId
    dest: Optional[SiteId]
    reason: str = ""
    inhibition: Optional[float] = None

    @property
    def is_move(self) -> bool:
        return self.dest is not None

    @classmethod
    def stay(cls, fragment: FragmentId, reason: str = "", inhibition: Optional[float] = None) -> "MigrationDecision":
        if inhibition is None:
            key = (fragment, reason)
            cached = _STAY_CACHE.get(key)
            if cached is None:
                cached = _STAY_CACHE[key] = cls(fragment, None, reason)
            return cached
        return cls(fragment, None, reason, inhibition)

    @classmethod
    def move(cls, fragment: FragmentId, dest: SiteId, reason: str = "", inhibition: Optional[float] = None) -> "MigrationDecision":
        return cls(fragment, dest, reason, inhibition)


class Placement:
    """Mutable map from fragment to its single owner site.

    ``owner`` is the live dict; read it freely but mutate only through
    :meth:`move` so destination validation cannot be skipped.
    """

    def __init__(self, owners: Mapping[FragmentId, SiteId]):
        self.owner: dict[FragmentId, SiteId] = dict(owners)

    def owner_of(self, fragment: FragmentId) -> SiteId:
        try:
            return self.owner[fragment]
        except KeyError:
            raise UnknownFragmentError(f"fragment {fragment} is not placed") from None

    def move(self, fragment: FragmentId, dest: SiteId) -> None:
        current = self.owner_of(fragment)
        if dest == current:
            raise DestEqualsOwnerError(f"fragment {fragment} already lives at site {dest}")
        self.owner[fragment] = dest

    def fragments(self) -> Iterator[FragmentId]:
        return iter(self.owner)

    def as_dict(self) -> dict[FragmentId, SiteId]:
        return dict(self.owner)

    def __len__(self) -> int:
        return len(self.owner)

    def __contains__(self, fragment: FragmentId) -> bool:
        return fragment in self.owner

    def __repr__(self) -> str:
        return f"Placement({self.owner!r})"


class MigrationPolicy(ABC):
    """Interface the engine drives once per access event.

    Implementations keep whatever per-fragment state they need (counters,
    score vectors, ...). A local access, where the requester already owns
    the fragment, must always come back as a stay.
    """

    name: str = "?"

    @abstractmethod
    def on_access(self, placement: Placement, topo: Topology, event: AccessEvent) -> MigrationDecision:
        """Record one access and decide whether the fragment moves."""

    def on_migrate(self, fragment: FragmentId, source: SiteId, dest: SiteId) -> None:
        """Hook called after ownership changed; reset or carry state here."""


def apply_migration(placement: Placement, decision: MigrationDecision, policy: Optional[MigrationPolicy] = None) -> None:
    """Apply a move decision to the placement and notify the policy."""
    if not decision.is_move:
        raise ValueError("apply_migration called with a stay decision")
    source = placement.owner_of(decision.fragment)
    placement.move(decision.fragment, decision.dest)
    if policy is not None:
        policy.on_migrate(decision.fragment, source, decision.dest)
