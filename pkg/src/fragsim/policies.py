"""The four fragment migration policies.

All of them react to access events through the shared
:class:`~fragsim.allocation.MigrationPolicy` interface and differ only in
what they count and where they send the fragment:

``optimal``
    Per-site access counters travel with the fragment. A remote requester
    whose counter strictly exceeds the owner's pulls the fragment over in
    one jump. The owner's counter keeps growing on local accesses, so a
    challenger has to out-access the current home before anything moves.

``threshold``
    One counter per fragment counts consecutive remote accesses; a local
    access clears it. Once the count exceeds ``t`` the fragment jumps to
    the last requester. ``t = 0`` degenerates to chasing every remote
    access.

``nna``
    Counts like ``optimal`` (or with a fixed remote-access threshold) but
    never jumps: when the trigger fires, the fragment moves one hop along
    the shortest path toward the highest-counter site. Counters travel
    with the fragment, so the walk re-aims itself at every hop.

``fna``
    Keeps an exponentially decayed access-score vector per fragment and
    re-evaluates it every ``window`` events. A small fuzzy rule base
    watches score churn and the recent migration history; when both look
    like thrashing it inhibits the move. Otherwise the fragment takes one
    hop toward the best-scoring site, like ``nna``.

A local access (requester already owns the fragment) is always a stay,
whatever the counters say.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .allocation import AccessEvent, FragmentId, MigrationDecision, MigrationPolicy, Placement
from .topology import SiteId, Topology


def _bump(row: list, site: int, cap: Optional[int]) -> None:
    # Saturating increment. With a finite cap, ties at the ceiling are
    # never broken, which is exactly the misbehaviour narrow hardware
    # counters would show; tests pin that down.
    value = row[site] + 1
    if cap is not None and value > cap:
        value = cap
    row[site] = value


class OptimalPolicy(MigrationPolicy):
    """Full per-site access counters, migration on strict dominance."""

    name = "optimal"

    def __init__(self, num_fragments: int, num_sites: int, counter_cap: Optional[int] = None):
        self.counters: list[list[int]] = [[0] * num_sites for _ in range(num_fragments)]
        self.counter_cap = counter_cap

    def on_access(self, placement: Placement, topo: Topology, event: AccessEvent) -> MigrationDecision:
        f = event.fragment
        requester = event.requester
        owner = placement.owner_of(f)
        row = self.counters[f]
        _bump(row, requester, self.counter_cap)
        if requester == owner:
            return MigrationDecision.stay(f, "local")
        if row[requester] > row[owner]:
            return MigrationDecision.move(f, requester, "dominance")
        return MigrationDecision.stay(f, "no-dominance")

    # Counters travel with the fragment, nothing to reset.


class ThresholdPolicy(MigrationPolicy):
    """Consecutive-remote-access counter with reset on local access."""

    name = "threshold"

    def __init__(self, num_fragments: int, t: int):
        if t < 0:
            raise ValueError(f"threshold must be non-negative, got {t}")
        self.t = t
        self.counts: list[int] = [0] * num_fragments

    def on_access(self, placement: Placement, topo: Topology, event: AccessEvent) -> MigrationDecision:
        f = event.fragment
        owner = placement.owner_of(f)
        if event.requester == owner:
            self.counts[f] = 0
            return MigrationDecision.stay(f, "local")
        count = self.counts[f] + 1
        if count > self.t:
            self.counts[f] = 0
            return MigrationDecision.move(f, event.requester, "threshold-exceeded")
        self.counts[f] = count
        return MigrationDecision.stay(f, "below-threshold")

    def on_migrate(self, fragment: FragmentId, source: SiteId, dest: SiteId) -> None:
        self.counts[fragment] = 0


class NnaPolicy(MigrationPolicy):
    """Nearest-neighbour allocation: jump decisions, one-hop moves.

    ``trigger`` selects when to consider moving:

    * ``"dominance"`` (default): same strict-dominance test as
      ``optimal``.
    * ``"threshold"``: after more than ``t`` remote accesses since the
      last migration of the fragment.

    The destination is always the next hop on the shortest path from the
    owner toward the site with the highest access counter (ties to the
    lowest site id). Counters travel with the fragment.
    """

    name = "nna"

    def __init__(
        self,
        num_fragments: int,
        num_sites: int,
        trigger: str = "dominance",
        t: Optional[int] = None,
        counter_cap: Optional[int] = None,
    ):
        if trigger not in ("dominance", "threshold"):
            raise ValueError(f"unknown nna trigger {trigger!r}")
        if trigger == "threshold":
            if t is None or t < 0:
                raise ValueError("nna threshold trigger needs a non-negative t")
        self.trigger = trigger
        self.t = t
        self.counter_cap = counter_cap
        self.counters: list[list[int]] = [[0] * num_sites for _ in range(num_fragments)]
        self.remote_since_move: list[int] = [0] * num_fragments

    def on_access(self, placement: Placement, topo: Topology, event: AccessEvent) -> MigrationDecision:
        f = event.fragment
        requester = event.requester
        owner = placement.owner_of(f)
        row = self.counters[f]
        _bump(row, requester, self.counter_cap)
        if requester == owner:
            return MigrationDecision.stay(f, "local")
        if self.trigger == "dominance":
            fired = row[requester] > row[owner]
        else:
            self.remote_since_move[f] += 1
            fired = self.remote_since_move[f] > self.t
        if not fired:
            return MigrationDecision.stay(f, "no-trigger")
        target = row.index(max(row))
        if target == owner:
            return MigrationDecision.stay(f, "at-target")
        return MigrationDecision.move(f, topo.next_hop(owner, target), f"toward:{target}")

    def on_migrate(self, fragment: FragmentId, source: SiteId, dest: SiteId) -> None:
        self.remote_since_move[fragment] = 0


# ---------------------------------------------------------------------------
# Fuzzy allocation


def membership_low(x: float) -> float:
    return max(0.0, 1.0 - 2.0 * x)


def membership_medium(x: float) -> float:
    return max(0.0, 1.0 - 2.0 * abs(x - 0.5))


def membership_high(x: float) -> float:
    return max(0.0, 2.0 * x - 1.0)


def alternation_score(history: Sequence[SiteId]) -> float:
    """How ping-pong-like a migration destination history looks, in [0, 1].

    Counts positions whose destination repeats the one two moves back
    while differing from the immediately preceding one (the A-B-A-B
    signature), over the ``len(history) - 2`` comparable positions.
    Histories shorter than 3 score 0.
    """
    m = len(history)
    if m < 3:
        return 0.0
    hits = 0
    for i in range(2, m):
        if history[i] == history[i - 2] and history[i] != history[i - 1]:
            hits += 1
    return hits / (m - 2)


def oscillation_inhibition(churn: float, alternation: float) -> float:
    """Mamdani-style max-min strength of the "do not move" signal.

    Three rules fire: churn high AND alternation high, churn high AND
    alternation medium, churn medium AND alternation high. Anything less
    coincident than that is considered ordinary drift and scores low.
    """
    churn_hi = membership_high(churn)
    churn_med = membership_medium(churn)
    alt_hi = membership_high(alternation)
    alt_med = membership_medium(alternation)
    return max(
        min(churn_hi, alt_hi),
        min(churn_hi, alt_med),
        min(churn_med, alt_hi),
    )


@dataclass(frozen=True)
class FnaParams:
    """Tunables for the fuzzy policy; defaults match the reference setup."""

    window: int = 20
    decay: float = 0.95
    history: int = 6
    inhibition_cutoff: float = 0.5
    min_gap: float = 0.05
    eps: float = 1e-9

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not (0.0 < self.decay < 1.0):
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if self.history < 1:
            raise ValueError(f"history must be >= 1, got {self.history}")
        if not (0.0 <= self.inhibition_cutoff <= 1.0):
            raise ValueError(f"inhibition_cutoff must lie in [0, 1], got {self.inhibition_cutoff}")
        if self.min_gap < 0:
            raise ValueError(f"min_gap must be non-negative, got {self.min_gap}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")


class FnaPolicy(MigrationPolicy):
    """Fuzzy nearest-neighbour allocation.

    Per fragment it maintains an exponentially decayed score vector ``v``
    (decay then +1 at the requester on every access) and re-evaluates the
    placement every ``window`` events of that fragment:

    * churn  is ``|v - v_prev|_1 / (|v|_1 + eps)`` clipped to [0, 1],
      where ``v_prev`` is the snapshot from the previous evaluation,
    * alternation comes from :func:`alternation_score` over the last
      ``history`` migration destinations,
    * :func:`oscillation_inhibition` fuses the two.

    The fragment moves one hop toward ``argmax v`` only if the requester
    is remote, the target is not already the owner, the normalised score
    gap ``(v[target] - v[owner]) / (|v|_1 + eps)`` reaches ``min_gap``,
    and the inhibition stays at or below ``inhibition_cutoff``.
    """

    name = "fna"

    def __init__(self, num_fragments: int, num_sites: int, params: FnaParams = FnaParams()):
        self.params = params
        self.vectors = np.zeros((num_fragments, num_sites))
        self._prev = np.zeros((num_fragments, num_sites))
        self._since_eval = [0] * num_fragments
        self._history: list[deque] = [deque(maxlen=params.history) for _ in range(num_fragments)]

    def on_access(self, placement: Placement, topo: Topology, event: AccessEvent) -> MigrationDecision:
        f = event.fragment
        owner = placement.owner_of(f)
        v = self.vectors[f]
        v *= self.params.decay
        v[event.requester] += 1.0
        self._since_eval[f] += 1
        if self._since_eval[f] < self.params.window:
            return MigrationDecision.stay(f, "local" if event.requester == owner else "no-eval")
        dest, reason, inhibition = self._evaluate(f, owner, topo)
        self._prev[f] = v  # row assignment copies the values
        self._since_eval[f] = 0
        if event.requester == owner:
            return MigrationDecision.stay(f, "local", inhibition)
        if dest is None:
            return MigrationDecision.stay(f, reason, inhibition)
        return MigrationDecision.move(f, dest, reason, inhibition)

    def _evaluate(self, f: FragmentId, owner: SiteId, topo: Topology):
        p = self.params
        v = self.vectors[f]
        total = float(v.sum()) + p.eps
        churn = min(1.0, float(np.abs(v - self._prev[f]).sum()) / total)
        inhibition = oscillation_inhibition(churn, alternation_score(self._history[f]))
        target = int(np.argmax(v))
        if target == owner:
            return None, "at-target", inhibition
        gap = (float(v[target]) - float(v[owner])) / total
        if gap < p.min_gap:
            return None, "gap-below-min", inhibition
        if inhibition > p.inhibition_cutoff:
            return None, "inhibited", inhibition
        return topo.next_hop(owner, target), f"toward:{target}", inhibition

    def on_migrate(self, fragment: FragmentId, source: SiteId, dest: SiteId) -> None:
        self._history[fragment].append(dest)
        self._since_eval[fragment] = 0


# ---------------------------------------------------------------------------
# Construction from a declarative description


@dataclass(frozen=True)
class PolicySpec:
    """Everything needed to instantiate a policy for a given run."""

    name: str
    t: Optional[int] = None
    trigger: str = "dominance"
    counter_cap: Optional[int] = None
    fna: FnaParams = field(default_factory=FnaParams)


def build_policy(spec: PolicySpec, num_fragments: int, num_sites: int) -> MigrationPolicy:
    if spec.name == "optimal":
        return OptimalPolicy(num_fragments, num_sites, counter_cap=spec.counter_cap)
    if spec.name == "threshold":
        if spec.t is None:
            raise ValueError("threshold policy needs t")
        return ThresholdPolicy(num_fragments, spec.t)
    if spec.name == "nna":
        return NnaPolicy(num_fragments, num_sites, trigger=spec.trigger, t=spec.t, counter_cap=spec.counter_cap)
    if spec.name == "fna":
        return FnaPolicy(num_fragments, num_sites, params=spec.fna)
    raise ValueError(f"unknown policy {spec.name!r}")
