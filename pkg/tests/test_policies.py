"""Policy behaviour, from scripted single traces up to property checks."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fragsim.allocation import AccessEvent, Placement, apply_migration
from fragsim.fixtures import reference_topology
from fragsim.policies import (
    FnaParams,
    FnaPolicy,
    NnaPolicy,
    OptimalPolicy,
    PolicySpec,
    ThresholdPolicy,
    alternation_score,
    build_policy,
    membership_high,
    membership_low,
    membership_medium,
    oscillation_inhibition,
)
from fragsim.topology import build_topology, complete_topology


def drive(policy, topo, initial_owner, requesters, fragment=0):
    """Feed a requester sequence through a policy, applying its moves."""
    placement = Placement({fragment: initial_owner})
    owners = [initial_owner]
    decisions = []
    for step, requester in enumerate(requesters):
        decision = policy.on_access(placement, topo, AccessEvent(step, fragment, requester))
        decisions.append(decision)
        if decision.is_move:
            apply_migration(placement, decision, policy)
            owners.append(placement.owner_of(fragment))
    return placement, owners, decisions


class TestOptimal:
    def test_first_remote_access_wins_fresh_counters(self):
        topo = complete_topology(3)
        policy = OptimalPolicy(1, 3)
        _, owners, decisions = drive(policy, topo, 0, [2])
        assert decisions[0].is_move and decisions[0].dest == 2
        assert owners == [0, 2]

    def test_strict_dominance_required(self):
        topo = complete_topology(2)
        policy = OptimalPolicy(1, 2)
        # owner banks 4 accesses; challenger ties at 4, moves on the 5th
        _, owners, decisions = drive(policy, topo, 0, [0, 0, 0, 0, 1, 1, 1, 1, 1])
        moves = [d for d in decisions if d.is_move]
        assert len(moves) == 1
        assert decisions[-1].is_move, "only the access that breaks the tie migrates"
        assert policy.counters[0] == [4, 5]

    def test_local_access_never_moves(self):
        topo = complete_topology(4)
        policy = OptimalPolicy(1, 4)
        placement = Placement({0: 1})
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 1))
        assert not decision.is_move
        assert decision.reason == "local"
        assert policy.counters[0][1] == 1, "local accesses still count"

    def test_counters_travel_with_fragment(self):
        topo = complete_topology(3)
        policy = OptimalPolicy(1, 3)
        _, owners, _ = drive(policy, topo, 0, [1, 2, 2])
        # after moving to 1 the old row keeps informing decisions
        assert owners == [0, 1, 2]
        assert policy.counters[0] == [0, 1, 2]

    @given(
        num_sites=st.integers(2, 5),
        requesters=st.lists(st.integers(0, 4), min_size=1, max_size=120),
    )
    @settings(max_examples=80, deadline=None)
    def test_owner_counter_is_weak_row_max(self, num_sites, requesters):
        requesters = [r % num_sites for r in requesters]
        topo = complete_topology(num_sites)
        policy = OptimalPolicy(1, num_sites)
        placement = Placement({0: 0})
        for step, requester in enumerate(requesters):
            before = list(policy.counters[0])
            owner = placement.owner_of(0)
            decision = policy.on_access(placement, topo, AccessEvent(step, 0, requester))
            after = list(policy.counters[0])
            expected_moved = requester != owner and after[requester] > before[owner]
            assert decision.is_move == expected_moved
            if decision.is_move:
                apply_migration(placement, decision, policy)
            assert after[placement.owner_of(0)] == max(after)


class TestThreshold:
    def test_local_access_resets_counter(self):
        topo = complete_topology(3)
        policy = ThresholdPolicy(1, t=3)
        placement = Placement({0: 0})
        for step, req in enumerate([1, 1, 1]):
            policy.on_access(placement, topo, AccessEvent(step, 0, req))
        assert policy.counts[0] == 3
        policy.on_access(placement, topo, AccessEvent(3, 0, 0))
        assert policy.counts[0] == 0

    def test_migration_on_exceeding_t(self):
        topo = complete_topology(3)
        policy = ThresholdPolicy(1, t=3)
        _, owners, decisions = drive(policy, topo, 0, [1, 2, 1, 2])
        assert [d.is_move for d in decisions] == [False, False, False, True]
        assert owners == [0, 2], "fragment jumps to the requester that broke the threshold"
        assert policy.counts[0] == 0

    def test_t_zero_chases_every_remote_access(self):
        topo = complete_topology(4)
        policy = ThresholdPolicy(1, t=0)
        seq = [3, 1, 1, 2, 0]
        _, owners, _ = drive(policy, topo, 0, seq)
        assert owners == [0, 3, 1, 2, 0]

    def test_negative_t_rejected(self):
        with pytest.raises(ValueError):
            ThresholdPolicy(1, t=-1)

    @given(
        t=st.integers(0, 4),
        requesters=st.lists(st.integers(0, 3), min_size=1, max_size=150),
    )
    @settings(max_examples=80, deadline=None)
    def test_counter_stays_within_bounds_and_t0_tracks_last_requester(self, t, requesters):
        topo = complete_topology(4)
        policy = ThresholdPolicy(1, t=t)
        placement = Placement({0: 0})
        consecutive = 0
        for step, requester in enumerate(requesters):
            owner = placement.owner_of(0)
            decision = policy.on_access(placement, topo, AccessEvent(step, 0, requester))
            if requester == owner:
                consecutive = 0
            else:
                consecutive += 1
                if consecutive > t:
                    assert decision.is_move and decision.dest == requester
                    consecutive = 0
                else:
                    assert not decision.is_move
            if decision.is_move:
                apply_migration(placement, decision, policy)
            assert 0 <= policy.counts[0] <= t
        if t == 0:
            assert placement.owner_of(0) == requesters[-1]


class TestNna:
    def test_moves_one_hop_toward_dominating_site(self):
        # path 0-1-2: requester 2 dominates, fragment hops to 1 first
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = NnaPolicy(1, 3)
        _, owners, decisions = drive(policy, topo, 0, [2, 2])
        assert decisions[0].is_move and decisions[0].dest == 1
        assert decisions[0].reason == "toward:2"
        assert owners == [0, 1, 2]

    def test_walkthrough_on_reference_topology(self):
        # fragment starts at A(0); all traffic comes from E(4), G(6),
        # H(7), I(8), so it walks A -> C -> B -> G whatever the order
        topo = reference_topology()
        policy = NnaPolicy(1, 9)
        rng = random.Random(3)
        requesters = [rng.choice([4, 6, 7, 8]) for _ in range(60)]
        _, owners, _ = drive(policy, topo, 0, requesters)
        assert owners[:4] == [0, 2, 1, 6]

    def test_argmax_tie_breaks_to_lowest_site(self):
        topo = complete_topology(4)
        placement = Placement({0: 0})
        policy = NnaPolicy(1, 4)
        policy.counters[0] = [0, 5, 5, 4]
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 3))
        # requester 3 climbs to 5 too: three sites tied at the top, the
        # lowest-numbered one is chosen as the walk target
        assert decision.is_move
        assert decision.reason == "toward:1"
        assert decision.dest == 1

    def test_threshold_trigger_counts_remote_accesses(self):
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = NnaPolicy(1, 3, trigger="threshold", t=2)
        _, owners, decisions = drive(policy, topo, 0, [2, 2, 2, 2])
        assert [d.is_move for d in decisions] == [False, False, True, False]
        # after the move to 1, remote count restarts; 4th access is 1 of 3
        assert owners == [0, 1]
        assert policy.remote_since_move[0] == 1

    def test_threshold_trigger_requires_t(self):
        with pytest.raises(ValueError):
            NnaPolicy(1, 3, trigger="threshold")

    def test_unknown_trigger_rejected(self):
        with pytest.raises(ValueError):
            NnaPolicy(1, 3, trigger="sometimes")

    def test_at_target_stays_put(self):
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = NnaPolicy(1, 3, trigger="threshold", t=0)
        placement = Placement({0: 1})
        policy.counters[0] = [0, 10, 0]  # owner already holds the max
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 2))
        assert not decision.is_move
        assert decision.reason == "at-target"

    @given(
        requesters=st.lists(st.integers(0, 8), min_size=1, max_size=200),
    )
    @settings(max_examples=60, deadline=None)
    def test_every_move_is_one_hop_toward_the_argmax(self, requesters):
        topo = reference_topology()
        policy = NnaPolicy(1, 9)
        placement = Placement({0: 0})
        for step, requester in enumerate(requesters):
            owner = placement.owner_of(0)
            decision = policy.on_access(placement, topo, AccessEvent(step, 0, requester))
            if decision.is_move:
                target = int(decision.reason.split(":")[1])
                assert decision.dest in topo.neighbors(owner)
                assert decision.dest == topo.next_hop(owner, target)
                assert policy.counters[0][target] == max(policy.counters[0])
                apply_migration(placement, decision, policy)


class TestFuzzyPieces:
    def test_membership_shapes(self):
        assert membership_low(0.0) == 1.0
        assert membership_low(0.5) == 0.0
        assert membership_medium(0.0) == 0.0
        assert membership_medium(0.5) == 1.0
        assert membership_medium(1.0) == 0.0
        assert membership_medium(0.25) == 0.5
        assert membership_high(0.5) == 0.0
        assert membership_high(0.75) == 0.5
        assert membership_high(1.0) == 1.0

    def test_alternation_score_patterns(self):
        assert alternation_score([]) == 0.0
        assert alternation_score([1, 2]) == 0.0
        assert alternation_score([1, 2, 1, 2, 1]) == 1.0
        assert alternation_score([1, 2, 3, 4]) == 0.0
        assert alternation_score([5, 5, 5, 5]) == 0.0, "repeats are not ping-pong"
        assert alternation_score([1, 2, 1, 1]) == 0.5

    def test_inhibition_rule_base(self):
        assert oscillation_inhibition(1.0, 1.0) == 1.0
        assert oscillation_inhibition(0.0, 0.0) == 0.0
        assert oscillation_inhibition(1.0, 0.0) == 0.0
        assert oscillation_inhibition(0.0, 1.0) == 0.0
        assert oscillation_inhibition(1.0, 0.5) == 1.0, "high churn with medium alternation fires"
        assert oscillation_inhibition(0.75, 0.75) == 0.5
        assert oscillation_inhibition(0.3, 1.0) == pytest.approx(0.6)

    @given(x=st.floats(0, 1), y=st.floats(0, 1))
    @settings(max_examples=100, deadline=None)
    def test_inhibition_bounded_and_monotone_pieces(self, x, y):
        value = oscillation_inhibition(x, y)
        assert 0.0 <= value <= 1.0
        # fully calm history can never inhibit
        if y == 0.0 and x <= 0.5:
            assert value == 0.0


class TestFna:
    def test_decay_and_bump(self):
        topo = complete_topology(3)
        policy = FnaPolicy(1, 3, FnaParams(window=100))
        placement = Placement({0: 0})
        policy.on_access(placement, topo, AccessEvent(0, 0, 1))
        policy.on_access(placement, topo, AccessEvent(1, 0, 2))
        assert policy.vectors[0] == pytest.approx([0.0, 0.95, 1.0])

    def test_moves_one_hop_toward_best_scoring_site(self):
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = FnaPolicy(1, 3, FnaParams(window=1))
        placement = Placement({0: 0})
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 2))
        assert decision.is_move and decision.dest == 1
        assert decision.reason == "toward:2"

    def test_local_access_always_stays(self):
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = FnaPolicy(1, 3, FnaParams(window=1))
        placement = Placement({0: 0})
        policy.vectors[0] = np.array([0.0, 0.0, 50.0])  # evaluation wants to leave
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 0))
        assert not decision.is_move
        assert decision.reason == "local"
        assert decision.inhibition is not None, "the evaluation still ran"

    def test_small_gap_blocks_the_move(self):
        topo = build_topology(2, [(0, 1)])
        policy = FnaPolicy(1, 2, FnaParams(window=2, min_gap=0.05))
        placement = Placement({0: 0})
        policy.on_access(placement, topo, AccessEvent(0, 0, 0))
        decision = policy.on_access(placement, topo, AccessEvent(1, 0, 1))
        # scores 0.95 vs 1.0: gap just over 0.025, below min_gap
        assert not decision.is_move
        assert decision.reason == "gap-below-min"

    def test_inhibited_when_history_is_ping_pong_and_scores_churn(self):
        topo = build_topology(3, [(0, 1), (1, 2)])
        policy = FnaPolicy(1, 3, FnaParams(window=1))
        placement = Placement({0: 0})
        for dest in [1, 2, 1, 2, 1, 2]:
            policy.on_migrate(0, 0, dest)  # plant a perfect alternation
        decision = policy.on_access(placement, topo, AccessEvent(0, 0, 2))
        assert not decision.is_move
        assert decision.reason == "inhibited"
        assert decision.inhibition == pytest.approx(1.0)

    def test_between_windows_nothing_happens(self):
        topo = complete_topology(3)
        policy = FnaPolicy(1, 3, FnaParams(window=5))
        placement = Placement({0: 0})
        for step in range(4):
            decision = policy.on_access(placement, topo, AccessEvent(step, 0, 2))
            assert not decision.is_move
            assert decision.reason == "no-eval"
        decision = policy.on_access(placement, topo, AccessEvent(4, 0, 2))
        assert decision.is_move, "fifth event completes the window"

    def test_history_is_bounded(self):
        policy = FnaPolicy(1, 3, FnaParams(history=4))
        for k in range(10):
            policy.on_migrate(0, 0, 1 + k % 2)
        assert len(policy._history[0]) == 4

    def test_param_validation(self):
        with pytest.raises(ValueError):
            FnaParams(window=0)
        with pytest.raises(ValueError):
            FnaParams(decay=1.0)
        with pytest.raises(ValueError):
            FnaParams(decay=0.0)
        with pytest.raises(ValueError):
            FnaParams(history=0)
        with pytest.raises(ValueError):
            FnaParams(inhibition_cutoff=1.5)
        with pytest.raises(ValueError):
            FnaParams(min_gap=-0.1)
        with pytest.raises(ValueError):
            FnaParams(eps=0.0)


class TestBuildPolicy:
    def test_builds_each_kind(self):
        assert isinstance(build_policy(PolicySpec("optimal"), 1, 3), OptimalPolicy)
        assert isinstance(build_policy(PolicySpec("threshold", t=2), 1, 3), ThresholdPolicy)
        assert isinstance(build_policy(PolicySpec("nna"), 1, 3), NnaPolicy)
        assert isinstance(build_policy(PolicySpec("fna"), 1, 3), FnaPolicy)

    def test_threshold_needs_t(self):
        with pytest.raises(ValueError):
            build_policy(PolicySpec("threshold"), 1, 3)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            build_policy(PolicySpec("greedy"), 1, 3)
