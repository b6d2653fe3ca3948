"""Analytical steady state of the threshold policy under a two-level workload.

One fragment moves between ``n`` sites: a designated site attracts each
access with probability ``x_s`` and every other site with
``x_d = (1 - x_s) / (n - 1)``. Because the non-designated sites are
exchangeable, the embedded Markov chain over (owner site, counter value)
lumps to ``2 * (t + 1)`` states: owner designated or not, counter
0..t. :func:`threshold_stationary` solves that lumped chain;
:func:`brute_force_stationary` solves the full ``n * (t + 1)``-state
chain without the lumping argument and exists purely as a cross-check.

The fraction of accesses served at the designated site in steady state is
the total stationary mass of the designated-owner states (state counters
are sampled at access arrival, which is exactly when the simulator counts
residency).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .workload import InvalidProbabilityError

_POWER_TOL = 1e-13
_POWER_MAX_ITER = 1_500
_POWER_CHECK_EVERY = 100


class NonStochasticRowError(RuntimeError):
    pass


class ParamsTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class ChainParams:
    """Two-level workload chain: ``n`` sites, hot mass ``x_s``, threshold ``t``."""

    n: int
    x_s: float
    t: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidProbabilityError(f"need at least two sites, got n={self.n}")
        if not (0.0 <= self.x_s <= 1.0):
            raise InvalidProbabilityError(f"x_s must lie in [0, 1], got {self.x_s}")
        if self.t < 0:
            raise ValueError(f"threshold must be non-negative, got {self.t}")

    @property
    def x_d(self) -> float:
        return (1.0 - self.x_s) / (self.n - 1)


@dataclass(frozen=True, eq=False)
class StationaryResult:
    o_s: float
    pi: np.ndarray  # stationary distribution, shape (2, t + 1) or (n, t + 1)


def threshold_stationary(params: ChainParams) -> StationaryResult:
    """Solve the lumped (owner-designated?, counter) chain.

    State (d, c): fragment at the designated site, c consecutive remote
    accesses so far. A designated access resets c; a remote access bumps
    it, and past ``t`` the fragment leaves (to the lumped other-state).
    State (o, c): fragment at some non-designated site. Accesses from the
    owner (probability ``x_d``) reset c; the other ``n - 2`` remote
    non-designated sites and the designated site bump it, and past ``t``
    the fragment migrates to that last requester: designated with
    probability proportional to ``x_s``, another non-designated site
    otherwise.
    """
    P = _lumped_matrix(params)
    _check_stochastic(P)
    pi = _stationary(P)
    width = params.t + 1
    pi = pi.reshape(2, width)
    return StationaryResult(o_s=float(pi[0].sum()), pi=pi)


def brute_force_stationary(params: ChainParams) -> StationaryResult:
    """Solve the full (owner site, counter) chain, no lumping.

    Deliberately independent of :func:`threshold_stationary`: states are
    enumerated per concrete site and the stationary vector comes from the
    direct linear solve. Guarded to small ``n`` and ``t`` because the
    point is verification, not scale.
    """
    if params.t > 4 or params.n > 6:
        raise ParamsTooLargeError(f"brute force is limited to t <= 4 and n <= 6, got t={params.t}, n={params.n}")
    n, t = params.n, params.t
    x_s, x_d = params.x_s, params.x_d
    width = t + 1
    size = n * width
    P = np.zeros((size, size))
    prob = [x_s] + [x_d] * (n - 1)  # site 0 is the designated one

    def idx(site: int, c: int) -> int:
        return site * width + c

    for site in range(n):
        for c in range(width):
            row = idx(site, c)
            for requester in range(n):
                p = prob[requester]
                if p == 0.0:
                    continue
                if requester == site:
                    P[row, idx(site, 0)] += p
                elif c + 1 <= t:
                    P[row, idx(site, c + 1)] += p
                else:
                    P[row, idx(requester, 0)] += p
    _check_stochastic(P)
    pi = _direct_stationary(P).reshape(n, width)
    return StationaryResult(o_s=float(pi[0].sum()), pi=pi)


def owner_access_probability(n: int, x_d: float, m: int) -> float:
    """Probability that within ``m`` accesses at least one comes from the owner.

    Under the two-level workload with the fragment parked at the
    designated site, each access is remote with probability
    ``(n - 1) * x_d``, so this is ``1 - ((n - 1) * x_d) ** m``.
    """
    if n < 2:
        raise InvalidProbabilityError(f"need at least two sites, got n={n}")
    if m < 1:
        raise InvalidProbabilityError(f"m must be >= 1, got {m}")
    remote = (n - 1) * x_d
    if x_d < 0 or remote > 1.0 + 1e-12:
        raise InvalidProbabilityError(f"(n - 1) * x_d must lie in [0, 1], got {remote}")
    return 1.0 - min(1.0, remote) ** m


def _lumped_matrix(params: ChainParams) -> np.ndarray:
    n, t = params.n, params.t
    x_s, x_d = params.x_s, params.x_d
    width = t + 1
    P = np.zeros((2 * width, 2 * width))

    def d(c: int) -> int:
        return c

    def o(c: int) -> int:
        return width + c

    for c in range(width):
        # owner at the designated site
        P[d(c), d(0)] += x_s
        if c + 1 <= t:
            P[d(c), d(c + 1)] += (n - 1) * x_d
        else:
            P[d(c), o(0)] += (n - 1) * x_d
        # owner at a non-designated site
        P[o(c), o(0)] += x_d
        if c + 1 <= t:
            P[o(c), o(c + 1)] += x_s + (n - 2) * x_d
        else:
            P[o(c), d(0)] += x_s
            P[o(c), o(0)] += (n - 2) * x_d
    return P


def _check_stochastic(P: np.ndarray) -> None:
    sums = P.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > 1e-12)[0]
    if bad.size:
        raise NonStochasticRowError(f"transition row {bad[0]} sums to {sums[bad[0]]!r}")
    if np.any(P < 0):
        raise NonStochasticRowError("transition matrix has negative entries")


def _stationary(P: np.ndarray) -> np.ndarray:
    """Power iteration with a geometric-progress bail-out to a direct solve.

    Slowly mixing chains (large ``t``, extreme ``x_s``) shrink the
    residual by a factor close to 1 per sweep; once the projected
    iterations to convergence exceed the budget, the direct solve takes
    over, so results stay exact without burning the iteration cap.
    """
    m = P.shape[0]
    pi = np.full(m, 1.0 / m)
    previous_residual = None
    for iteration in range(1, _POWER_MAX_ITER + 1):
        nxt = pi @ P
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual <= _POWER_TOL:
            return _normalize(pi)
        if iteration % _POWER_CHECK_EVERY == 0:
            if previous_residual is not None:
                factor = residual / previous_residual
                remaining = (_POWER_MAX_ITER - iteration) / _POWER_CHECK_EVERY
                if factor >= 1.0 or np.log(residual) + remaining * np.log(factor) > np.log(_POWER_TOL):
                    break
            previous_residual = residual
    return _direct_stationary(P)


def _direct_stationary(P: np.ndarray) -> np.ndarray:
    m = P.shape[0]
    lhs = np.vstack([P.T - np.eye(m), np.ones(m)])
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return _normalize(pi)


def _normalize(pi: np.ndarray) -> np.ndarray:
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()
