"""Queueing-cost models for both routing policies.

Shorter-queue routing uses a closed-form upper bound on the mean number of
jobs in the system; Bernoulli routing splits into two independent M/M/1
queues with exact means.  Infinite costs mark unstable strategy profiles and
are produced by explicit stability branches, never by dividing through a
non-positive denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ExtendedValue,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    bernoulli_arrival_rates,
)


@dataclass(frozen=True)
class CostBreakdown:
    """Mean job counts: total for either policy, per-server only for Bernoulli.

    ``exact`` is True for the Bernoulli model and False for the shorter-queue
    upper bound.
    """

    total: ExtendedValue
    server1: ExtendedValue | None
    server2: ExtendedValue | None
    exact: bool


def jsq_cost_bound(profile: StrategyProfile, params: SystemParams) -> CostBreakdown:
    """Upper bound on the mean total job count under shorter-queue routing.

    With a_eff = a(1-d) the bound is

        -2 + 2*mu / min(mu - a_eff*p*lam, mu - a_eff*(1-p)*lam, mu - lam/2)

    and is infinite exactly when the profile is unstable (some min term
    non-positive).
    """
    a_eff = profile.effective_attack
    lam, mu = params.lam, params.mu
    slack = min(
        mu - a_eff * profile.p * lam,
        mu - a_eff * (1.0 - profile.p) * lam,
        mu - lam / 2.0,
    )
    if slack <= 0.0:
        total = ExtendedValue.pos_inf()
    else:
        total = ExtendedValue.finite(-2.0 + 2.0 * mu / slack)
    return CostBreakdown(total=total, server1=None, server2=None, exact=False)


def _mm1_mean_jobs(rate: float, mu: float) -> ExtendedValue:
    if rate >= mu:
        return ExtendedValue.pos_inf()
    return ExtendedValue.finite(rate / (mu - rate))


def bernoulli_cost(profile: StrategyProfile, params: SystemParams) -> CostBreakdown:
    """Exact mean job counts under Bernoulli routing (two independent M/M/1 queues)."""
    rate1, rate2 = bernoulli_arrival_rates(profile, params)
    server1 = _mm1_mean_jobs(rate1, params.mu)
    server2 = _mm1_mean_jobs(rate2, params.mu)
    return CostBreakdown(
        total=server1 + server2, server1=server1, server2=server2, exact=True
    )


def total_cost(
    policy: RoutingPolicy, profile: StrategyProfile, params: SystemParams
) -> ExtendedValue:
    """Mean total job count under the policy's cost model (bound for JSQ, exact for Bernoulli)."""
    if policy is RoutingPolicy.SHORTER_QUEUE:
        return jsq_cost_bound(profile, params).total
    return bernoulli_cost(profile, params).total
