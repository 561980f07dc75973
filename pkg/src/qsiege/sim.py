"""Event-driven continuous-time simulator of the attacked two-queue system.

The engine samples competing exponential clocks (next-event sampling with
total rate lam + mu*[x>0] + mu*[y>0]), which reproduces the continuous-time
Markov chain exactly.  Each arrival draws three uniforms in fixed order
(attacked?, defended?, routing coin) so that paired runs under common random
numbers stay aligned.

Replication r runs on its own generator seeded by a splitmix64 hash of
(seed, r); identical configurations therefore give bit-identical estimates,
and replications can be evaluated in parallel processes (QSIEGE_THREADS)
without changing the result.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

from .game import Equilibrium
from .model import (
    CostParams,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    _require,
)

_MASK64 = (1 << 64) - 1

# Pooled second-half window mean above drift_factor * first-half mean (plus a
# small absolute slack for near-empty systems) flags likely instability.
_DRIFT_SLACK = 0.25


def mix_seed(seed: int, replication: int) -> int:
    """splitmix64 finalizer over seed + (r+1)*golden; the stated per-replication derivation."""
    z = (seed + (replication + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    horizon: float = 1_000_000.0
    warmup_fraction: float = 0.1
    replications: int = 10
    drift_factor: float = 1.5

    def __post_init__(self):
        _require(self.horizon > 0, "horizon must be positive")
        _require(0.0 <= self.warmup_fraction < 1.0, "warmup fraction must lie in [0, 1)")
        _require(self.replications >= 1, "at least one replication required")
        _require(self.drift_factor > 1.0, "drift factor must exceed 1")
        _require(0 <= self.seed <= _MASK64, "seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ReplicationResult:
    """Windowed time averages and event counts from a single replication."""

    mean_total_jobs: float
    first_half_mean: float
    second_half_mean: float
    arrivals: int
    departures: int
    misrouted: int
    policy_routed: int
    x_final: int
    y_final: int


@dataclass(frozen=True)
class SimEstimate:
    mean_total_jobs: float
    std_error: float
    replications: int
    unstable_hint: bool
    per_replication: tuple[float, ...]


@dataclass(frozen=True)
class SimulatedRisk:
    """Simulated queue risk and security risk with replication-propagated errors."""

    queue_risk: float
    queue_risk_err: float
    security_risk: float
    security_risk_err: float
    replications: int


TraceFn = Callable[[float, str, int, int], None]


def _run_replication(
    jsq: bool,
    a: float,
    p: float,
    d: float,
    lam: float,
    mu: float,
    horizon: float,
    warmup_fraction: float,
    seed: int,
    trace: TraceFn | None = None,
) -> ReplicationResult:
    rng = random.Random(seed)
    rand = rng.random
    log = math.log

    t = 0.0
    x = 0
    y = 0
    meas_start = warmup_fraction * horizon
    mid = 0.5 * (meas_start + horizon)
    area1 = 0.0
    area2 = 0.0
    arrivals = departures = misrouted = policy_routed = 0

    while True:
        rate = lam
        if x:
            rate += mu
        if y:
            rate += mu
        t_next = t + (-log(1.0 - rand()) / rate)

        if t_next > meas_start:
            lo = t if t > meas_start else meas_start
            hi = t_next if t_next < horizon else horizon
            if hi > lo:
                n = x + y
                if n:
                    if hi <= mid:
                        area1 += n * (hi - lo)
                    elif lo >= mid:
                        area2 += n * (hi - lo)
                    else:
                        area1 += n * (mid - lo)
                        area2 += n * (hi - mid)
        if t_next >= horizon:
            break
        t = t_next

        u = rand() * rate
        if u < lam:
            arrivals += 1
            u_attack = rand()
            u_defend = rand()
            u_route = rand()
            if u_attack < a and not u_defend < d:
                misrouted += 1
                to_first = u_route < p
            else:
                policy_routed += 1
                if jsq:
                    to_first = x < y or (x == y and u_route < 0.5)
                else:
                    to_first = u_route < 0.5
            if to_first:
                x += 1
            else:
                y += 1
            if trace is not None:
                trace(t, "arr1" if to_first else "arr2", x, y)
        elif x and u < lam + mu:
            x -= 1
            departures += 1
            if trace is not None:
                trace(t, "dep1", x, y)
        else:
            y -= 1
            departures += 1
            if trace is not None:
                trace(t, "dep2", x, y)

    window = horizon - meas_start
    half = mid - meas_start
    return ReplicationResult(
        mean_total_jobs=(area1 + area2) / window,
        first_half_mean=area1 / half,
        second_half_mean=area2 / (horizon - mid),
        arrivals=arrivals,
        departures=departures,
        misrouted=misrouted,
        policy_routed=policy_routed,
        x_final=x,
        y_final=y,
    )


def _replication_args(
    policy: RoutingPolicy,
    profile: StrategyProfile,
    params: SystemParams,
    config: SimConfig,
    replication: int,
) -> tuple:
    return (
        policy is RoutingPolicy.SHORTER_QUEUE,
        profile.a,
        profile.p,
        profile.d,
        params.lam,
        params.mu,
        config.horizon,
        config.warmup_fraction,
        mix_seed(config.seed, replication),
    )


def _worker(args: tuple) -> ReplicationResult:
    return _run_replication(*args)


def _sim_workers() -> int:
    raw = os.environ.get("QSIEGE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def replicate(
    policy: RoutingPolicy,
    profile: StrategyProfile,
    params: SystemParams,
    config: SimConfig,
) -> list[ReplicationResult]:
    """All replication results for the configuration, in replication order."""
    arg_sets = [
        _replication_args(policy, profile, params, config, r)
        for r in range(config.replications)
    ]
    workers = min(_sim_workers(), len(arg_sets))
    if workers <= 1:
        return [_worker(args) for args in arg_sets]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, arg_sets))


def _aggregate(results: list[ReplicationResult], drift_factor: float) -> SimEstimate:
    means = [r.mean_total_jobs for r in results]
    n = len(means)
    mean = sum(means) / n
    if n > 1:
        var = sum((m - mean) ** 2 for m in means) / (n - 1)
        std_error = math.sqrt(var / n)
    else:
        std_error = 0.0
    first = sum(r.first_half_mean for r in results) / n
    second = sum(r.second_half_mean for r in results) / n
    unstable_hint = second > drift_factor * first + _DRIFT_SLACK
    return SimEstimate(
        mean_total_jobs=mean,
        std_error=std_error,
        replications=n,
        unstable_hint=unstable_hint,
        per_replication=tuple(means),
    )


def simulate(
    policy: RoutingPolicy,
    profile: StrategyProfile,
    params: SystemParams,
    config: SimConfig,
    trace: TraceFn | None = None,
) -> SimEstimate:
    """Mean total job count with replication-based error bars.

    Time-averages x + y over [warmup_fraction * horizon, horizon] per
    replication and aggregates across replications.  ``unstable_hint``
    flags drift (second half-window mean well above the first); it is
    advisory, unstable inputs are legitimate experiments.  When ``trace``
    is given it receives every event of replication 0 as
    (time, kind, x, y); the estimate is unchanged.
    """
    if trace is None:
        results = replicate(policy, profile, params, config)
    else:
        results = [
            _run_replication(
                *_replication_args(policy, profile, params, config, 0), trace=trace
            )
        ]
        for r in range(1, config.replications):
            results.append(_worker(_replication_args(policy, profile, params, config, r)))
    return _aggregate(results, config.drift_factor)


def iter_trace(
    policy: RoutingPolicy,
    profile: StrategyProfile,
    params: SystemParams,
    config: SimConfig,
) -> Iterator[tuple[float, str, int, int]]:
    """Events of replication 0 as (time, kind, x, y) records."""
    rows: list[tuple[float, str, int, int]] = []
    _run_replication(
        *_replication_args(policy, profile, params, config, 0),
        trace=lambda t, kind, x, y: rows.append((t, kind, x, y)),
    )
    return iter(rows)


def simulate_risk(
    policy: RoutingPolicy,
    params: SystemParams,
    costs: CostParams,
    eq: Equilibrium,
    config: SimConfig,
) -> SimulatedRisk:
    """Simulated queue and security risk at an equilibrium point.

    The equilibrium profile and the attack-free baseline run on common
    random numbers (identical per-replication seeds), so a (0, 0)
    equilibrium yields exactly zero queue risk.  Errors combine in
    quadrature; the security risk adds the deterministic defense spend
    lam * c_d * d_star.
    """
    at_eq = simulate(
        policy,
        StrategyProfile(a=eq.a_star, p=1.0, d=eq.d_star),
        params,
        config,
    )
    baseline = simulate(policy, StrategyProfile(a=0.0, p=1.0, d=0.0), params, config)
    r_q = at_eq.mean_total_jobs - baseline.mean_total_jobs
    err = math.sqrt(at_eq.std_error**2 + baseline.std_error**2)
    r_s = r_q + params.lam * costs.c_d * eq.d_star
    return SimulatedRisk(
        queue_risk=r_q,
        queue_risk_err=err,
        security_risk=r_s,
        security_risk_err=err,
        replications=config.replications,
    )
