"""Risk metrics, parameter sweeps, and the cross-policy comparison.

Security risk is the defender's utility loss relative to the attack-free
baseline; queue risk is the queue-cost increase alone.  They differ exactly
by the defense spend lam*c_d*d.  Sweeps are deterministic row-major grids;
cells are independent and may be evaluated in parallel processes when the
QSIEGE_THREADS environment variable is set above 1.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

from .cost import total_cost
from .game import Equilibrium, Regime, equilibrium, utilities
from .model import (
    CostParams,
    ExtendedValue,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    _require,
)
from .sim import SimConfig, SimulatedRisk, simulate_risk


@dataclass(frozen=True)
class RiskPoint:
    a: float
    d: float
    risk: ExtendedValue


@dataclass(frozen=True)
class RegimeCell:
    c_a: float
    c_d: float
    regime: Regime
    a_star: float
    d_star: float


@dataclass(frozen=True)
class SurfaceGrid:
    """Inclusive [0, 1] x [0, 1] lattice over (a, d) with ``resolution`` points per axis."""

    resolution: int = 101

    def __post_init__(self):
        _require(self.resolution >= 2, "grid resolution must be at least 2 per axis")

    def axis(self) -> list[float]:
        n = self.resolution
        return [k / (n - 1) for k in range(n)]


@dataclass(frozen=True)
class CostGrid:
    """Cost lattice over (c_a, c_d] ranges; each axis holds the right edges of
    ``resolution`` equal subintervals of (lo, hi], so a zero lower bound is
    excluded."""

    ca_max: float
    cd_max: float
    resolution: int = 201
    ca_min: float = 0.0
    cd_min: float = 0.0

    def __post_init__(self):
        _require(self.resolution >= 2, "grid resolution must be at least 2 per axis")
        _require(self.ca_max > self.ca_min >= 0, "attack-cost range must be positive")
        _require(self.cd_max > self.cd_min >= 0, "defense-cost range must be positive")

    def ca_axis(self) -> list[float]:
        n = self.resolution
        return [self.ca_min + (self.ca_max - self.ca_min) * (k + 1) / n for k in range(n)]

    def cd_axis(self) -> list[float]:
        n = self.resolution
        return [self.cd_min + (self.cd_max - self.cd_min) * (k + 1) / n for k in range(n)]


def security_risk(
    policy: RoutingPolicy,
    a: float,
    d: float,
    params: SystemParams,
    costs: CostParams,
) -> ExtendedValue:
    """Defender-utility loss relative to the attack-free baseline; +inf when (a, d) is unstable."""
    baseline = utilities(policy, 0.0, 0.0, params, costs).defender
    current = utilities(policy, a, d, params, costs).defender
    return baseline - current


def queue_risk(
    policy: RoutingPolicy, a: float, d: float, params: SystemParams
) -> ExtendedValue:
    """Queue-cost increase over the attack-free baseline (misroute bias fixed at 1)."""
    _require(0.0 <= a <= 1.0, f"a must lie in [0, 1], got {a}")
    _require(0.0 <= d <= 1.0, f"d must lie in [0, 1], got {d}")
    attacked = total_cost(policy, StrategyProfile(a=a, p=1.0, d=d), params)
    baseline = total_cost(policy, StrategyProfile(a=0.0, p=1.0, d=0.0), params)
    return attacked - baseline


def _surface_row(
    policy: RoutingPolicy,
    params: SystemParams,
    costs: CostParams,
    d_values: Sequence[float],
    a: float,
) -> list[RiskPoint]:
    return [
        RiskPoint(a=a, d=d, risk=security_risk(policy, a, d, params, costs))
        for d in d_values
    ]


def _regime_row(
    policy: RoutingPolicy,
    params: SystemParams,
    cd_values: Sequence[float],
    c_a: float,
) -> list[RegimeCell]:
    cells = []
    for c_d in cd_values:
        eq = equilibrium(policy, params, CostParams(c_a=c_a, c_d=c_d))
        cells.append(
            RegimeCell(c_a=c_a, c_d=c_d, regime=eq.regime, a_star=eq.a_star, d_star=eq.d_star)
        )
    return cells


def _sweep_workers() -> int:
    raw = os.environ.get("QSIEGE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_rows(row_fn, row_keys: Sequence) -> list:
    """Evaluate one function per row, optionally in parallel, preserving row order."""
    workers = min(_sweep_workers(), len(row_keys))
    if workers <= 1:
        rows = [row_fn(key) for key in row_keys]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row_fn, row_keys))
    return [cell for row in rows for cell in row]


def risk_surface(
    policy: RoutingPolicy,
    params: SystemParams,
    costs: CostParams,
    grid: SurfaceGrid = SurfaceGrid(),
) -> list[RiskPoint]:
    """Security risk on a row-major (a, d) lattice; unstable cells are +inf."""
    axis = grid.axis()
    return _map_rows(partial(_surface_row, policy, params, costs, axis), axis)


def regime_map(
    policy: RoutingPolicy,
    params: SystemParams,
    cost_grid: CostGrid,
) -> list[RegimeCell]:
    """Equilibrium per (c_a, c_d) cell, row-major in c_a then c_d."""
    return _map_rows(
        partial(_regime_row, policy, params, cost_grid.cd_axis()),
        cost_grid.ca_axis(),
    )


@dataclass(frozen=True)
class PolicyComparison:
    policy: RoutingPolicy
    equilibrium: Equilibrium
    queue_risk: ExtendedValue
    security_risk: ExtendedValue
    simulated: SimulatedRisk


@dataclass(frozen=True)
class ComparisonReport:
    """Cross-policy risk comparison at the respective equilibria.

    ``reduction`` is the relative decrease of the simulated shorter-queue
    security risk against the simulated Bernoulli one; None when the
    Bernoulli risk is zero (no attack under either policy).
    """

    jsq: PolicyComparison
    bernoulli: PolicyComparison
    reduction: float | None


def _compare_one(
    policy: RoutingPolicy,
    params: SystemParams,
    costs: CostParams,
    sim_config: SimConfig,
) -> PolicyComparison:
    eq = equilibrium(policy, params, costs)
    return PolicyComparison(
        policy=policy,
        equilibrium=eq,
        queue_risk=queue_risk(policy, eq.a_star, eq.d_star, params),
        security_risk=security_risk(policy, eq.a_star, eq.d_star, params, costs),
        simulated=simulate_risk(policy, params, costs, eq, sim_config),
    )


def compare_policies(
    params: SystemParams, costs: CostParams, sim_config: SimConfig
) -> ComparisonReport:
    """Equilibria, analytic risks, and simulated risks under both policies."""
    jsq = _compare_one(RoutingPolicy.SHORTER_QUEUE, params, costs, sim_config)
    bern = _compare_one(RoutingPolicy.BERNOULLI, params, costs, sim_config)
    if bern.simulated.security_risk == 0.0:
        reduction = None
    else:
        reduction = 1.0 - jsq.simulated.security_risk / bern.simulated.security_risk
    return ComparisonReport(jsq=jsq, bernoulli=bern, reduction=reduction)
