"""qsiege: security-risk analysis of a two-server queue under routing-interception attacks."""

__version__ = "0.1.0"

from .cost import CostBreakdown, bernoulli_cost, jsq_cost_bound, total_cost
from .game import (
    DefenderResponse,
    DefenseRoot,
    Equilibrium,
    NegativeRadicandError,
    Regime,
    Utilities,
    attacker_best_response,
    d_hat_closed_form,
    d_hat_numeric,
    defender_best_response,
    defender_best_response_bernoulli,
    defender_best_response_jsq,
    equilibrium,
    gamma_constant,
    utilities,
    zero_defense_threshold,
)
from .model import (
    CostParams,
    ExtendedValue,
    InvalidParameterError,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    effective_attack,
    is_stable,
)
from .risk import (
    ComparisonReport,
    CostGrid,
    PolicyComparison,
    RegimeCell,
    RiskPoint,
    SurfaceGrid,
    compare_policies,
    queue_risk,
    regime_map,
    risk_surface,
    security_risk,
)
from .sim import (
    ReplicationResult,
    SimConfig,
    SimEstimate,
    SimulatedRisk,
    iter_trace,
    mix_seed,
    replicate,
    simulate,
    simulate_risk,
)

__all__ = [
    "CostBreakdown",
    "CostGrid",
    "CostParams",
    "ComparisonReport",
    "DefenderResponse",
    "DefenseRoot",
    "Equilibrium",
    "ExtendedValue",
    "InvalidParameterError",
    "NegativeRadicandError",
    "PolicyComparison",
    "Regime",
    "RegimeCell",
    "ReplicationResult",
    "RiskPoint",
    "RoutingPolicy",
    "SimConfig",
    "SimEstimate",
    "SimulatedRisk",
    "StrategyProfile",
    "SurfaceGrid",
    "SystemParams",
    "Utilities",
    "attacker_best_response",
    "bernoulli_cost",
    "compare_policies",
    "d_hat_closed_form",
    "d_hat_numeric",
    "defender_best_response",
    "defender_best_response_bernoulli",
    "defender_best_response_jsq",
    "effective_attack",
    "equilibrium",
    "gamma_constant",
    "is_stable",
    "iter_trace",
    "jsq_cost_bound",
    "mix_seed",
    "queue_risk",
    "regime_map",
    "replicate",
    "risk_surface",
    "security_risk",
    "simulate",
    "simulate_risk",
    "total_cost",
    "utilities",
    "zero_defense_threshold",
]
