"""Attacker-defender game: utilities, best responses, and equilibrium regimes.

The attacker chooses the attack probability a; the defender chooses the
defense probability d.  The misroute bias is fixed at p = 1 throughout the
game analysis (an endpoint bias is always optimal for the attacker, and the
two endpoints are symmetric).  The attacker maximises queue cost minus
lam*c_a*a; the defender maximises minus queue cost minus lam*c_d*d.

Equilibria fall into three regimes:

  A  : (a*, d*) = (0, 0)           no attack, no defense
  B1 : (a*, d*) = (1, 0)           full attack, defense too expensive
  B2 : (a*, d*) = (1, d_interior)  full attack, interior defense

Regime classification follows the anticipated-defense comparison: the
attacker's endpoint utilities are evaluated at the defender's best response
to each endpoint.  Ties default to no attack (regime A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .cost import total_cost
from .model import (
    CostParams,
    ExtendedValue,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    _require,
)

# Relative tolerance for utility comparisons in regime conditions; differences
# below this scale count as ties.
COMPARISON_RTOL = 1e-12

# Interior defense values are kept strictly inside the stable interval by
# this margin when a raw closed-form value has to be clamped.
STABILITY_MARGIN = 1e-12


class NegativeRadicandError(ArithmeticError):
    """A closed-form intermediate went non-real; carries the offending radicand."""

    def __init__(self, label: str, radicand: float):
        super().__init__(f"negative radicand in {label}: {radicand!r}")
        self.label = label
        self.radicand = radicand


class Regime(Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"


@dataclass(frozen=True)
class Utilities:
    """Attacker and defender payoffs at one strategy point.

    The attacker payoff is +inf exactly when the defender payoff is -inf
    (both fire on instability).
    """

    attacker: ExtendedValue
    defender: ExtendedValue


@dataclass(frozen=True)
class DefenderResponse:
    """Defender's best-response value with the piecewise branch that produced it."""

    d_value: float
    branch: str


@dataclass(frozen=True)
class DefenseRoot:
    """Interior-defense value; ``interior`` is False when the raw solution had to
    be clamped to the stable interval (no interior optimum exists)."""

    value: float
    interior: bool


@dataclass(frozen=True)
class Equilibrium:
    a_star: float
    d_star: float
    regime: Regime
    utilities: Utilities
    policy: RoutingPolicy


def _compare(x: ExtendedValue, y: ExtendedValue, rtol: float = COMPARISON_RTOL) -> int:
    """Three-way comparison with a relative tie tolerance; infinity-aware."""
    if x == y:
        return 0
    if x.is_pos_inf or y.is_neg_inf:
        return 1
    if x.is_neg_inf or y.is_pos_inf:
        return -1
    scale = max(1.0, abs(x.value), abs(y.value))
    if abs(x.value - y.value) <= rtol * scale:
        return 0
    return 1 if x.value > y.value else -1


def utilities(
    policy: RoutingPolicy,
    a: float,
    d: float,
    params: SystemParams,
    costs: CostParams,
) -> Utilities:
    """Attacker and defender utilities at (a, d) with the misroute bias fixed at 1.

    attacker = cost(a, d) - lam*c_a*a,  defender = -cost(a, d) - lam*c_d*d,
    where cost is the policy's queue-cost model.  Unstable points yield
    (+inf, -inf).
    """
    _require(0.0 <= a <= 1.0, f"a must lie in [0, 1], got {a}")
    _require(0.0 <= d <= 1.0, f"d must lie in [0, 1], got {d}")
    profile = StrategyProfile(a=a, p=1.0, d=d)
    cost = total_cost(policy, profile, params)
    if cost.is_pos_inf:
        return Utilities(ExtendedValue.pos_inf(), ExtendedValue.neg_inf())
    lam = params.lam
    attacker = ExtendedValue.finite(cost.value - lam * costs.c_a * a)
    defender = ExtendedValue.finite(-cost.value - lam * costs.c_d * d)
    return Utilities(attacker=attacker, defender=defender)


def gamma_constant(params: SystemParams, c_d: float) -> float:
    """Shorthand constant governing the shorter-queue defender's best response:

        gamma = (1/lam) * sqrt(mu) * (sqrt(mu) - sqrt(2 / c_d))

    Negative when c_d < 2/mu.  Requires c_d > 0.
    """
    _require(c_d > 0, "gamma is undefined for c_d = 0 (division inside the radical)")
    mu = params.mu
    return math.sqrt(mu) * (math.sqrt(mu) - math.sqrt(2.0 / c_d)) / params.lam


def defender_best_response_jsq(
    a: float, params: SystemParams, c_d: float
) -> DefenderResponse:
    """Best defense against an endpoint attack under shorter-queue routing.

    For a = 0 defense only costs, so d = 0.  For a = 1 the response is the
    gamma-piecewise rule: d = 0 if gamma >= 1, d = 1 - gamma if
    1/2 < gamma < 1, and d = 1/2 if gamma <= 1/2.  Free defense (c_d = 0)
    behaves as the gamma -> -inf limit.
    """
    _require(a in (0.0, 1.0, 0, 1), f"endpoint attack required, got a={a}")
    if a == 0.0:
        return DefenderResponse(0.0, "no-attack")
    if c_d == 0.0:
        return DefenderResponse(0.5, "half")
    gamma = gamma_constant(params, c_d)
    if gamma >= 1.0:
        return DefenderResponse(0.0, "zero")
    if gamma > 0.5:
        return DefenderResponse(1.0 - gamma, "interior")
    return DefenderResponse(0.5, "half")


def zero_defense_threshold(params: SystemParams) -> float:
    """Defense cost above which the Bernoulli defender ignores a full attack.

    Equals the marginal queue-cost reduction of the first unit of defense at
    d = 0 (valid for lam < mu, where d = 0 keeps the system stable):

        lam * (2*mu - lam) / (2 * mu * (mu - lam)**2)
    """
    lam, mu = params.lam, params.mu
    _require(lam < mu, "zero-defense threshold only applies when lam < mu")
    return lam * (2.0 * mu - lam) / (2.0 * mu * (mu - lam) ** 2)


def _foc_gap(d: float, lam: float, mu: float, c_d: float) -> float:
    """Derivative of the Bernoulli defender utility in d, divided by lam:

        g(d) = 2*mu/(2*mu - (2-d)*lam)**2 - 2*mu/(2*mu - d*lam)**2 - c_d

    Strictly decreasing in d on the stable interval.
    """
    return (
        2.0 * mu / (2.0 * mu - (2.0 - d) * lam) ** 2
        - 2.0 * mu / (2.0 * mu - d * lam) ** 2
        - c_d
    )


def stability_floor(params: SystemParams) -> float:
    """Least defense keeping a full attack stable under Bernoulli routing: max(0, 2 - 2*mu/lam)."""
    return max(0.0, 2.0 - 2.0 * params.mu / params.lam)


def d_hat_numeric(params: SystemParams, c_d: float) -> DefenseRoot:
    """Interior Bernoulli defense by root finding; the oracle for the closed form.

    Brent root of the first-order condition g(d) = 0 on
    (max(0, 2 - 2*mu/lam), 1], located to 1e-14.  When g has no sign change
    (lam < mu with defense too expensive) the boundary d = 0 is returned with
    interior=False.
    """
    _require(c_d > 0, "interior defense requires c_d > 0")
    lam, mu = params.lam, params.mu
    floor = stability_floor(params)

    def g(d: float) -> float:
        return _foc_gap(d, lam, mu, c_d)

    if lam < mu:
        # g is finite at d = 0; no interior root when already non-positive.
        if g(0.0) <= 0.0:
            return DefenseRoot(0.0, interior=False)
        lo = 0.0
    else:
        # g diverges to +inf at the stability floor; step inside until positive.
        step = (1.0 - floor) * 1e-13
        lo = floor + step
        while g(lo) <= 0.0:
            step *= 10.0
            lo = floor + step
            if lo >= 1.0:
                return DefenseRoot(1.0, interior=False)
    root = brentq(g, lo, 1.0, xtol=1e-14, rtol=8.9e-16)
    return DefenseRoot(float(root), interior=True)


def d_hat_closed_form(params: SystemParams, c_d: float) -> DefenseRoot:
    """Interior Bernoulli defense in closed form (quartic resolvent).

    With zeta = 2*mu - lam and kappa = mu/c_d:

        eta   = cbrt(zeta^6/27 + kappa^2 zeta^2/2
                     + sqrt(kappa^2 zeta^8/27 + kappa^4 zeta^4/4))
        theta = sqrt(eta + zeta^4/(9*eta) + zeta^2/3)
        d_hat = 1 - (theta - sqrt(zeta^2 - theta^2 + 2*kappa*zeta/theta)) / lam

    A raw value outside the stable interval
    [max(0, 2 - 2*mu/lam) + margin, 1] is clamped and flagged
    (interior=False); this is the no-interior-optimum case and matches the
    numeric oracle's boundary return to within the margin.  Non-real
    intermediates raise NegativeRadicandError.
    """
    _require(c_d > 0, "interior defense requires c_d > 0")
    lam, mu = params.lam, params.mu
    zeta = 2.0 * mu - lam
    kappa = mu / c_d

    inner = kappa**2 * zeta**8 / 27.0 + kappa**4 * zeta**4 / 4.0
    if inner < 0.0:
        raise NegativeRadicandError("eta inner radical", inner)
    eta_arg = zeta**6 / 27.0 + kappa**2 * zeta**2 / 2.0 + math.sqrt(inner)
    eta = eta_arg ** (1.0 / 3.0)

    theta_arg = eta + zeta**4 / (9.0 * eta) + zeta**2 / 3.0
    if theta_arg < 0.0:
        raise NegativeRadicandError("theta radical", theta_arg)
    theta = math.sqrt(theta_arg)

    outer = zeta**2 - theta**2 + 2.0 * kappa * zeta / theta
    if outer < 0.0:
        raise NegativeRadicandError("outer radical", outer)
    raw = 1.0 - (theta - math.sqrt(outer)) / lam

    lower = stability_floor(params) + STABILITY_MARGIN
    if raw < lower:
        return DefenseRoot(lower, interior=False)
    if raw > 1.0:
        return DefenseRoot(1.0, interior=False)
    return DefenseRoot(raw, interior=True)


def defender_best_response_bernoulli(
    a: float, params: SystemParams, c_d: float
) -> DefenderResponse:
    """Best defense against an endpoint attack under Bernoulli routing.

    For a = 1 the defender utility is strictly concave in d, so the response
    is d = 0 when the marginal benefit at zero defense is already below c_d
    (possible only for lam < mu), and otherwise the interior stationary point
    d_hat.  For lam >= mu the utility diverges to -inf at the stability
    floor, which forces an interior response strictly above 2 - 2*mu/lam.
    """
    _require(a in (0.0, 1.0, 0, 1), f"endpoint attack required, got a={a}")
    if a == 0.0:
        return DefenderResponse(0.0, "no-attack")
    if c_d == 0.0:
        # Free defense: the first-order condition degenerates to d = 1.
        return DefenderResponse(1.0, "full")
    lam, mu = params.lam, params.mu
    if lam < mu and zero_defense_threshold(params) <= c_d:
        return DefenderResponse(0.0, "zero")
    return DefenderResponse(d_hat_closed_form(params, c_d).value, "interior")


def attacker_best_response(
    policy: RoutingPolicy, d: float, params: SystemParams, c_a: float
) -> float:
    """Endpoint attack maximising the attacker utility at the given defense level.

    The attacker utility is convex in a, so only a = 0 and a = 1 matter.
    An infinite a = 1 utility wins outright; ties resolve to no attack.
    """
    costs = CostParams(c_a=c_a, c_d=0.0)
    u1 = utilities(policy, 1.0, d, params, costs).attacker
    if u1.is_pos_inf:
        return 1.0
    u0 = utilities(policy, 0.0, d, params, costs).attacker
    return 1.0 if _compare(u1, u0) > 0 else 0.0


def _defender_best_response(
    policy: RoutingPolicy, a: float, params: SystemParams, c_d: float
) -> DefenderResponse:
    if policy is RoutingPolicy.SHORTER_QUEUE:
        return defender_best_response_jsq(a, params, c_d)
    return defender_best_response_bernoulli(a, params, c_d)


def defender_best_response(
    policy: RoutingPolicy, a: float, params: SystemParams, c_d: float
) -> DefenderResponse:
    """Policy-dispatched defender best response to an endpoint attack."""
    return _defender_best_response(policy, a, params, c_d)


def equilibrium(
    policy: RoutingPolicy, params: SystemParams, costs: CostParams
) -> Equilibrium:
    """Equilibrium regime and point for the given policy, rates, and costs.

    Compares the attacker's endpoint utilities with the defender's best
    response folded in: regime B (a* = 1) holds when attacking strictly
    beats not attacking against the induced defense, and splits into B1
    (d* = 0) and B2 (interior d*).  Otherwise regime A with (0, 0); ties go
    to A.
    """
    response = _defender_best_response(policy, 1.0, params, costs.c_d)
    u_attack = utilities(policy, 1.0, response.d_value, params, costs).attacker
    u_idle = utilities(policy, 0.0, 0.0, params, costs).attacker
    if _compare(u_attack, u_idle) > 0:
        a_star, d_star = 1.0, response.d_value
        regime = Regime.B1 if d_star == 0.0 else Regime.B2
    else:
        a_star, d_star = 0.0, 0.0
        regime = Regime.A
    return Equilibrium(
        a_star=a_star,
        d_star=d_star,
        regime=regime,
        utilities=utilities(policy, a_star, d_star, params, costs),
        policy=policy,
    )
