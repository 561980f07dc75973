"""Core domain types and stability classification for the attacked two-queue system.

Jobs arrive at rate ``lam`` and are routed to one of two exponential servers
(rate ``mu`` each) either by shorter-queue routing or by a fair Bernoulli
split.  An attacker overwrites the routing of each job with probability ``a``;
an overwritten job goes to server 1 with probability ``p``.  The operator
defends each job with probability ``d``; a defended job is always routed
correctly.  The probability that a job's routing is actually overwritten is
the effective attack rate ``a * (1 - d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class InvalidParameterError(ValueError):
    """Raised when a constructor or operation receives out-of-domain inputs."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParameterError(message)


class ExtendedValue:
    """A real number extended with explicit positive/negative infinity.

    Infinite values arise only from instability branches of the cost and
    utility formulas; they are constructed explicitly, never as the result
    of dividing by a non-positive denominator.  NaN is rejected outright so
    that regime logic can branch on infiniteness exactly.
    """

    __slots__ = ("_value",)

    def __init__(self, value: float):
        value = float(value)
        if math.isnan(value):
            raise InvalidParameterError("ExtendedValue cannot hold NaN")
        object.__setattr__(self, "_value", value)

    @classmethod
    def finite(cls, value: float) -> "ExtendedValue":
        value = float(value)
        if not math.isfinite(value):
            raise InvalidParameterError(f"finite() got non-finite value {value!r}")
        return cls(value)

    @classmethod
    def pos_inf(cls) -> "ExtendedValue":
        return cls(math.inf)

    @classmethod
    def neg_inf(cls) -> "ExtendedValue":
        return cls(-math.inf)

    @property
    def value(self) -> float:
        return self._value

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self._value)

    @property
    def is_pos_inf(self) -> bool:
        return self._value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self._value == -math.inf

    def __setattr__(self, name, val):  # pragma: no cover - immutability guard
        raise AttributeError("ExtendedValue is immutable")

    def __reduce__(self):
        return (ExtendedValue, (self._value,))

    def __add__(self, other: "ExtendedValue") -> "ExtendedValue":
        if not isinstance(other, ExtendedValue):
            return NotImplemented
        if (self.is_pos_inf and other.is_neg_inf) or (self.is_neg_inf and other.is_pos_inf):
            raise ArithmeticError("undefined sum of opposite infinities")
        if self.is_pos_inf or other.is_pos_inf:
            return ExtendedValue.pos_inf()
        if self.is_neg_inf or other.is_neg_inf:
            return ExtendedValue.neg_inf()
        return ExtendedValue(self._value + other._value)

    def __neg__(self) -> "ExtendedValue":
        return ExtendedValue(-self._value)

    def __sub__(self, other: "ExtendedValue") -> "ExtendedValue":
        if not isinstance(other, ExtendedValue):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtendedValue) and self._value == other._value

    def __lt__(self, other: "ExtendedValue") -> bool:
        return self._value < other._value

    def __le__(self, other: "ExtendedValue") -> bool:
        return self._value <= other._value

    def __gt__(self, other: "ExtendedValue") -> bool:
        return self._value > other._value

    def __ge__(self, other: "ExtendedValue") -> bool:
        return self._value >= other._value

    def __hash__(self) -> int:
        return hash(self._value)

    def __repr__(self) -> str:
        if self.is_pos_inf:
            return "ExtendedValue(+inf)"
        if self.is_neg_inf:
            return "ExtendedValue(-inf)"
        return f"ExtendedValue({self._value!r})"

    def to_json(self):
        """JSON-safe form: a plain float, or the strings "inf" / "-inf"."""
        if self.is_pos_inf:
            return "inf"
        if self.is_neg_inf:
            return "-inf"
        return self._value


class RoutingPolicy(Enum):
    """Routing policy of the operator: closed-loop shorter-queue or open-loop Bernoulli."""

    SHORTER_QUEUE = "jsq"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class SystemParams:
    """Arrival rate and per-server service rate; requires nominal stability lam < 2*mu."""

    lam: float
    mu: float

    def __post_init__(self):
        _require(self.lam > 0, f"arrival rate must be positive, got {self.lam}")
        _require(self.mu > 0, f"service rate must be positive, got {self.mu}")
        _require(
            self.lam < 2 * self.mu,
            f"nominal stability requires lam < 2*mu, got lam={self.lam}, mu={self.mu}",
        )


@dataclass(frozen=True)
class CostParams:
    """Per-job technological costs of attacking (c_a) and defending (c_d)."""

    c_a: float
    c_d: float

    def __post_init__(self):
        _require(self.c_a >= 0, f"attack cost must be non-negative, got {self.c_a}")
        _require(self.c_d >= 0, f"defense cost must be non-negative, got {self.c_d}")


@dataclass(frozen=True)
class StrategyProfile:
    """Attack probability a, misroute bias p (to server 1), defense probability d."""

    a: float = 0.0
    p: float = 1.0
    d: float = 0.0

    def __post_init__(self):
        for name in ("a", "p", "d"):
            v = getattr(self, name)
            _require(0.0 <= v <= 1.0, f"{name} must lie in [0, 1], got {v}")

    @property
    def effective_attack(self) -> float:
        return self.a * (1.0 - self.d)


def effective_attack(profile: StrategyProfile) -> float:
    """Probability that a job's routing is actually overwritten: a * (1 - d)."""
    return profile.effective_attack


def is_stable(policy: RoutingPolicy, profile: StrategyProfile, params: SystemParams) -> bool:
    """Positive recurrence of the queue-length process under the given profile.

    Shorter-queue routing is stable iff lam < 2*mu and both misdirected
    streams fit in a single server: a(1-d)*p*lam < mu and
    a(1-d)*(1-p)*lam < mu.  Bernoulli routing is stable iff each server's
    total arrival rate is strictly below mu.  Boundary equalities classify
    as unstable (null recurrence must not be reported stable).
    """
    a_eff = profile.effective_attack
    lam, mu = params.lam, params.mu
    if policy is RoutingPolicy.SHORTER_QUEUE:
        return (
            lam < 2 * mu
            and a_eff * profile.p * lam < mu
            and a_eff * (1.0 - profile.p) * lam < mu
        )
    rate1, rate2 = bernoulli_arrival_rates(profile, params)
    return rate1 < mu and rate2 < mu


def bernoulli_arrival_rates(profile: StrategyProfile, params: SystemParams) -> tuple[float, float]:
    """Per-server arrival rates under Bernoulli routing.

    Server 1 receives the overwritten stream p*a(1-d)*lam plus half of the
    untouched stream, giving (1 - a(1-d) + 2*p*a(1-d)) * lam / 2; server 2
    receives the complement.
    """
    a_eff = profile.effective_attack
    lam = params.lam
    rate1 = (1.0 - a_eff + 2.0 * profile.p * a_eff) * lam / 2.0
    rate2 = (1.0 + a_eff - 2.0 * profile.p * a_eff) * lam / 2.0
    return rate1, rate2
