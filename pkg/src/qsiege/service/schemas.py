"""Request and response models for the analysis service.

Requests reject unknown fields so that misspelled parameters fail loudly.
Infinite values serialize as the strings "inf" / "-inf" (strict JSON has no
infinity literal); finite values are plain numbers.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..model import ExtendedValue

PolicyName = Literal["jsq", "bernoulli"]
JsonNumber = Union[float, Literal["inf", "-inf"]]


def ext_json(value: ExtendedValue) -> JsonNumber:
    return value.to_json()


class _Request(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class SystemFields(_Request):
    lam: float = Field(alias="lambda", description="arrival rate (jobs per unit time)")
    mu: float = Field(description="service rate of one server")


class StabilityRequest(SystemFields):
    policy: PolicyName
    a: float = 0.0
    p: float = 1.0
    d: float = 0.0
    res: Optional[int] = Field(default=None, description="grid classification over (a, d)")


class CostRequest(SystemFields):
    a: float = 0.0
    p: float = 1.0
    d: float = 0.0


class UtilitiesRequest(SystemFields):
    policy: PolicyName
    ca: float = Field(ge=0)
    cd: float = Field(ge=0)
    a: float = 0.0
    d: float = 0.0


class EquilibriumRequest(SystemFields):
    policy: PolicyName
    ca: float = Field(ge=0)
    cd: float = Field(ge=0)


class RiskSurfaceRequest(SystemFields):
    policy: PolicyName
    ca: float = Field(default=0.0, ge=0)
    cd: float = Field(ge=0)
    res: int = 101


class RegimeMapRequest(SystemFields):
    policy: PolicyName
    ca: float = Field(gt=0, description="upper end of the attack-cost range (0, ca]")
    cd: float = Field(gt=0, description="upper end of the defense-cost range (0, cd]")
    res: int = 201


class SimSettings(_Request):
    seed: int = 0
    horizon: float = 1_000_000.0
    warmup: float = 0.1
    reps: int = 10


class SimulateRequest(SystemFields, SimSettings):
    policy: PolicyName
    a: float = 0.0
    p: float = 1.0
    d: float = 0.0


class CompareRequest(SystemFields, SimSettings):
    ca: float = Field(ge=0)
    cd: float = Field(ge=0)


class HealthResponse(BaseModel):
    status: str
    version: str


class StabilityPoint(BaseModel):
    a: float
    d: float
    stable: bool


class StabilityResponse(BaseModel):
    inputs: dict
    stable: Optional[bool] = None
    cells: Optional[list[StabilityPoint]] = None


class CostModelOut(BaseModel):
    total: JsonNumber
    server1: Optional[JsonNumber] = None
    server2: Optional[JsonNumber] = None
    exact: bool


class CostResponse(BaseModel):
    inputs: dict
    jsq: CostModelOut
    bernoulli: CostModelOut


class UtilitiesResponse(BaseModel):
    inputs: dict
    attacker: JsonNumber
    defender: JsonNumber


class EquilibriumResponse(BaseModel):
    inputs: dict
    regime: str
    a: float
    d: float
    attacker_utility: JsonNumber
    defender_utility: JsonNumber


class RiskCellOut(BaseModel):
    a: float
    d: float
    risk: JsonNumber


class RiskSurfaceResponse(BaseModel):
    inputs: dict
    cells: list[RiskCellOut]


class RegimeCellOut(BaseModel):
    ca: float
    cd: float
    regime: str
    a_star: float
    d_star: float


class RegimeMapResponse(BaseModel):
    inputs: dict
    cells: list[RegimeCellOut]


class SimulateResponse(BaseModel):
    inputs: dict
    mean_total_jobs: float
    std_error: float
    replications: int
    unstable_hint: bool
    per_replication: list[float]


class SimulatedRiskOut(BaseModel):
    queue_risk: float
    queue_risk_err: float
    security_risk: float
    security_risk_err: float
    replications: int


class PolicyComparisonOut(BaseModel):
    policy: PolicyName
    regime: str
    a_star: float
    d_star: float
    attacker_utility: JsonNumber
    defender_utility: JsonNumber
    queue_risk: JsonNumber
    security_risk: JsonNumber
    simulated: SimulatedRiskOut


class CompareResponse(BaseModel):
    inputs: dict
    jsq: PolicyComparisonOut
    bernoulli: PolicyComparisonOut
    reduction: Optional[float]
