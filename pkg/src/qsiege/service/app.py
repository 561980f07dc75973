"""FastAPI service exposing the analysis operations.

Every endpoint echoes its request payload under ``inputs`` so responses are
self-describing.  Domain validation errors map to HTTP 400 with a JSON error
body; schema violations are FastAPI's usual 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .. import __version__
from ..cost import bernoulli_cost, jsq_cost_bound
from ..game import equilibrium, utilities
from ..model import (
    CostParams,
    InvalidParameterError,
    RoutingPolicy,
    StrategyProfile,
    SystemParams,
    is_stable,
)
from ..risk import CostGrid, SurfaceGrid, compare_policies, regime_map, risk_surface
from ..sim import SimConfig, iter_trace, simulate
from . import schemas as s


def _policy(name: str) -> RoutingPolicy:
    return RoutingPolicy(name)


def _inputs(req) -> dict:
    return req.model_dump(by_alias=True, exclude_none=True)


def _cost_out(breakdown) -> s.CostModelOut:
    return s.CostModelOut(
        total=breakdown.total.to_json(),
        server1=None if breakdown.server1 is None else breakdown.server1.to_json(),
        server2=None if breakdown.server2 is None else breakdown.server2.to_json(),
        exact=breakdown.exact,
    )


def _sim_config(req) -> SimConfig:
    return SimConfig(
        seed=req.seed,
        horizon=req.horizon,
        warmup_fraction=req.warmup,
        replications=req.reps,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="qsiege", version=__version__)

    @app.exception_handler(InvalidParameterError)
    async def _invalid_parameter(_: Request, exc: InvalidParameterError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/api/health", response_model=s.HealthResponse)
    def health():
        return s.HealthResponse(status="ok", version=__version__)

    @app.post(
        "/api/stability",
        response_model=s.StabilityResponse,
        response_model_exclude_none=True,
    )
    def stability(req: s.StabilityRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        policy = _policy(req.policy)
        if req.res is None:
            profile = StrategyProfile(a=req.a, p=req.p, d=req.d)
            return s.StabilityResponse(
                inputs=_inputs(req), stable=is_stable(policy, profile, params)
            )
        if req.res < 2:
            raise InvalidParameterError("grid resolution must be at least 2 per axis")
        axis = [k / (req.res - 1) for k in range(req.res)]
        cells = [
            s.StabilityPoint(
                a=a,
                d=d,
                stable=is_stable(policy, StrategyProfile(a=a, p=req.p, d=d), params),
            )
            for a in axis
            for d in axis
        ]
        return s.StabilityResponse(inputs=_inputs(req), cells=cells)

    @app.post(
        "/api/cost",
        response_model=s.CostResponse,
        response_model_exclude_none=True,
    )
    def cost(req: s.CostRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        profile = StrategyProfile(a=req.a, p=req.p, d=req.d)
        return s.CostResponse(
            inputs=_inputs(req),
            jsq=_cost_out(jsq_cost_bound(profile, params)),
            bernoulli=_cost_out(bernoulli_cost(profile, params)),
        )

    @app.post("/api/utilities", response_model=s.UtilitiesResponse)
    def utilities_endpoint(req: s.UtilitiesRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        costs = CostParams(c_a=req.ca, c_d=req.cd)
        result = utilities(_policy(req.policy), req.a, req.d, params, costs)
        return s.UtilitiesResponse(
            inputs=_inputs(req),
            attacker=result.attacker.to_json(),
            defender=result.defender.to_json(),
        )

    @app.post("/api/equilibrium", response_model=s.EquilibriumResponse)
    def equilibrium_endpoint(req: s.EquilibriumRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        costs = CostParams(c_a=req.ca, c_d=req.cd)
        eq = equilibrium(_policy(req.policy), params, costs)
        return s.EquilibriumResponse(
            inputs=_inputs(req),
            regime=eq.regime.value,
            a=eq.a_star,
            d=eq.d_star,
            attacker_utility=eq.utilities.attacker.to_json(),
            defender_utility=eq.utilities.defender.to_json(),
        )

    @app.post("/api/risk-surface", response_model=s.RiskSurfaceResponse)
    def risk_surface_endpoint(req: s.RiskSurfaceRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        costs = CostParams(c_a=req.ca, c_d=req.cd)
        points = risk_surface(
            _policy(req.policy), params, costs, SurfaceGrid(resolution=req.res)
        )
        cells = [
            s.RiskCellOut(a=pt.a, d=pt.d, risk=pt.risk.to_json()) for pt in points
        ]
        return s.RiskSurfaceResponse(inputs=_inputs(req), cells=cells)

    @app.post("/api/regime-map", response_model=s.RegimeMapResponse)
    def regime_map_endpoint(req: s.RegimeMapRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        grid = CostGrid(ca_max=req.ca, cd_max=req.cd, resolution=req.res)
        cells = [
            s.RegimeCellOut(
                ca=c.c_a,
                cd=c.c_d,
                regime=c.regime.value,
                a_star=c.a_star,
                d_star=c.d_star,
            )
            for c in regime_map(_policy(req.policy), params, grid)
        ]
        return s.RegimeMapResponse(inputs=_inputs(req), cells=cells)

    @app.post("/api/simulate", response_model=s.SimulateResponse)
    def simulate_endpoint(req: s.SimulateRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        profile = StrategyProfile(a=req.a, p=req.p, d=req.d)
        est = simulate(_policy(req.policy), profile, params, _sim_config(req))
        return s.SimulateResponse(
            inputs=_inputs(req),
            mean_total_jobs=est.mean_total_jobs,
            std_error=est.std_error,
            replications=est.replications,
            unstable_hint=est.unstable_hint,
            per_replication=list(est.per_replication),
        )

    @app.post("/api/trace")
    def trace_endpoint(req: s.SimulateRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        profile = StrategyProfile(a=req.a, p=req.p, d=req.d)
        rows = iter_trace(_policy(req.policy), profile, params, _sim_config(req))

        def lines():
            yield "time,event,x,y\n"
            for t, kind, x, y in rows:
                yield f"{t:.17g},{kind},{x},{y}\n"

        return StreamingResponse(lines(), media_type="text/csv")

    @app.post("/api/compare", response_model=s.CompareResponse)
    def compare_endpoint(req: s.CompareRequest):
        params = SystemParams(lam=req.lam, mu=req.mu)
        costs = CostParams(c_a=req.ca, c_d=req.cd)
        report = compare_policies(params, costs, _sim_config(req))

        def policy_out(side) -> s.PolicyComparisonOut:
            eq = side.equilibrium
            return s.PolicyComparisonOut(
                policy=side.policy.value,
                regime=eq.regime.value,
                a_star=eq.a_star,
                d_star=eq.d_star,
                attacker_utility=eq.utilities.attacker.to_json(),
                defender_utility=eq.utilities.defender.to_json(),
                queue_risk=side.queue_risk.to_json(),
                security_risk=side.security_risk.to_json(),
                simulated=s.SimulatedRiskOut(
                    queue_risk=side.simulated.queue_risk,
                    queue_risk_err=side.simulated.queue_risk_err,
                    security_risk=side.simulated.security_risk,
                    security_risk_err=side.simulated.security_risk_err,
                    replications=side.simulated.replications,
                ),
            )

        return s.CompareResponse(
            inputs=_inputs(req),
            jsq=policy_out(report.jsq),
            bernoulli=policy_out(report.bernoulli),
            reduction=report.reduction,
        )

    return app


app = create_app()
