import math

import pytest

from qsiege import (
    CostParams,
    RoutingPolicy,
    SimConfig,
    StrategyProfile,
    SystemParams,
    bernoulli_cost,
    equilibrium,
    iter_trace,
    jsq_cost_bound,
    mix_seed,
    queue_risk,
    replicate,
    simulate,
    simulate_risk,
)

P04 = SystemParams(lam=0.4, mu=0.5)
P06 = SystemParams(lam=0.6, mu=0.5)
JSQ = RoutingPolicy.SHORTER_QUEUE
BERN = RoutingPolicy.BERNOULLI
IDLE = StrategyProfile(a=0.0, p=1.0, d=0.0)


class TestSeedMixing:
    def test_distinct_streams(self):
        seen = {mix_seed(s, r) for s in (0, 1, 2**63) for r in range(50)}
        assert len(seen) == 150

    def test_pure_function(self):
        assert mix_seed(42, 7) == mix_seed(42, 7)


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"horizon": 0.0},
            {"warmup_fraction": 1.0},
            {"warmup_fraction": -0.1},
            {"replications": 0},
            {"drift_factor": 1.0},
            {"seed": -1},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(Exception):
            SimConfig(**kwargs)


class TestEstimates:
    def test_bernoulli_matches_exact_mean(self):
        cfg = SimConfig(seed=42, horizon=200_000.0, replications=10)
        est = simulate(BERN, IDLE, P04, cfg)
        exact = bernoulli_cost(IDLE, P04).total.value
        assert abs(est.mean_total_jobs - exact) <= 3.0 * est.std_error
        assert est.std_error / est.mean_total_jobs < 0.02
        assert est.replications == 10
        assert len(est.per_replication) == 10
        assert not est.unstable_hint

    def test_jsq_beats_bernoulli_and_respects_bound(self):
        cfg = SimConfig(seed=42, horizon=100_000.0, replications=8)
        jsq = simulate(JSQ, IDLE, P04, cfg)
        bern = simulate(BERN, IDLE, P04, cfg)
        bound = jsq_cost_bound(IDLE, P04).total.value
        assert jsq.mean_total_jobs <= bound + 3.0 * jsq.std_error
        assert jsq.mean_total_jobs < bern.mean_total_jobs

    def test_unstable_profile_detected(self):
        cfg = SimConfig(seed=7, horizon=30_000.0, replications=4)
        est = simulate(JSQ, StrategyProfile(a=1.0, p=1.0, d=0.0), P06, cfg)
        assert est.unstable_hint

    def test_defended_profile_not_flagged(self):
        cfg = SimConfig(seed=7, horizon=30_000.0, replications=4)
        est = simulate(JSQ, StrategyProfile(a=1.0, p=1.0, d=0.5), P06, cfg)
        assert not est.unstable_hint

    def test_bit_identical_reruns(self):
        cfg = SimConfig(seed=99, horizon=20_000.0, replications=5)
        first = simulate(BERN, StrategyProfile(a=0.7, p=0.3, d=0.2), P06, cfg)
        second = simulate(BERN, StrategyProfile(a=0.7, p=0.3, d=0.2), P06, cfg)
        assert first == second

    def test_replication_means_are_weakly_correlated(self):
        cfg = SimConfig(seed=3, horizon=50_000.0, replications=10)
        est = simulate(BERN, IDLE, P04, cfg)
        means = est.per_replication
        centre = sum(means) / len(means)
        dev = [m - centre for m in means]
        denom = sum(v * v for v in dev)
        rho = sum(a * b for a, b in zip(dev, dev[1:])) / denom
        assert abs(rho) < 0.2

    def test_doubling_horizon_converges(self):
        passes = 0
        for seed in (11, 12, 13):
            short = simulate(JSQ, IDLE, P06, SimConfig(seed=seed, horizon=40_000.0, replications=6))
            long = simulate(JSQ, IDLE, P06, SimConfig(seed=seed, horizon=80_000.0, replications=6))
            combined = math.hypot(short.std_error, long.std_error)
            if abs(long.mean_total_jobs - short.mean_total_jobs) < 2.0 * combined:
                passes += 1
        assert passes >= 2


class TestEventAccounting:
    def test_conservation(self):
        cfg = SimConfig(seed=3, horizon=5_000.0, replications=3)
        for result in replicate(BERN, StrategyProfile(a=0.6, p=0.8, d=0.3), P06, cfg):
            assert result.arrivals == result.misrouted + result.policy_routed
            assert result.departures <= result.arrivals
            assert result.x_final + result.y_final == result.arrivals - result.departures
            assert result.x_final >= 0 and result.y_final >= 0

    def test_no_attack_never_misroutes(self):
        cfg = SimConfig(seed=3, horizon=5_000.0, replications=2)
        for result in replicate(JSQ, IDLE, P04, cfg):
            assert result.misrouted == 0

    def test_full_undefended_attack_always_misroutes(self):
        cfg = SimConfig(seed=3, horizon=5_000.0, replications=2)
        for result in replicate(JSQ, StrategyProfile(a=1.0, p=1.0, d=0.0), P04, cfg):
            assert result.policy_routed == 0


class TestTrace:
    def test_rows_are_consistent_markov_steps(self):
        cfg = SimConfig(seed=8, horizon=500.0, replications=1)
        rows = list(iter_trace(BERN, StrategyProfile(a=0.5, p=1.0, d=0.2), P06, cfg))
        assert rows, "expected events on a 500-time-unit run"
        prev_t, prev_total = 0.0, 0
        for t, kind, x, y in rows:
            assert t >= prev_t
            assert kind in {"arr1", "arr2", "dep1", "dep2"}
            assert x >= 0 and y >= 0
            delta = (x + y) - prev_total
            assert delta == (1 if kind.startswith("arr") else -1)
            prev_t, prev_total = t, x + y

    def test_trace_does_not_change_estimate(self):
        cfg = SimConfig(seed=8, horizon=2_000.0, replications=2)
        profile = StrategyProfile(a=0.5, p=1.0, d=0.2)
        plain = simulate(BERN, profile, P06, cfg)
        sink = []
        traced = simulate(BERN, profile, P06, cfg, trace=lambda *row: sink.append(row))
        assert plain == traced
        assert sink


class TestSimulatedRisk:
    def test_idle_equilibrium_has_exactly_zero_queue_risk(self):
        eq = equilibrium(JSQ, P06, CostParams(c_a=1e6, c_d=50.0))
        out = simulate_risk(JSQ, P06, CostParams(c_a=1e6, c_d=50.0), eq,
                            SimConfig(seed=5, horizon=10_000.0, replications=3))
        assert out.queue_risk == 0.0
        assert out.security_risk == 0.0

    def test_bernoulli_risk_matches_analytic(self):
        costs = CostParams(c_a=1.0, c_d=110.0)
        eq = equilibrium(BERN, P06, costs)
        cfg = SimConfig(seed=12, horizon=200_000.0, replications=8)
        out = simulate_risk(BERN, P06, costs, eq, cfg)
        analytic = queue_risk(BERN, eq.a_star, eq.d_star, P06).value
        assert abs(out.queue_risk - analytic) <= 3.0 * out.queue_risk_err
        spend = P06.lam * costs.c_d * eq.d_star
        assert out.security_risk == pytest.approx(out.queue_risk + spend, abs=1e-12)
        assert out.security_risk_err == out.queue_risk_err


class TestReplicationParallelism:
    def test_process_pool_matches_serial(self, monkeypatch):
        cfg = SimConfig(seed=31, horizon=10_000.0, replications=4)
        profile = StrategyProfile(a=0.4, p=0.9, d=0.1)
        serial = simulate(BERN, profile, P06, cfg)
        monkeypatch.setenv("QSIEGE_THREADS", "2")
        parallel = simulate(BERN, profile, P06, cfg)
        assert serial == parallel
