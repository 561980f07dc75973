import math
import random

import pytest

from qsiege import (
    CostGrid,
    CostParams,
    Regime,
    RoutingPolicy,
    SimConfig,
    SurfaceGrid,
    SystemParams,
    compare_policies,
    equilibrium,
    queue_risk,
    regime_map,
    risk_surface,
    security_risk,
)

P04 = SystemParams(lam=0.4, mu=0.5)
P06 = SystemParams(lam=0.6, mu=0.5)
JSQ = RoutingPolicy.SHORTER_QUEUE
BERN = RoutingPolicy.BERNOULLI
FAST_SIM = SimConfig(seed=5, horizon=20_000.0, replications=4)


class TestSecurityRisk:
    def test_baseline_is_zero(self):
        for policy in RoutingPolicy:
            out = security_risk(policy, 0.0, 0.0, P04, CostParams(c_a=1.0, c_d=20.0))
            assert out.value == 0.0

    def test_full_attack_jsq(self):
        # u_d(0,0) = 2 - 1/0.3 and u_d(1,0) = 2 - 1/0.1 with no defense spend
        out = security_risk(JSQ, 1.0, 0.0, P04, CostParams(c_a=1.0, c_d=20.0))
        assert out.value == pytest.approx((2.0 - 1.0 / 0.3) - (-8.0), rel=1e-12)
        assert out.value == pytest.approx(6.0 + 2.0 / 3.0, rel=1e-9)

    def test_unstable_point_is_infinite(self):
        assert security_risk(JSQ, 1.0, 0.0, P06, CostParams(c_a=1.0, c_d=20.0)).is_pos_inf

    def test_non_negative_on_stable_grid(self):
        costs = CostParams(c_a=2.0, c_d=50.0)
        for policy in RoutingPolicy:
            for pt in risk_surface(policy, P06, costs, SurfaceGrid(21)):
                if pt.risk.is_finite:
                    assert pt.risk.value >= -1e-12


class TestQueueRisk:
    def test_baseline_is_zero(self):
        for policy in RoutingPolicy:
            assert queue_risk(policy, 0.0, 0.0, P04).value == 0.0

    def test_bernoulli_full_attack(self):
        out = queue_risk(BERN, 1.0, 0.0, P04)
        assert out.value == pytest.approx(4.0 - 0.4 / 0.3, rel=1e-12)

    def test_identity_with_security_risk(self):
        costs = CostParams(c_a=1.0, c_d=20.0)
        for policy in RoutingPolicy:
            for params in (P04, P06):
                for a in (0.0, 0.25, 0.5, 1.0):
                    for d in (0.0, 0.3, 0.8, 1.0):
                        rs = security_risk(policy, a, d, params, costs)
                        rq = queue_risk(policy, a, d, params)
                        if rs.is_finite:
                            spend = params.lam * costs.c_d * d
                            assert rs.value - rq.value == pytest.approx(spend, abs=1e-12)
                        else:
                            assert rq.is_pos_inf


class TestRiskSurface:
    def test_light_load_all_finite_with_defense_dominated_max(self):
        costs = CostParams(c_a=1.0, c_d=20.0)
        cells = risk_surface(JSQ, P04, costs, SurfaceGrid(101))
        assert len(cells) == 101 * 101
        assert all(pt.risk.is_finite for pt in cells)
        top = max(cells, key=lambda pt: pt.risk.value)
        # defense spend dominates at light load: the ridge sits on d = 1
        assert top.d == 1.0
        assert top.risk.value == pytest.approx(P04.lam * costs.c_d, rel=1e-12)

    def test_congested_load_infinite_exactly_on_unstable_cells(self):
        cells = risk_surface(JSQ, P06, CostParams(c_a=1.0, c_d=20.0), SurfaceGrid(101))
        threshold = P06.mu / P06.lam
        for pt in cells:
            assert pt.risk.is_pos_inf == (pt.a * (1.0 - pt.d) >= threshold - 1e-15)

    def test_tiny_grid(self):
        cells = risk_surface(JSQ, P04, CostParams(c_a=1.0, c_d=20.0), SurfaceGrid(2))
        assert len(cells) == 4
        assert [(pt.a, pt.d) for pt in cells] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert cells[0].risk.value == 0.0

    def test_row_major_ordering(self):
        cells = risk_surface(BERN, P04, CostParams(c_a=1.0, c_d=5.0), SurfaceGrid(3))
        assert [(pt.a, pt.d) for pt in cells] == [
            (0.0, 0.0), (0.0, 0.5), (0.0, 1.0),
            (0.5, 0.0), (0.5, 0.5), (0.5, 1.0),
            (1.0, 0.0), (1.0, 0.5), (1.0, 1.0),
        ]

    def test_resolution_must_be_at_least_two(self):
        with pytest.raises(Exception):
            SurfaceGrid(1)


class TestRegimeMap:
    def test_no_b1_when_congested(self):
        cells = regime_map(JSQ, P06, CostGrid(ca_max=5.0, cd_max=200.0, resolution=41))
        assert len(cells) == 41 * 41
        assert all(c.regime is not Regime.B1 for c in cells)

    def test_all_regimes_at_light_load(self):
        cells = regime_map(JSQ, P04, CostGrid(ca_max=5.0, cd_max=200.0, resolution=41))
        regimes = {c.regime for c in cells}
        assert regimes == {Regime.A, Regime.B1, Regime.B2}

    def test_grid_excludes_zero_costs(self):
        grid = CostGrid(ca_max=5.0, cd_max=200.0, resolution=10)
        assert min(grid.ca_axis()) > 0.0
        assert max(grid.ca_axis()) == 5.0
        assert min(grid.cd_axis()) > 0.0
        assert max(grid.cd_axis()) == 200.0

    def test_cells_reproduce_equilibrium(self):
        cells = regime_map(BERN, P06, CostGrid(ca_max=4.0, cd_max=120.0, resolution=7))
        for cell in random.Random(61).sample(cells, 12):
            eq = equilibrium(BERN, P06, CostParams(c_a=cell.c_a, c_d=cell.c_d))
            assert eq.regime is cell.regime
            assert eq.a_star == cell.a_star
            assert eq.d_star == cell.d_star

    def test_attack_cost_threshold_structure(self):
        # for fixed c_d, once c_a is high enough to deter, higher c_a stays deterred
        cells = regime_map(JSQ, P04, CostGrid(ca_max=30.0, cd_max=150.0, resolution=31))
        by_cd = {}
        for cell in cells:
            by_cd.setdefault(cell.c_d, []).append(cell)
        for row in by_cd.values():
            row.sort(key=lambda cell: cell.c_a)
            seen_a = False
            for cell in row:
                if cell.regime is Regime.A:
                    seen_a = True
                else:
                    assert not seen_a, "attack regime above the deterrence threshold"


class TestComparePolicies:
    def test_prohibitive_attack_cost_gives_zero_risks(self):
        report = compare_policies(P06, CostParams(c_a=1e6, c_d=50.0), FAST_SIM)
        for side in (report.jsq, report.bernoulli):
            assert side.equilibrium.regime is Regime.A
            assert side.queue_risk.value == 0.0
            assert side.security_risk.value == 0.0
            assert side.simulated.queue_risk == 0.0
            assert side.simulated.security_risk == 0.0
        assert report.reduction is None

    def test_light_load_jsq_riskier_analytically(self):
        report = compare_policies(P04, CostParams(c_a=1.0, c_d=20.0), FAST_SIM)
        assert report.jsq.security_risk.value > report.bernoulli.security_risk.value

    def test_identity_between_risks_at_equilibrium(self):
        report = compare_policies(P06, CostParams(c_a=1.0, c_d=110.0), FAST_SIM)
        for side in (report.jsq, report.bernoulli):
            eq = side.equilibrium
            spend = P06.lam * 110.0 * eq.d_star
            assert side.security_risk.value - side.queue_risk.value == pytest.approx(
                spend, abs=1e-12
            )
            assert side.simulated.security_risk - side.simulated.queue_risk == pytest.approx(
                spend, abs=1e-12
            )

    def test_deterministic(self):
        a = compare_policies(P06, CostParams(c_a=1.0, c_d=110.0), FAST_SIM)
        b = compare_policies(P06, CostParams(c_a=1.0, c_d=110.0), FAST_SIM)
        assert a.jsq.simulated == b.jsq.simulated
        assert a.bernoulli.simulated == b.bernoulli.simulated
        assert a.reduction == b.reduction


class TestSweepParallelism:
    def test_process_pool_matches_serial(self, monkeypatch):
        costs = CostParams(c_a=1.0, c_d=20.0)
        serial_surface = risk_surface(JSQ, P06, costs, SurfaceGrid(11))
        serial_map = regime_map(BERN, P04, CostGrid(ca_max=3.0, cd_max=90.0, resolution=9))
        monkeypatch.setenv("QSIEGE_THREADS", "2")
        assert risk_surface(JSQ, P06, costs, SurfaceGrid(11)) == serial_surface
        assert regime_map(BERN, P04, CostGrid(ca_max=3.0, cd_max=90.0, resolution=9)) == serial_map

    def test_invalid_env_value_falls_back_to_serial(self, monkeypatch):
        monkeypatch.setenv("QSIEGE_THREADS", "not-a-number")
        cells = risk_surface(JSQ, P04, CostParams(c_a=1.0, c_d=5.0), SurfaceGrid(3))
        assert len(cells) == 9
