import math

import numpy as np
import pytest

from rislink import (
    SchemeTag,
    SimulationPlan,
    build_los,
    design_proposed,
    instantaneous_snr,
    rice_gain_stats,
    rician_coefficients,
    sample_channel,
    simulate,
    substream,
    validate_gain_decomposition,
    validate_gain_distribution,
)
from rislink.errors import InvalidParameterError

from helpers import make_config

ALL = frozenset({SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR, SchemeTag.MAX_SNR})


def result_fingerprint(result):
    parts = []
    for tag in sorted(result.per_scheme, key=lambda t: t.value):
        emp = result.per_scheme[tag]
        parts.append(
            (
                tag.value,
                emp.outage.tobytes(),
                emp.outage_se.tobytes(),
                emp.capacity.hex(),
                emp.capacity_se.hex(),
                emp.n_nonconverged,
            )
        )
    return tuple(parts)


class TestSubstream:
    def test_reproducible(self):
        a = substream(9, 3).standard_normal(8)
        b = substream(9, 3).standard_normal(8)
        assert np.array_equal(a, b)

    def test_distinct_indices_decorrelated(self):
        a = substream(9, 0).standard_normal(8)
        b = substream(9, 1).standard_normal(8)
        assert not np.allclose(a, b)


class TestSimulationPlan:
    def test_rejects_empty_scheme_set(self):
        with pytest.raises(InvalidParameterError):
            SimulationPlan(n_samples=1, seed=0, beta_grid_db=(0.0,), scheme_set=frozenset())

    def test_rejects_unsorted_grid(self):
        with pytest.raises(InvalidParameterError):
            SimulationPlan(n_samples=1, seed=0, beta_grid_db=(1.0, 1.0), scheme_set=ALL)

    def test_rejects_nonpositive_samples(self):
        with pytest.raises(InvalidParameterError):
            SimulationPlan(n_samples=0, seed=0, beta_grid_db=(0.0,), scheme_set=ALL)

    def test_allows_empty_grid_for_capacity_runs(self):
        plan = SimulationPlan(n_samples=1, seed=0, beta_grid_db=(), scheme_set=ALL)
        assert plan.beta_grid_db == ()


class TestDeterminism:
    def test_single_sample_repeatable(self, default_config, default_los):
        plan = SimulationPlan(n_samples=1, seed=123, beta_grid_db=(0.0, 10.0), scheme_set=ALL)
        r1 = simulate(plan, default_config, default_los)
        r2 = simulate(plan, default_config, default_los)
        assert result_fingerprint(r1) == result_fingerprint(r2)

    def test_single_sample_worker_count_invariant(self, default_config, default_los):
        plan = SimulationPlan(n_samples=1, seed=123, beta_grid_db=(0.0,), scheme_set=ALL)
        serial = simulate(plan, default_config, default_los, workers=1)
        pooled = simulate(plan, default_config, default_los, workers=8)
        assert result_fingerprint(serial) == result_fingerprint(pooled)

    def test_multi_chunk_worker_count_invariant(self, default_config, default_los):
        plan = SimulationPlan(
            n_samples=10_000,
            seed=2024,
            beta_grid_db=(33.0, 35.0, 37.0),
            scheme_set=frozenset({SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR}),
        )
        serial = simulate(plan, default_config, default_los, workers=1)
        pooled = simulate(plan, default_config, default_los, workers=4)
        assert result_fingerprint(serial) == result_fingerprint(pooled)

    def test_engine_matches_single_sample_path(self, default_config, default_los):
        plan = SimulationPlan(
            n_samples=3, seed=5, beta_grid_db=(), scheme_set=frozenset({SchemeTag.PROPOSED})
        )
        result = simulate(plan, default_config, default_los)
        sol = design_proposed(default_config)
        kappa = rician_coefficients(default_config.k)
        caps = []
        for i in range(3):
            real = sample_channel(default_los, kappa, substream(5, i))
            caps.append(math.log2(1.0 + instantaneous_snr(sol.f, sol.psi, real, default_config)))
        assert result.per_scheme[SchemeTag.PROPOSED].capacity == pytest.approx(
            float(np.mean(caps)), rel=1e-15
        )


@pytest.fixture(scope="module")
def run(default_config, default_los):
    grid = tuple(np.arange(28.0, 43.0, 1.0))
    plan = SimulationPlan(n_samples=20_000, seed=20240, beta_grid_db=grid, scheme_set=ALL)
    return simulate(plan, default_config, default_los)


class TestEmpiricalBehavior:

    def test_outage_curves_nondecreasing(self, run):
        for emp in run.per_scheme.values():
            assert np.all(np.diff(emp.outage) >= 0.0)
            assert np.all((emp.outage >= 0.0) & (emp.outage <= 1.0))

    def test_standard_error_formula(self, run):
        emp = run.per_scheme[SchemeTag.PROPOSED]
        expected = np.sqrt(emp.outage * (1 - emp.outage) / run.n_samples)
        assert np.allclose(emp.outage_se, expected, rtol=0, atol=0)

    def test_capacity_ordering(self, run):
        prop = run.per_scheme[SchemeTag.PROPOSED]
        mm = run.per_scheme[SchemeTag.MAX_MEAN_SNR]
        ms = run.per_scheme[SchemeTag.MAX_SNR]
        err_pm = 2 * math.hypot(prop.capacity_se, mm.capacity_se)
        err_ms = 2 * math.hypot(mm.capacity_se, ms.capacity_se)
        assert ms.capacity >= mm.capacity - err_ms
        assert mm.capacity >= prop.capacity - err_pm

    def test_genie_outage_never_worse(self, run):
        ms = run.per_scheme[SchemeTag.MAX_SNR]
        for tag in (SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR):
            other = run.per_scheme[tag]
            slack = 2 * np.sqrt(ms.outage_se**2 + other.outage_se**2)
            assert np.all(ms.outage <= other.outage + slack)

    def test_analytical_outage_tracks_proposed(self, default_config, default_los, run):
        stats = rice_gain_stats(design_proposed(default_config), default_config, default_los)
        from rislink import outage_analytical

        emp = run.per_scheme[SchemeTag.PROPOSED]
        for j, beta_db in enumerate(run.beta_grid_db):
            ana = outage_analytical(10 ** (beta_db / 10), stats, default_config.gamma)
            assert abs(ana - emp.outage[j]) <= 0.012  # 20k samples; the 1e6 gate is in acceptance

    def test_all_samples_converged(self, run):
        assert run.per_scheme[SchemeTag.MAX_SNR].n_nonconverged == 0


class TestStrongLosLimit:
    def test_outage_is_a_step_at_the_deterministic_gain(self):
        config = make_config(k=1e12)
        los = build_los(config)
        stats = rice_gain_stats(design_proposed(config), config, los)
        step_db = 10 * math.log10(config.gamma * stats.nu**2)
        grid = tuple(np.arange(math.floor(step_db) - 3.0, math.ceil(step_db) + 3.0))
        plan = SimulationPlan(
            n_samples=300, seed=1, beta_grid_db=grid, scheme_set=frozenset({SchemeTag.PROPOSED})
        )
        result = simulate(plan, config, los)
        outage = result.per_scheme[SchemeTag.PROPOSED].outage
        grid_arr = np.asarray(grid)
        assert np.all(outage[grid_arr < step_db - 0.5] == 0.0)
        assert np.all(outage[grid_arr > step_db + 0.5] == 1.0)


class TestGainDistribution:
    def test_reference_scenario_passes(self, default_config, default_los):
        report = validate_gain_distribution(default_config, default_los, 20_000, seed=20240)
        assert not report.degenerate
        assert report.statistic < report.critical_value
        assert report.passed

    def test_indirect_only_fit_passes(self):
        config = make_config(mu=0.0)
        los = build_los(config)
        report = validate_gain_distribution(config, los, 20_000, seed=20240)
        assert not report.degenerate
        assert report.passed

    def test_scatter_free_branch_is_degenerate(self):
        config = make_config(k=1e30)
        los = build_los(config)
        report = validate_gain_distribution(config, los, 5_000, seed=7)
        assert report.degenerate
        assert report.passed
        assert "deterministic" in report.reason


class TestGainDecomposition:
    def test_reference_scenario_moments(self, default_config, default_los):
        report = validate_gain_decomposition(default_config, default_los, 30_000, seed=20240)
        assert report.passed
        by_name = {c.name: c for c in report.checks}
        assert by_name["var_scatter_tx_ris"].expected == default_config.n
        assert by_name["var_scatter_both"].expected == default_config.n
        assert by_name["var_scatter_direct"].expected == 1.0
        sol = design_proposed(default_config)
        e0f = abs(default_los.E[0] @ sol.f)
        assert by_name["var_scatter_ris_rx"].expected == pytest.approx(
            default_config.n * e0f**2, rel=1e-9
        )
        for check in report.checks:
            assert check.passed, check
