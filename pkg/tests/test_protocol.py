"""Tests of the sequential-measurement protocol and its asymptotics."""

import math

import numpy as np
import pytest

from forcebound import (
    OscillatorParams,
    ProtocolConfig,
    asymptotic_ratio,
    delta_f_infinity,
    diffusive_bound,
    figure2_curve,
    force_bound_physical,
    optimal_tau,
    potential_sensitivity,
    sensitivity_report,
    sequential_bound,
    sequential_ratio_squared,
)
from forcebound.protocol import config_bound_dimensionless

HBAR = 1.054571817e-34


def bisect_unit_optimum():
    """Independent oracle: at E_cal = 1 stationarity is exp(v) - 1 = 2v, u = 2v."""
    lo, hi = 0.5, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.exp(mid) - 1.0 - 2.0 * mid > 0:
            hi = mid
        else:
            lo = mid
    v = 0.5 * (lo + hi)
    return 2.0 * v, (1.0 + 2.0 * v) / math.sqrt(8.0 * v)


PARAMS = OscillatorParams(mass=1e-25, omega=2 * math.pi * 1e6, gamma=10.0, n_thermal=2.0)


class TestDeltaFInfinity:
    def test_zero_temperature_form(self):
        params = OscillatorParams(mass=1e-25, omega=2 * math.pi * 1e6, gamma=10.0, n_thermal=0.0)
        expected = math.sqrt(params.mass * HBAR * params.omega * params.gamma**2 / 2)
        assert delta_f_infinity(params) == pytest.approx(expected, rel=1e-12)

    def test_linear_in_gamma(self):
        doubled = OscillatorParams(mass=1e-25, omega=2 * math.pi * 1e6, gamma=20.0, n_thermal=2.0)
        assert delta_f_infinity(doubled) == pytest.approx(2 * delta_f_infinity(PARAMS), rel=1e-14)

    def test_si_recomputation(self):
        # dimensional-analysis oracle: plain arithmetic in SI units
        m, w, g = 1e-25, 2 * math.pi * 1e6, 10.0
        by_hand = (m * 1.054571817e-34 * w * g * g * 1.0 / 2.0) ** 0.5
        params = OscillatorParams(mass=m, omega=w, gamma=g, n_thermal=0.0)
        assert delta_f_infinity(params) == pytest.approx(by_hand, rel=1e-12)

    def test_requires_damping(self):
        undamped = OscillatorParams(mass=1.0, omega=1.0, gamma=0.0)
        with pytest.raises(ValueError):
            delta_f_infinity(undamped)


class TestSequentialBound:
    def test_long_probing_limit(self):
        # gamma*tau >> 1: bound -> delta_f_infinity / sqrt(nu)
        config = ProtocolConfig(t_total=10.0, tau=5.0, calibration_energy=3.0, params=PARAMS)
        assert sequential_bound(config) == pytest.approx(delta_f_infinity(PARAMS) / math.sqrt(2.0), rel=1e-14)

    def test_unit_calibration_collapse(self):
        # E_cal = 1: the numerator collapses to 1
        config = ProtocolConfig(t_total=1.0, tau=0.05, calibration_energy=1.0, params=PARAMS)
        u = PARAMS.gamma * config.tau
        expected = delta_f_infinity(PARAMS) * math.sqrt(1.0 / (config.nu * (-math.expm1(-0.5 * u)) ** 2))
        assert sequential_bound(config) == pytest.approx(expected, rel=1e-14)

    def test_ratio_identity(self):
        # ratio^2(u) = (u/4)(1 - (1 - 1/E) e^-u) / (1 - e^{-u/2})^2, rebuilt
        # here from the delta_f_infinity / delta_f_min definitions
        for u in (0.1, 1.0, 10.0):
            for cal in (0.3, 1.0, 50.0):
                tau = u / PARAMS.gamma
                t_total = 40.0 * tau
                config = ProtocolConfig(t_total=t_total, tau=tau, calibration_energy=cal, params=PARAMS)
                ratio_sq = (sequential_bound(config) / potential_sensitivity(PARAMS, t_total)) ** 2
                by_hand = (u / 4.0) * (1 - (1 - 1 / cal) * math.exp(-u)) / (1 - math.exp(-u / 2)) ** 2
                assert ratio_sq == pytest.approx(by_hand, rel=1e-12)
                assert sequential_ratio_squared(u, cal) == pytest.approx(by_hand, rel=1e-12)

    def test_explicit_nu_override(self):
        config = ProtocolConfig(t_total=1.0, tau=0.03, calibration_energy=2.0, params=PARAMS)
        floored = sequential_bound(config, nu=float(config.nu_floor))
        assert floored >= sequential_bound(config)

    def test_tau_longer_than_total_rejected(self):
        with pytest.raises(ValueError):
            ProtocolConfig(t_total=1.0, tau=2.0, calibration_energy=1.0, params=PARAMS)

    def test_cross_module_identity(self):
        # Eq.-level identity: the sequential form equals the per-interval
        # bound under the calibration-energy <-> variance mapping
        for tau in (0.01, 0.1, 0.35):
            for var_x0 in (0.05, 0.5, 5.0):
                cal = 2.0 * var_x0 * PARAMS.coth_factor
                config = ProtocolConfig(t_total=1.0, tau=tau, calibration_energy=cal, params=PARAMS)
                assert sequential_bound(config) == pytest.approx(config_bound_dimensionless(config), rel=1e-12)

    def test_matches_force_bound_physical_for_squeezed_probe(self):
        # when var_x0 >= 1/2 the mapping inverts to an energy E >= 1/2
        var_x0 = 5.0
        energy = 0.5 * (var_x0 + 0.25 / var_x0)
        cal = 2.0 * var_x0 * PARAMS.coth_factor
        for tau in (0.02, 0.2):
            config = ProtocolConfig(t_total=1.0, tau=tau, calibration_energy=cal, params=PARAMS)
            physical = force_bound_physical(PARAMS, energy, nu=config.nu, t=tau)
            assert sequential_bound(config) == pytest.approx(physical, rel=1e-12)


class TestOptimalTau:
    def test_unit_calibration_against_bisection(self):
        u_expected, ratio_expected = bisect_unit_optimum()
        tau_opt, ratio = optimal_tau(1.0, 1.0)
        assert tau_opt == pytest.approx(u_expected, abs=1e-3)
        assert tau_opt == pytest.approx(2.5128, abs=1e-3)
        assert ratio == pytest.approx(ratio_expected, abs=5e-4)
        assert ratio == pytest.approx(1.108, abs=5e-3)

    def test_gamma_scaling(self):
        tau_unit, ratio_unit = optimal_tau(7.0, 1.0)
        tau_scaled, ratio_scaled = optimal_tau(7.0, 25.0)
        assert tau_scaled == pytest.approx(tau_unit / 25.0, rel=1e-9)
        assert ratio_scaled == pytest.approx(ratio_unit, rel=1e-12)

    def test_large_calibration_power_law(self):
        tau_opt, _ = optimal_tau(2.4e7, 1.0)
        assert tau_opt == pytest.approx(0.01, rel=0.01)

    def test_ratio_approaches_one(self):
        ratios = [optimal_tau(cal, 1.0)[1] for cal in (1e2, 1e4, 1e6, 1e8)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert all(r >= 1.0 for r in ratios)
        assert ratios[-1] == pytest.approx(1.0, abs=1e-4)

    def test_small_calibration_converges(self):
        tau_opt, ratio = optimal_tau(0.01, 1.0)
        assert ratio >= 1.0
        grid = np.geomspace(1e-4, 100.0, 20000)
        dense = min(math.sqrt(sequential_ratio_squared(u, 0.01)) for u in grid)
        assert ratio <= dense + 1e-9


class TestPotentialSensitivity:
    def test_quadrupling_time_halves(self):
        assert potential_sensitivity(PARAMS, 4.0) == pytest.approx(potential_sensitivity(PARAMS, 1.0) / 2, rel=1e-14)

    def test_zero_temperature_form(self):
        params = OscillatorParams(mass=1e-25, omega=2 * math.pi * 1e6, gamma=10.0, n_thermal=0.0)
        expected = math.sqrt(2 * params.mass * HBAR * params.omega * params.gamma / 1.0)
        assert potential_sensitivity(params, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_ratio_to_floor(self):
        # delta_f_infinity / delta_f_min = sqrt(gamma t_total / 4)
        for g_t in (1.0, 100.0):
            t_total = g_t / PARAMS.gamma
            lhs = delta_f_infinity(PARAMS) / potential_sensitivity(PARAMS, t_total)
            assert lhs == pytest.approx(math.sqrt(g_t / 4.0), rel=1e-12)


class TestAsymptoticRatio:
    def test_limit(self):
        assert asymptotic_ratio(1e30) == pytest.approx(1.0, abs=1e-12)

    def test_evaluation_outside_validity(self):
        assert asymptotic_ratio(3.0) == pytest.approx(1.125, rel=1e-14)

    def test_residual_order(self):
        # residual * E_cal stays bounded over [1e3, 1e6]
        for cal in np.geomspace(1e3, 1e6, 8):
            _, exact = optimal_tau(float(cal), 1.0)
            residual = exact - asymptotic_ratio(float(cal))
            assert abs(residual) * cal < 1.0

    def test_optimal_time_power_law_constant(self):
        tau_opt, _ = optimal_tau(1e6, 1.0)
        assert abs(tau_opt * (1e6 / 24.0) ** (1.0 / 3.0) - 1.0) < 0.05


class TestFigure2Curve:
    def test_unit_point(self):
        [(cal, gamma_tau, ratio)] = figure2_curve([1.0])
        assert cal == 1.0
        assert ratio == pytest.approx(1.108, abs=5e-3)
        assert gamma_tau == pytest.approx(2.5128, abs=1e-3)

    def test_monotone_nonincreasing(self):
        grid = list(np.geomspace(0.5, 1e6, 40))
        curve = figure2_curve(grid)
        ratios = [row[2] for row in curve]
        assert all(a >= b - 1e-12 for a, b in zip(ratios, ratios[1:]))
        assert [row[0] for row in curve] == grid

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            figure2_curve([])


class TestDiffusiveBound:
    def test_heuristic_factor_dominates(self):
        mass, omega, diff, t_total = 1e-25, 2 * math.pi * 1e6, 100.0, 10.0
        heuristic = math.sqrt(4 * mass * HBAR * omega * diff / t_total)
        value = diffusive_bound(mass, omega, diff, var_x0=1.0, t_total=t_total)
        assert value == pytest.approx(heuristic, rel=1e-3)

    def test_sqrt2_at_unit_product(self):
        mass, omega = 1e-25, 2 * math.pi * 1e6
        diff, var_x0, t_total = 2.5, 1.0, 0.1  # 4 D v t = 1
        heuristic = math.sqrt(4 * mass * HBAR * omega * diff / t_total)
        assert diffusive_bound(mass, omega, diff, var_x0, t_total) == pytest.approx(heuristic * math.sqrt(2), rel=1e-12)

    def test_matches_sequential_limit(self):
        # gamma -> 0, n_T -> inf, gamma n_T = Diff, tau = t_total
        mass, omega = 1e-25, 2 * math.pi * 1e6
        gamma = 1e-6
        for diff, t_total, var_x0 in ((0.025, 1.0, 1.0), (2.5, 0.1, 1.0), (250.0, 0.1, 1.0)):
            n_t = diff / gamma
            params = OscillatorParams(mass=mass, omega=omega, gamma=gamma, n_thermal=n_t)
            cal = 2.0 * var_x0 * params.coth_factor
            config = ProtocolConfig(t_total=t_total, tau=t_total, calibration_energy=cal, params=params)
            closed = diffusive_bound(mass, omega, diff, var_x0, t_total)
            assert sequential_bound(config) == pytest.approx(closed, rel=1e-3)

    def test_monotone_decreasing(self):
        mass, omega = 1e-25, 2 * math.pi * 1e6
        times = [0.1, 1.0, 10.0]
        values_t = [diffusive_bound(mass, omega, 1.0, 0.5, t) for t in times]
        assert all(a > b for a, b in zip(values_t, values_t[1:]))
        variances = [0.1, 1.0, 10.0]
        values_v = [diffusive_bound(mass, omega, 1.0, v, 1.0) for v in variances]
        assert all(a > b for a, b in zip(values_v, values_v[1:]))


class TestSensitivityReport:
    def test_fields_consistent(self):
        config = ProtocolConfig(t_total=1.0, tau=0.05, calibration_energy=20.0, params=PARAMS)
        report = sensitivity_report(config)
        assert report.ratio_to_potential >= 1.0
        assert report.delta_f_bound == pytest.approx(report.ratio_to_potential * report.delta_f_min, rel=1e-14)
        assert report.delta_f_infinity == pytest.approx(delta_f_infinity(PARAMS), rel=1e-14)
        # the optimized bound beats or matches any explicitly configured tau
        tau_grid = np.geomspace(1e-3, 0.9, 50)
        for tau in tau_grid:
            trial = ProtocolConfig(t_total=1.0, tau=float(tau), calibration_energy=20.0, params=PARAMS)
            assert report.delta_f_bound <= sequential_bound(trial) * (1 + 1e-9)
