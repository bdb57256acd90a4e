"""Oracle-vs-closed-form identity suite behind the ``validate`` subcommand.

Each check pits an independent numerical route (grid quadrature, moment-ODE
integration, dense gauge scans, the purification dilation) against the
corresponding closed form. All randomness is internally seeded, so a fresh
checkout either passes everything or fails deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds
from .gaussian import (
    ChannelDescriptor,
    GaussianState,
    OscillatorParams,
    evolve_forced,
    partial_trace,
    purified_evolution,
    thermal_loss_channel,
)
from .montecarlo import fisher_grid_oracle, moment_ode_oracle
from .protocol import ProtocolConfig, config_bound_dimensionless, optimal_tau, sequential_bound

__all__ = ["CheckResult", "run_all", "CHECK_NAMES"]

ETA_GRID = (0.1, 0.3, 0.6, 0.9, 0.99)
NT_GRID = (0.0, 0.5, 2.0, 10.0)
VARX_GRID = (0.05, 0.2, 0.5, 1.0, 5.0, 50.0)

CHECK_NAMES = (
    "attainability_identity",
    "gauge_bound_zero_temperature",
    "gauge_bound_thermal",
    "purification_equivalence",
    "channel_semigroup",
    "oracle_fisher_grid",
    "oracle_moment_ode",
    "sequential_cross_module",
    "optimal_time_oracle",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_pure_probe(rng: np.random.Generator) -> GaussianState:
    """Random displaced, rotated, squeezed single-mode pure state."""
    r = rng.uniform(-1.2, 1.2)
    phi = rng.uniform(0.0, math.pi)
    c, s = math.cos(phi), math.sin(phi)
    rot = np.array([[c, s], [-s, c]])
    cov = rot @ np.diag([0.5 * math.exp(2 * r), 0.5 * math.exp(-2 * r)]) @ rot.T
    mean = rng.uniform(-2.0, 2.0, size=2)
    return GaussianState(mean, 0.5 * (cov + cov.T))


def check_attainability_identity() -> CheckResult:
    """Minimized extended QFI == momentum-measurement Fisher information.

    The two sides take independent routes to D: the closed form uses
    bounds.attenuation_d while the Fisher side uses the channel descriptor.
    """
    worst = 0.0
    for eta in ETA_GRID:
        t = -math.log(eta)
        channel = ChannelDescriptor.from_rates(1.0, 1.0, 0.0, t)
        for n_t in NT_GRID:
            for var_x0 in VARX_GRID:
                qfi = bounds.qfi_min(eta, n_t, var_x0, omega=1.0, gamma=1.0, t=t)
                inputs = bounds.BoundInputs(eta=eta, n_thermal=n_t, var_x0=var_x0, omega=1.0, gamma=1.0)
                fisher = bounds.classical_fisher_momentum_min_uncertainty(inputs, channel.d_factor)
                worst = max(worst, abs(qfi - fisher) / fisher)
    return CheckResult("attainability_identity", worst < 1e-12, f"max relative error {worst:.3e}")


def check_gauge_bound_zero_temperature(seed: int = 20240801) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for eta in ETA_GRID:
        t = -math.log(eta)
        d = bounds.attenuation_d(1.0, 1.0, t)
        for var_x0 in VARX_GRID:
            g_opt = bounds.g_opt_zero_t(eta, d, var_x0, 0.5)
            minimum = bounds.extended_qfi_zero_t(bounds.GaugeParams(g=g_opt), eta, d, var_x0, 0.5)
            for g in rng.uniform(-5.0, 5.0, size=200):
                value = bounds.extended_qfi_zero_t(bounds.GaugeParams(g=float(g)), eta, d, var_x0, 0.5)
                worst = min(worst, value - minimum)
    return CheckResult("gauge_bound_zero_temperature", worst >= -1e-9, f"min slack {worst:.3e}")


def check_gauge_bound_thermal(seed: int = 20240802) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for eta in ETA_GRID:
        t = -math.log(eta)
        for n_t in NT_GRID:
            channel = ChannelDescriptor.from_rates(1.0, 1.0, n_t, t)
            d = channel.d_factor
            for var_x0 in VARX_GRID:
                gauge_opt = bounds.lambda_opt_thermal(channel, var_x0, 0.5, 0.5)
                minimum = bounds.extended_qfi_thermal(gauge_opt, channel, d, var_x0, 0.5, 0.5)
                lam = rng.uniform(-5.0, 5.0, size=(200, 2))
                for l1, l2 in lam:
                    gauge = bounds.GaugeParams(lambda1=float(l1), lambda2=float(l2))
                    value = bounds.extended_qfi_thermal(gauge, channel, d, var_x0, 0.5, 0.5)
                    worst = min(worst, value - minimum)
    return CheckResult("gauge_bound_thermal", worst >= -1e-9, f"min slack {worst:.3e}")


def check_purification_equivalence(seed: int = 20240803, n_probes: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_moment = 0.0
    worst_purity = 0.0
    probes = [_random_pure_probe(rng) for _ in range(n_probes)]
    for eta in ETA_GRID:
        t = -math.log(eta)
        for n_t in NT_GRID:
            params = OscillatorParams(mass=1.0, omega=1.0, gamma=1.0, n_thermal=n_t, force_dimensionless=0.7)
            for probe in probes:
                dilated = purified_evolution(probe, params, t)
                reduced = partial_trace(dilated, [0])
                direct = evolve_forced(probe, params, t)
                worst_moment = max(
                    worst_moment,
                    float(np.max(np.abs(reduced.mean - direct.mean))),
                    float(np.max(np.abs(reduced.cov - direct.cov))),
                )
                worst_purity = max(worst_purity, abs(dilated.purity_det() - 1.0))
    passed = worst_moment < 1e-12 and worst_purity < 1e-9
    return CheckResult(
        "purification_equivalence",
        passed,
        f"max moment error {worst_moment:.3e}, max |det(2C)-1| {worst_purity:.3e}",
    )


def check_channel_semigroup(seed: int = 20240804) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(40):
        probe = _random_pure_probe(rng)
        eta1, eta2 = rng.uniform(0.05, 1.0, size=2)
        n_t = rng.uniform(0.0, 8.0)
        two_step = thermal_loss_channel(thermal_loss_channel(probe, 0, eta2, n_t), 0, eta1, n_t)
        one_step = thermal_loss_channel(probe, 0, eta1 * eta2, n_t)
        worst = max(
            worst,
            float(np.max(np.abs(two_step.mean - one_step.mean))),
            float(np.max(np.abs(two_step.cov - one_step.cov))),
        )
    return CheckResult("channel_semigroup", worst < 1e-12, f"max moment error {worst:.3e}")


def check_oracle_fisher_grid() -> CheckResult:
    """Grid quadrature of the Fisher integral vs the closed form.

    The quadrature route goes through the moment-level channel, so it is
    sensitive to any perturbation of the closed-form D(eta).
    """
    worst = 0.0
    cases = [
        (0.5, 0.0, 0.5, 0.0),
        (0.5, 2.0, 2.0, 0.3),
        (0.9, 0.5, 0.05, -0.4),
        (0.2, 10.0, 5.0, 1.0),
    ]
    for eta, n_t, var_x0, force in cases:
        t = -math.log(eta)
        params = OscillatorParams(mass=1.0, omega=1.0, gamma=1.0, n_thermal=n_t, force_dimensionless=force)
        probe = GaussianState(np.zeros(2), np.diag([var_x0, 0.25 / var_x0]))
        numeric = fisher_grid_oracle(params, probe, t)
        inputs = bounds.BoundInputs(eta=eta, n_thermal=n_t, var_x0=var_x0, omega=1.0, gamma=1.0)
        closed = bounds.classical_fisher_momentum_min_uncertainty(inputs, bounds.attenuation_d(1.0, 1.0, t))
        worst = max(worst, abs(numeric - closed) / closed)
    return CheckResult("oracle_fisher_grid", worst < 1e-6, f"max relative error {worst:.3e}")


def check_oracle_moment_ode() -> CheckResult:
    worst = 0.0
    cases = [
        (0.5, 2.0, 5.0, 1.0),
        (0.9, 0.0, 0.5, 0.0),
        (0.1, 4.0, 1.5, -0.8),
    ]
    for eta, n_t, var0, force in cases:
        t = -math.log(eta)
        params = OscillatorParams(mass=1.0, omega=1.0, gamma=1.0, n_thermal=n_t, force_dimensionless=force)
        probe = GaussianState(np.array([0.3, -0.2]), np.diag([var0, var0]))
        ode_mean, ode_cov = moment_ode_oracle(params, probe.mean, probe.cov, t)
        direct = evolve_forced(probe, params, t)
        scale = max(1.0, float(np.max(np.abs(direct.cov))), float(np.max(np.abs(direct.mean))))
        worst = max(
            worst,
            float(np.max(np.abs(ode_mean - direct.mean))) / scale,
            float(np.max(np.abs(ode_cov - direct.cov))) / scale,
        )
    return CheckResult("oracle_moment_ode", worst < 1e-10, f"max relative error {worst:.3e}")


def check_sequential_cross_module() -> CheckResult:
    worst = 0.0
    params = OscillatorParams(mass=1e-25, omega=2 * math.pi * 1e6, gamma=10.0, n_thermal=2.0)
    for tau in (0.01, 0.1, 0.35):
        for var_x0 in (0.05, 0.5, 5.0):
            cal = 2.0 * var_x0 * params.coth_factor
            config = ProtocolConfig(t_total=1.0, tau=tau, calibration_energy=cal, params=params)
            lhs = sequential_bound(config)
            rhs = config_bound_dimensionless(config)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return CheckResult("sequential_cross_module", worst < 1e-12, f"max relative error {worst:.3e}")


def check_optimal_time_oracle() -> CheckResult:
    # E_cal = 1: stationarity reduces to exp(v) - 1 = 2v with gamma*tau = 2v.
    lo, hi = 0.5, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.exp(mid) - 1.0 - 2.0 * mid > 0:
            hi = mid
        else:
            lo = mid
    v = 0.5 * (lo + hi)
    u_expected = 2.0 * v
    ratio_expected = (1.0 + 2.0 * v) / math.sqrt(8.0 * v)
    tau_opt, ratio = optimal_tau(1.0, 1.0)
    ok_unit = abs(tau_opt - u_expected) < 1e-3 and abs(ratio - ratio_expected) < 5e-3
    tau_hi, _ = optimal_tau(1e6, 1.0)
    ok_asym = abs(tau_hi * (1e6 / 24.0) ** (1.0 / 3.0) - 1.0) < 0.05
    passed = ok_unit and ok_asym
    return CheckResult(
        "optimal_time_oracle",
        passed,
        f"gamma*tau_opt(1)={tau_opt:.6f} vs {u_expected:.6f}, ratio {ratio:.6f} vs {ratio_expected:.6f}",
    )


def run_all() -> list[CheckResult]:
    """Run every identity check in a fixed order."""
    return [
        check_attainability_identity(),
        check_gauge_bound_zero_temperature(),
        check_gauge_bound_thermal(),
        check_purification_equivalence(),
        check_channel_semigroup(),
        check_oracle_fisher_grid(),
        check_oracle_moment_ode(),
        check_sequential_cross_module(),
        check_optimal_time_oracle(),
    ]
