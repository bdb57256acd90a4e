"""Sequential-measurement strategy: probing-time optimization and asymptotics.

The protocol probes for tau, measures momentum, resets, and repeats
nu = t_total / tau times. Everything here reduces to the dimensionless
ratio of the resulting bound to the thermal-noise floor ("potential
sensitivity"), which depends only on gamma*tau and the calibration
energy  E_cal = 2 var(X)_0 (2 n_T + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import backend
from .bounds import BoundInputs, attenuation_d, force_bound_dimensionless, is_no_information
from .gaussian import HBAR, OscillatorParams

__all__ = [
    "BracketError",
    "ProtocolConfig",
    "SensitivityReport",
    "asymptotic_ratio",
    "config_bound_dimensionless",
    "delta_f_infinity",
    "diffusive_bound",
    "figure2_curve",
    "optimal_tau",
    "potential_sensitivity",
    "sensitivity_report",
    "sequential_bound",
    "sequential_ratio_squared",
]

_LOG_BRACKET = (-12.0, 6.0)  # search window for log(gamma * tau)
_SCAN_POINTS = 241
_XATOL_LOG = 1e-11  # absolute tolerance on log(gamma*tau) == relative on gamma*tau


class BracketError(RuntimeError):
    """The probing-time optimizer could not certify an interior minimum."""


@dataclass(frozen=True)
class ProtocolConfig:
    """One sequential-measurement configuration.

    calibration_energy is E_cal = 2 var(X)_0 (2 n_T + 1); values below 1
    (position-squeezed probes) are legal.
    """

    t_total: float
    tau: float
    calibration_energy: float
    params: OscillatorParams

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.t_total < self.tau:
            raise ValueError("tau must not exceed t_total")
        if not self.calibration_energy > 0:
            raise ValueError("calibration_energy must be positive")

    @property
    def nu(self) -> float:
        """Continuous repetition count t_total / tau."""
        return self.t_total / self.tau

    @property
    def nu_floor(self) -> int:
        return int(math.floor(self.nu))

    @property
    def var_x0(self) -> float:
        """Initial position variance implied by the calibration energy."""
        return self.calibration_energy / (2.0 * (2.0 * self.params.n_thermal + 1.0))


@dataclass(frozen=True)
class SensitivityReport:
    """Sensitivities of the optimized protocol, all in newtons."""

    delta_f_bound: float
    delta_f_infinity: float
    delta_f_min: float
    tau_opt: float
    ratio_to_potential: float

    def __post_init__(self):
        if self.ratio_to_potential < 1.0 - 1e-9:
            raise ValueError("bound cannot undercut the potential sensitivity")


def delta_f_infinity(params: OscillatorParams) -> float:
    """Single-measurement sensitivity floor sqrt(m hbar omega gamma^2 (2 n_T + 1) / 2).

    Set by the steady state of the damped probe; requires gamma > 0.
    """
    if not params.gamma > 0:
        raise ValueError("gamma must be positive: no steady state without damping")
    return math.sqrt(params.mass * params.hbar * params.omega * params.gamma**2 * params.coth_factor / 2.0)


def potential_sensitivity(params: OscillatorParams, t_total: float) -> float:
    """Thermal-fluctuation force floor sqrt(2 m hbar omega gamma (2 n_T + 1) / t_total)."""
    if not t_total > 0:
        raise ValueError("t_total must be positive")
    if not params.gamma > 0:
        raise ValueError("gamma must be positive")
    return math.sqrt(2.0 * params.mass * params.hbar * params.omega * params.gamma * params.coth_factor / t_total)


def sequential_ratio_squared(gamma_tau: float, calibration_energy: float) -> float:
    """(bound / potential sensitivity)^2 as a function of u = gamma * tau.

    ratio^2(u) = (u/4) * (1 - (1 - 1/E_cal) e^-u) / (1 - e^(-u/2))^2.
    Evaluated via expm1 so small u stay accurate.
    """
    if not gamma_tau > 0:
        raise ValueError("gamma_tau must be positive")
    if not calibration_energy > 0:
        raise ValueError("calibration_energy must be positive")
    numerator = -math.expm1(-gamma_tau) + math.exp(-gamma_tau) / calibration_energy
    denominator = math.expm1(-0.5 * gamma_tau) ** 2
    return 0.25 * gamma_tau * numerator / denominator


def sequential_bound(config: ProtocolConfig, nu: float | None = None) -> float:
    """Force-uncertainty bound of the sequential protocol, in newtons.

    delta_f >= delta_f_inf * sqrt[(1 - (1 - 1/E_cal) e^{-g tau}) / (nu (1 - e^{-g tau/2})^2)]
    with nu = t_total / tau unless an explicit (for example integer-floored)
    nu is supplied.
    """
    reps = config.nu if nu is None else nu
    if not reps > 0:
        raise ValueError("nu must be positive")
    u = config.params.gamma * config.tau
    if not u > 0:
        raise ValueError("gamma * tau must be positive")
    numerator = -math.expm1(-u) + math.exp(-u) / config.calibration_energy
    denominator = reps * math.expm1(-0.5 * u) ** 2
    return delta_f_infinity(config.params) * math.sqrt(numerator / denominator)


def optimal_tau(calibration_energy: float, gamma: float) -> tuple[float, float]:
    """Minimize the sequential bound over the probing time.

    Scans log(gamma*tau) over [-12, 6] to bracket the minimum, then refines
    with bounded golden-section/parabolic iteration to 1e-11 absolute in the
    log variable (1e-11 relative on gamma*tau). Returns (tau_opt,
    ratio delta_f / delta_f_min at the optimum).

    Raises:
        BracketError: if the scan puts the minimum on the window edge or the
            refinement fails to converge.
    """
    if not calibration_energy > 0:
        raise ValueError("calibration_energy must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")

    def objective(log_u: float) -> float:
        return sequential_ratio_squared(math.exp(log_u), calibration_energy)

    grid = np.linspace(_LOG_BRACKET[0], _LOG_BRACKET[1], _SCAN_POINTS)
    values = [objective(w) for w in grid]
    k = int(np.argmin(values))
    if k == 0 or k == len(grid) - 1:
        raise BracketError(
            f"ratio minimum for E_cal={calibration_energy!r} hit the scan edge "
            f"log(gamma*tau)={grid[k]!r}; widen the bracket"
        )
    result = optimize.minimize_scalar(
        objective,
        bounds=(grid[k - 1], grid[k + 1]),
        method="bounded",
        options={"xatol": _XATOL_LOG},
    )
    if not result.success:
        raise BracketError(f"probing-time refinement failed: {result.message}")
    u_opt = math.exp(float(result.x))
    return u_opt / gamma, math.sqrt(sequential_ratio_squared(u_opt, calibration_energy))


def asymptotic_ratio(calibration_energy: float) -> float:
    """Two-term large-E_cal expansion of the optimized ratio.

    ratio = 1 + (1/8) (3 / E_cal)^(2/3) + O(1/E_cal); accuracy degrades for
    small E_cal, where only the exact optimizer is meaningful.
    """
    if not calibration_energy > 0:
        raise ValueError("calibration_energy must be positive")
    return 1.0 + 0.125 * (3.0 / calibration_energy) ** (2.0 / 3.0)


def figure2_curve(calibration_energies: list[float]) -> list[tuple[float, float, float]]:
    """Optimized ratio curve: (E_cal, gamma*tau_opt, ratio) per grid point.

    Grid points are independent and may be evaluated in parallel; the output
    order always follows the input grid.
    """
    if not calibration_energies:
        raise ValueError("calibration energy grid must be non-empty")
    if any(not e > 0 for e in calibration_energies):
        raise ValueError("calibration energies must be positive")

    def evaluate(energy: float) -> tuple[float, float, float]:
        tau_opt, ratio = optimal_tau(energy, 1.0)
        return energy, tau_opt, ratio

    return backend.parallel_map(evaluate, list(calibration_energies))


def diffusive_bound(
    mass: float,
    omega: float,
    diffusion: float,
    var_x0: float,
    t_total: float,
    hbar: float = HBAR,
) -> float:
    """Momentum-diffusion limit of the sequential bound, in newtons.

    delta_f >= sqrt(4 m hbar omega Diff / t_total) * sqrt(1 + 1/(4 Diff var_x0 t_total));
    the limit gamma -> 0, n_T -> inf at fixed Diff = gamma n_T, where the
    optimal probing time is the total time.
    """
    if not diffusion > 0:
        raise ValueError("diffusion must be positive")
    if not t_total > 0:
        raise ValueError("t_total must be positive")
    if not var_x0 > 0:
        raise ValueError("var_x0 must be positive")
    leading = math.sqrt(4.0 * mass * hbar * omega * diffusion / t_total)
    return leading * math.sqrt(1.0 + 1.0 / (4.0 * diffusion * var_x0 * t_total))


def sensitivity_report(config: ProtocolConfig) -> SensitivityReport:
    """Optimize the probing time for config and package the sensitivities."""
    tau_opt, ratio = optimal_tau(config.calibration_energy, config.params.gamma)
    floor = potential_sensitivity(config.params, config.t_total)
    return SensitivityReport(
        delta_f_bound=ratio * floor,
        delta_f_infinity=delta_f_infinity(config.params),
        delta_f_min=floor,
        tau_opt=tau_opt,
        ratio_to_potential=ratio,
    )


def config_bound_dimensionless(config: ProtocolConfig, nu: float | None = None) -> float:
    """Cross-module route to the same bound via the per-interval closed form.

    Evaluates the dimensionless bound at eta = exp(-gamma tau) and
    var_x0 = E_cal / (2 (2 n_T + 1)), then converts to newtons; must agree
    with sequential_bound to roundoff.
    """
    params = config.params
    eta = math.exp(-params.gamma * config.tau)
    inputs = BoundInputs(
        eta=eta,
        n_thermal=params.n_thermal,
        var_x0=config.var_x0,
        omega=params.omega,
        gamma=params.gamma,
        nu=config.nu if nu is None else nu,
    )
    bound = force_bound_dimensionless(inputs, attenuation_d(params.omega, params.gamma, config.tau))
    if is_no_information(bound):
        raise ValueError("zero probing time carries no information")
    return params.force_scale * bound
