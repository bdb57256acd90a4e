"""Closed-form Fisher information, extended-system QFI, and force bounds.

All quantities are dimensionless unless a function name says otherwise:
the probe quadratures carry vacuum variance 1/2 and the dimensionless force
F maps to newtons through sqrt(hbar * m * omega^3). Every closed form here
is cross-checked against an independent numerical oracle in the test suite
and in ``forcebound validate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gaussian import ChannelDescriptor, OscillatorParams, attenuation_d

__all__ = [
    "BoundInputs",
    "GaugeParams",
    "NO_INFORMATION",
    "NoInformation",
    "NoInformationError",
    "attenuation_d",
    "classical_fisher_momentum",
    "classical_fisher_momentum_min_uncertainty",
    "extended_qfi_zero_t",
    "extended_qfi_thermal",
    "force_bound_dimensionless",
    "force_bound_physical",
    "g_opt_zero_t",
    "is_no_information",
    "lambda_opt_thermal",
    "qfi_min",
    "squeezed_variance",
]


class NoInformation:
    """Tagged result for a zero-signal configuration (D = 0).

    Returned instead of +inf so downstream numeric code cannot silently
    propagate infinities; compare with ``is_no_information``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_INFORMATION"


NO_INFORMATION = NoInformation()


def is_no_information(value) -> bool:
    return value is NO_INFORMATION


class NoInformationError(ValueError):
    """Raised where a computation cannot proceed without accumulated signal."""


@dataclass(frozen=True)
class BoundInputs:
    """Inputs of the closed-form bounds for one probing interval.

    var_x0 is the initial position variance; for the minimum-uncertainty
    probes the bounds assume, var_p0 = 1 / (4 var_x0) is implied. nu is the
    repetition count, continuous in the bound formulas.
    """

    eta: float
    n_thermal: float
    var_x0: float
    omega: float
    gamma: float
    nu: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if self.n_thermal < 0:
            raise ValueError("n_thermal must be non-negative")
        if not self.var_x0 > 0:
            raise ValueError("var_x0 must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if not self.nu > 0:
            raise ValueError("nu must be positive")

    @property
    def var_p0(self) -> float:
        """Momentum variance implied for a minimum-uncertainty probe."""
        return 0.25 / self.var_x0


@dataclass(frozen=True)
class GaugeParams:
    """Environment-displacement gauge parameters of the extended evolution.

    g parameterizes the single-environment (zero-temperature) picture;
    lambda1/lambda2 the two-environment thermal picture. The documented
    correspondence between them at n_T = 0 is g = -d * lambda1 (the two
    parameterizations appear with opposite sign conventions).
    """

    g: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("g", "lambda1", "lambda2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def squeezed_variance(energy: float) -> float:
    """var(X) of the variance-maximizing probe at average energy E >= 1/2."""
    if energy < 0.5:
        raise ValueError("energy must be at least 1/2 (zero point included)")
    return energy + math.sqrt(energy**2 - 0.25)


# ---------------------------------------------------------------------------
# classical Fisher information of momentum measurements
# ---------------------------------------------------------------------------


def classical_fisher_momentum(d: float, var_p_t: float) -> float:
    """Fisher information of a momentum measurement: d^2 / var_p(t)."""
    if not var_p_t > 0:
        raise ValueError("var_p_t must be positive")
    return d * d / var_p_t


def classical_fisher_momentum_min_uncertainty(inputs: BoundInputs, d: float) -> float:
    """Momentum-measurement Fisher information for a minimum-uncertainty probe.

    F_P = d^2 * 4 var_x0 / (eta + 2 (2 n_T + 1)(1 - eta) var_x0); equals the
    general d^2 / var_p(t) form whenever var_p(t) results from the thermal
    loss channel acting on var_p0 = 1 / (4 var_x0).
    """
    v = inputs.var_x0
    denom = inputs.eta + 2.0 * (2.0 * inputs.n_thermal + 1.0) * (1.0 - inputs.eta) * v
    return d * d * 4.0 * v / denom


# ---------------------------------------------------------------------------
# extended-system quantum Fisher information and its gauge minimizations
# ---------------------------------------------------------------------------


def extended_qfi_zero_t(gauge: GaugeParams, eta: float, d: float, var_xs: float, var_xr: float) -> float:
    """QFI of the beam-splitter dilation at gauge g (zero-temperature reservoir).

    4 var_xs [-g sqrt(1-eta) + d sqrt(eta)]^2 + 4 var_xr [d sqrt(1-eta) + g sqrt(eta)]^2.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    root_eta = math.sqrt(eta)
    root_loss = math.sqrt(1.0 - eta)
    term_s = -gauge.g * root_loss + d * root_eta
    term_r = d * root_loss + gauge.g * root_eta
    return 4.0 * var_xs * term_s * term_s + 4.0 * var_xr * term_r * term_r


def g_opt_zero_t(eta: float, d: float, var_xs: float, var_xr: float) -> float:
    """Gauge minimizing the zero-temperature extended QFI.

    g_opt = sqrt(eta (1-eta)) (var_xs - var_xr) d / [(1-eta) var_xs + eta var_xr].
    """
    denom = (1.0 - eta) * var_xs + eta * var_xr
    if denom <= 0:
        raise ValueError("degenerate variances: (1-eta) var_xs + eta var_xr must be positive")
    return math.sqrt(eta * (1.0 - eta)) * (var_xs - var_xr) * d / denom


def extended_qfi_thermal(
    gauge: GaugeParams,
    channel: ChannelDescriptor,
    d: float,
    var_xs: float,
    var_xr1: float,
    var_xr2: float,
) -> float:
    """QFI of the three-mode thermal dilation at gauges (lambda1, lambda2).

    With c1 = cos(theta1), s1 = sin(theta1), c2 = cosh(theta2),
    s2 = sinh(theta2) and u = c2 + lambda2 s2:

        [2d]^2 { var_xs [u c1 + lambda1 s1]^2
               + var_xr1 [-u s1 + lambda1 c1]^2
               + var_xr2 [s2 + lambda2 c2]^2 }.
    """
    c1, s1 = math.cos(channel.theta1), math.sin(channel.theta1)
    c2, s2 = math.cosh(channel.theta2), math.sinh(channel.theta2)
    u = c2 + gauge.lambda2 * s2
    term_s = u * c1 + gauge.lambda1 * s1
    term_r1 = -u * s1 + gauge.lambda1 * c1
    term_r2 = s2 + gauge.lambda2 * c2
    return 4.0 * d * d * (var_xs * term_s**2 + var_xr1 * term_r1**2 + var_xr2 * term_r2**2)


def lambda_opt_thermal(
    channel: ChannelDescriptor,
    var_xs: float,
    var_xr1: float,
    var_xr2: float,
) -> GaugeParams:
    """Stationary gauges of the thermal extended QFI.

    lambda1 couples to the beam-splitter environment, lambda2 to the
    squeezer environment; the gradient of extended_qfi_thermal vanishes at
    the returned point.
    """
    if min(var_xs, var_xr1, var_xr2) <= 0:
        raise ValueError("variances must be positive")
    c1, s1 = math.cos(channel.theta1), math.sin(channel.theta1)
    c2, s2 = math.cosh(channel.theta2), math.sinh(channel.theta2)
    mix = var_xr1 * c1**2 + var_xs * s1**2
    reduced = var_xs * var_xr1 / mix
    lambda2 = -c2 * s2 * (var_xr2 + reduced) / (var_xr2 * c2**2 + reduced * s2**2)
    lambda1 = ((var_xr1 - var_xs) * c1 * s1 / mix) * (c2 + lambda2 * s2)
    return GaugeParams(g=0.0, lambda1=lambda1, lambda2=lambda2)


def qfi_min(eta: float, n_thermal: float, var_x0: float, omega: float, gamma: float, t: float) -> float:
    """Minimized extended QFI: [2 D(eta)]^2 / [2 (1-eta)(2 n_T + 1) + eta / var_x0].

    Equals the momentum-measurement Fisher information of
    classical_fisher_momentum_min_uncertainty for every input, which is the
    attainability statement the validation suite checks. eta must be
    consistent with exp(-gamma t).
    """
    if not var_x0 > 0:
        raise ValueError("var_x0 must be positive")
    if n_thermal < 0:
        raise ValueError("n_thermal must be non-negative")
    expected_eta = math.exp(-gamma * t)
    if not math.isclose(eta, expected_eta, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"eta={eta!r} inconsistent with exp(-gamma t)={expected_eta!r}")
    d = attenuation_d(omega, gamma, t)
    denom = 2.0 * (1.0 - eta) * (2.0 * n_thermal + 1.0) + eta / var_x0
    return 4.0 * d * d / denom


# ---------------------------------------------------------------------------
# force-uncertainty bounds
# ---------------------------------------------------------------------------


def force_bound_dimensionless(inputs: BoundInputs, d: float) -> float | NoInformation:
    """Lower bound on the dimensionless force uncertainty.

    delta_F >= (1 / (d sqrt(2 nu))) * sqrt[(1-eta)(2 n_T + 1) + (eta/2) / var_x0];
    identical to 1 / sqrt(nu * qfi_min). d = 0 carries no signal and yields
    the tagged NO_INFORMATION value rather than an infinity.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0.0:
        return NO_INFORMATION
    bracket = (1.0 - inputs.eta) * (2.0 * inputs.n_thermal + 1.0) + 0.5 * inputs.eta / inputs.var_x0
    return math.sqrt(bracket) / (d * math.sqrt(2.0 * inputs.nu))


def force_bound_physical(
    params: OscillatorParams,
    energy: float,
    nu: float,
    t: float,
) -> float | NoInformation:
    """Lower bound on the physical force uncertainty, in newtons.

    Evaluates the dimensionless bound at the variance-maximizing probe
    var_x0 = E + sqrt(E^2 - 1/4) for the probing time t, then converts with
    sqrt(m hbar omega^3).
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    var_x0 = squeezed_variance(energy)
    eta = math.exp(-params.gamma * t)
    d = attenuation_d(params.omega, params.gamma, t)
    inputs = BoundInputs(
        eta=eta,
        n_thermal=params.n_thermal,
        var_x0=var_x0,
        omega=params.omega,
        gamma=params.gamma,
        nu=nu,
    )
    bound = force_bound_dimensionless(inputs, d)
    if is_no_information(bound):
        return NO_INFORMATION
    return params.force_scale * bound
