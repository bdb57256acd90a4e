"""Multimode Gaussian states and the symplectic/channel operations on them.

States are kept at the moment level: a length-2N mean vector ordered
(X1, P1, ..., XN, PN) and a 2N x 2N covariance matrix in dimensionless
quadratures with [X, P] = i, so the vacuum variance is 1/2 per quadrature.
All operations are pure value-to-value transformations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

# CODATA 2018 values; overridable per OscillatorParams instance.
HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J/K

VACUUM_VARIANCE = 0.5
SYMMETRY_ATOL = 1e-12
PURITY_ATOL = 1e-9
UNCERTAINTY_SLACK = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the 2N x 2N symplectic form for (X1, P1, ..., XN, PN) ordering."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for m in range(n_modes):
        omega[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = block
    return omega


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an N-mode Gaussian state.

    Attributes:
        mean: length-2N vector of quadrature means, ordered (X1, P1, ...).
        cov: symmetric 2N x 2N covariance matrix (vacuum variance 1/2).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 != 0 or mean.size == 0:
            raise ValueError(f"mean must have even positive length, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(cov)):
            raise ValueError("moments must be finite")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_ATOL:
            raise ValueError("covariance matrix is not symmetric within 1e-12")
        cov = 0.5 * (cov + cov.T)
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        smallest = float(np.min(self.symplectic_eigenvalues()))
        if smallest < VACUUM_VARIANCE - UNCERTAINTY_SLACK:
            raise ValueError(f"covariance violates the uncertainty relation: symplectic eigenvalue {smallest}")

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Symplectic spectrum: positive values nu_k, each >= 1/2 for a physical state."""
        omega = symplectic_form(self.n_modes)
        eig = np.linalg.eigvals(omega @ self.cov)
        # eigenvalues come in +/- i nu_k pairs; keep one of each adjacent pair
        return np.sort(np.abs(eig))[::2]

    def is_physical(self, slack: float = UNCERTAINTY_SLACK) -> bool:
        """Check the uncertainty relation: all symplectic eigenvalues >= 1/2 - slack."""
        return bool(np.min(self.symplectic_eigenvalues()) >= VACUUM_VARIANCE - slack)

    def purity_det(self) -> float:
        """det(2 cov); equals 1 for pure states."""
        return float(np.linalg.det(2.0 * self.cov))

    def is_pure(self, atol: float = PURITY_ATOL) -> bool:
        return abs(self.purity_det() - 1.0) <= atol

    def to_json(self) -> str:
        """Debug serialization: n_modes, mean, and row-major cov."""
        payload = {
            "n_modes": self.n_modes,
            "mean": self.mean.tolist(),
            "cov": self.cov.ravel().tolist(),
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GaussianState":
        payload = json.loads(text)
        n = 2 * int(payload["n_modes"])
        return cls(np.array(payload["mean"]), np.array(payload["cov"]).reshape(n, n))


@dataclass(frozen=True)
class OscillatorParams:
    """Physical constants of the probe oscillator and its thermal reservoir.

    The dimensionless force is related to the physical one (in newtons) by
    force_newton = force_dimensionless * sqrt(hbar * mass * omega^3).
    """

    mass: float  # kg
    omega: float  # rad/s
    gamma: float  # 1/s
    n_thermal: float = 0.0
    force_dimensionless: float = 0.0
    hbar: float = HBAR

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.n_thermal < 0:
            raise ValueError("n_thermal must be non-negative")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def from_temperature(
        cls,
        mass: float,
        omega: float,
        gamma: float,
        temperature: float,
        force_dimensionless: float = 0.0,
        hbar: float = HBAR,
        k_boltzmann: float = K_BOLTZMANN,
    ) -> "OscillatorParams":
        """Build params from a reservoir temperature in kelvin.

        Uses the Bose-Einstein occupation n_T = 1 / (exp(hbar*omega/kB*T) - 1);
        T = 0 maps to n_T = 0.
        """
        if temperature < 0:
            raise ValueError("temperature must be non-negative")
        if temperature == 0.0:
            n_thermal = 0.0
        else:
            n_thermal = 1.0 / math.expm1(hbar * omega / (k_boltzmann * temperature))
        return cls(mass, omega, gamma, n_thermal, force_dimensionless, hbar)

    @property
    def coth_factor(self) -> float:
        """cotanh(hbar*omega / 2 kB T) expressed as 2 n_T + 1."""
        return 2.0 * self.n_thermal + 1.0

    @property
    def force_scale(self) -> float:
        """sqrt(hbar * m * omega^3): converts dimensionless force to newtons."""
        return math.sqrt(self.hbar * self.mass * self.omega**3)

    @property
    def force_newton(self) -> float:
        return self.force_dimensionless * self.force_scale

    def with_force(self, force_dimensionless: float) -> "OscillatorParams":
        return replace(self, force_dimensionless=force_dimensionless)


def attenuation_d(omega: float, gamma: float, t: float) -> float:
    """Effective momentum displacement per unit dimensionless force.

    D = (omega/gamma) * (1 - exp(-gamma t / 2)); the gamma -> 0 removable
    singularity is taken as its series limit omega*t/2 when gamma*t < 1e-12.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if t < 0:
        raise ValueError("t must be non-negative")
    if gamma * t < 1e-12:
        return 0.5 * omega * t
    return (omega / gamma) * (-math.expm1(-0.5 * gamma * t))


@dataclass(frozen=True)
class ChannelDescriptor:
    """Derived quantities of the displaced thermal-loss channel over one interval.

    theta1 is the beam-splitter mixing angle against the first environment
    mode, theta2 the two-mode squeezing angle against the second one; they
    satisfy cos(theta1) = sqrt(eta / (n_T (1-eta) + 1)) and
    cosh(theta2) = sqrt(n_T (1-eta) + 1).
    """

    eta: float
    d_factor: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if self.d_factor < 0:
            raise ValueError("d_factor must be non-negative")
        if self.theta1 < 0 or self.theta2 < 0:
            raise ValueError("mixing angles must be non-negative")

    @classmethod
    def from_rates(cls, omega: float, gamma: float, n_thermal: float, t: float) -> "ChannelDescriptor":
        if t < 0:
            raise ValueError("t must be non-negative")
        if n_thermal < 0:
            raise ValueError("n_thermal must be non-negative")
        eta = math.exp(-gamma * t)
        big_n = n_thermal * (1.0 - eta) + 1.0
        # eta/big_n can exceed 1 by roundoff only when eta == 1 exactly.
        theta1 = math.acos(min(1.0, math.sqrt(eta / big_n)))
        theta2 = math.acosh(max(1.0, math.sqrt(big_n)))
        return cls(eta, attenuation_d(omega, gamma, t), theta1, theta2)

    @classmethod
    def from_params(cls, params: OscillatorParams, t: float) -> "ChannelDescriptor":
        return cls.from_rates(params.omega, params.gamma, params.n_thermal, t)


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------


def vacuum_state(n_modes: int) -> GaussianState:
    """N-mode vacuum: zero mean, covariance I/2."""
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def squeezed_ground_state(energy: float) -> GaussianState:
    """Single-mode minimum-uncertainty state maximizing var(X) at fixed energy.

    For average energy E (in units of hbar*omega, zero point included) the
    position variance is var(X) = E + sqrt(E^2 - 1/4), which equals
    exp(2r)/2 for squeezing parameter r = ln(2 var(X)) / 2, and
    var(P) = 1 / (4 var(X)).

    Args:
        energy: average energy E >= 1/2.
    """
    if energy < 0.5:
        raise ValueError("energy must be at least 1/2 (zero point included)")
    var_x = energy + math.sqrt(energy**2 - 0.25)
    return GaussianState(np.zeros(2), np.diag([var_x, 0.25 / var_x]))


# ---------------------------------------------------------------------------
# symplectic operations
# ---------------------------------------------------------------------------


def apply_symplectic(state: GaussianState, s_matrix: np.ndarray) -> GaussianState:
    """Apply a linear symplectic map: mean -> S mean, cov -> S cov S^T."""
    return GaussianState(s_matrix @ state.mean, s_matrix @ state.cov @ s_matrix.T)


def _check_mode(state: GaussianState, mode: int):
    if not 0 <= mode < state.n_modes:
        raise ValueError(f"mode {mode} out of range for {state.n_modes}-mode state")


def displace(state: GaussianState, mode: int, dx: float, dp: float) -> GaussianState:
    """Shift the mean of one mode by (dx, dp); the covariance is unchanged."""
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(mean, state.cov)


def beam_splitter(state: GaussianState, i: int, j: int, theta: float) -> GaussianState:
    """Mix modes i and j on a beam splitter with transmissivity cos^2(theta).

    Convention: theta > 0 rotates X_i -> cos(theta) X_i + sin(theta) X_j and
    X_j -> -sin(theta) X_i + cos(theta) X_j, identically for P.
    """
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    c, s = math.cos(theta), math.sin(theta)
    n = state.n_modes
    smat = np.eye(2 * n)
    for off in (0, 1):  # same rotation on X and P
        a, b = 2 * i + off, 2 * j + off
        smat[a, a] = c
        smat[a, b] = s
        smat[b, a] = -s
        smat[b, b] = c
    return apply_symplectic(state, smat)


def two_mode_squeeze(state: GaussianState, i: int, j: int, theta2: float) -> GaussianState:
    """Two-mode squeezing of modes i and j with hyperbolic angle theta2.

    X_i -> cosh(t) X_i + sinh(t) X_j while P_i -> cosh(t) P_i - sinh(t) P_j,
    and symmetrically for mode j.
    """
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    ch, sh = math.cosh(theta2), math.sinh(theta2)
    n = state.n_modes
    smat = np.eye(2 * n)
    xi, pi_, xj, pj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    smat[xi, xi] = ch
    smat[xi, xj] = sh
    smat[xj, xi] = sh
    smat[xj, xj] = ch
    smat[pi_, pi_] = ch
    smat[pi_, pj] = -sh
    smat[pj, pi_] = -sh
    smat[pj, pj] = ch
    return apply_symplectic(state, smat)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------


def thermal_loss_channel(state: GaussianState, mode: int, eta: float, n_thermal: float) -> GaussianState:
    """Thermal loss on one mode: variances relax toward (2 n_T + 1)/2.

    On the target mode the mean scales by sqrt(eta) and the covariance block
    maps to eta * cov + (1 - eta)(n_T + 1/2) I; cross-covariances with
    the other modes scale by sqrt(eta).
    """
    _check_mode(state, mode)
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    if n_thermal < 0:
        raise ValueError("n_thermal must be non-negative")
    root = math.sqrt(eta)
    idx = [2 * mode, 2 * mode + 1]
    mean = state.mean.copy()
    mean[idx] *= root
    cov = state.cov.copy()
    cov[idx, :] *= root
    cov[:, idx] *= root
    add = (1.0 - eta) * (n_thermal + 0.5)
    cov[idx[0], idx[0]] += add
    cov[idx[1], idx[1]] += add
    return GaussianState(mean, cov)


def evolve_forced(state: GaussianState, params: OscillatorParams, t: float, mode: int = 0) -> GaussianState:
    """Evolve one mode under the resonant force and thermal damping for time t.

    Decomposes into thermal loss with eta = exp(-gamma t) followed by a
    momentum displacement D(eta) * F; the composite channel (not the internal
    ordering) is the contract.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    channel = ChannelDescriptor.from_params(params, t)
    out = thermal_loss_channel(state, mode, channel.eta, params.n_thermal)
    return displace(out, mode, 0.0, channel.d_factor * params.force_dimensionless)


def purified_evolution(probe: GaussianState, params: OscillatorParams, t: float) -> GaussianState:
    """Unitary three-mode dilation of evolve_forced for a pure single-mode probe.

    Appends two vacuum environment modes (R1, R2), applies the beam splitter
    with angle theta1 on (S, R1), the two-mode squeezer with angle theta2 on
    (S, R2), then the momentum displacement D(eta) * F on S. Tracing out R1
    and R2 reproduces evolve_forced at the moment level.
    """
    if probe.n_modes != 1:
        raise ValueError("probe must be a single-mode state")
    if not probe.is_pure():
        raise ValueError("probe must be pure: purification of a mixed input is undefined here")
    channel = ChannelDescriptor.from_params(params, t)
    mean = np.concatenate([probe.mean, np.zeros(4)])
    cov = VACUUM_VARIANCE * np.eye(6)
    cov[:2, :2] = probe.cov
    state = GaussianState(mean, cov)
    state = beam_splitter(state, 0, 1, channel.theta1)
    state = two_mode_squeeze(state, 0, 2, channel.theta2)
    return displace(state, 0, 0.0, channel.d_factor * params.force_dimensionless)


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Restrict the moments to the kept modes (in the order given)."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    if len(set(keep)) != len(keep):
        raise ValueError("keep set contains duplicate modes")
    for m in keep:
        _check_mode(state, m)
    idx = np.array([2 * m + off for m in keep for off in (0, 1)])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def momentum_marginal(state: GaussianState, mode: int) -> tuple[float, float]:
    """Mean and variance of the P quadrature of one mode."""
    _check_mode(state, mode)
    p = 2 * mode + 1
    return float(state.mean[p]), float(state.cov[p, p])
