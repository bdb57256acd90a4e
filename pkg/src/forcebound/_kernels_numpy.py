"""Pure-numpy reference implementations of the hot numeric kernels.

Selected when FORCEBOUND_BACKEND=numpy or when numba is unavailable; see
forcebound.backend. Signatures must stay in lockstep with _kernels_numba.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "numpy"


def mc_trial_estimates(
    normals: np.ndarray,
    mean_p_t: float,
    sigma_p: float,
    shifted_mean_p0: float,
    d: float,
) -> np.ndarray:
    """Per-trial force estimates from a (n_trials, nu_shots) block of N(0,1) draws.

    Each row is one trial: samples = mean_p_t + sigma_p * z, and the estimate
    is (sample mean - shifted_mean_p0) / d with shifted_mean_p0 = sqrt(eta) * mean_p0.
    """
    samples = mean_p_t + sigma_p * normals
    return (samples.mean(axis=1) - shifted_mean_p0) / d


def rk4_moments(
    mean_x: float,
    mean_p: float,
    cov_xx: float,
    cov_xp: float,
    cov_pp: float,
    omega: float,
    gamma: float,
    force: float,
    n_thermal: float,
    t: float,
    n_steps: int,
) -> tuple[float, float, float, float, float]:
    """Fixed-step RK4 for the damped-oscillator moment ODEs.

    d<X>/dt = -g/2 <X>;  d<P>/dt = w F / 2 - g/2 <P>;
    dVar/dt = -g Var + g (2 n_T + 1)/2 on both quadratures, dCov/dt = -g Cov.
    """
    h = t / n_steps
    drive = 0.5 * omega * force
    floor = 0.5 * gamma * (2.0 * n_thermal + 1.0)
    y = np.array([mean_x, mean_p, cov_xx, cov_xp, cov_pp])

    def deriv(state):
        return np.array(
            [
                -0.5 * gamma * state[0],
                drive - 0.5 * gamma * state[1],
                floor - gamma * state[2],
                -gamma * state[3],
                floor - gamma * state[4],
            ]
        )

    for _ in range(n_steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * h * k1)
        k3 = deriv(y + 0.5 * h * k2)
        k4 = deriv(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return float(y[0]), float(y[1]), float(y[2]), float(y[3]), float(y[4])


def fisher_quadrature(
    grid: np.ndarray,
    mu_minus: float,
    mu_plus: float,
    mu_center: float,
    var_p: float,
    delta_f: float,
) -> float:
    """Trapezoid quadrature of the central-difference Fisher integrand.

    Integrates [p(P|F+d) - p(P|F-d)]^2 / (4 d^2 p(P|F)) over the momentum
    grid, where p is the Gaussian density with variance var_p and the three
    means correspond to F - delta_f, F, F + delta_f.
    """
    norm = 1.0 / math.sqrt(2.0 * math.pi * var_p)
    inv2v = 0.5 / var_p
    p_c = norm * np.exp(-((grid - mu_center) ** 2) * inv2v)
    p_p = norm * np.exp(-((grid - mu_plus) ** 2) * inv2v)
    p_m = norm * np.exp(-((grid - mu_minus) ** 2) * inv2v)
    integrand = np.where(p_c > 0.0, (p_p - p_m) ** 2 / (4.0 * delta_f**2 * np.maximum(p_c, 1e-300)), 0.0)
    return float(np.trapezoid(integrand, grid))
