"""Numba-jitted implementations of the hot numeric kernels.

Importing this module requires numba; forcebound.backend falls back to the
pure-numpy twins in _kernels_numpy when numba is missing or disabled via
FORCEBOUND_BACKEND=numpy.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True)
def mc_trial_estimates(normals, mean_p_t, sigma_p, shifted_mean_p0, d):
    """Per-trial force estimates from a (n_trials, nu_shots) block of N(0,1) draws."""
    n_trials, nu_shots = normals.shape
    out = np.empty(n_trials)
    for i in range(n_trials):
        acc = 0.0
        for j in range(nu_shots):
            acc += mean_p_t + sigma_p * normals[i, j]
        out[i] = (acc / nu_shots - shifted_mean_p0) / d
    return out


@njit(cache=True)
def rk4_moments(mean_x, mean_p, cov_xx, cov_xp, cov_pp, omega, gamma, force, n_thermal, t, n_steps):
    """Fixed-step RK4 for the damped-oscillator moment ODEs."""
    h = t / n_steps
    drive = 0.5 * omega * force
    floor = 0.5 * gamma * (2.0 * n_thermal + 1.0)
    y0, y1, y2, y3, y4 = mean_x, mean_p, cov_xx, cov_xp, cov_pp
    for _ in range(n_steps):
        a0 = -0.5 * gamma * y0
        a1 = drive - 0.5 * gamma * y1
        a2 = floor - gamma * y2
        a3 = -gamma * y3
        a4 = floor - gamma * y4

        b0 = -0.5 * gamma * (y0 + 0.5 * h * a0)
        b1 = drive - 0.5 * gamma * (y1 + 0.5 * h * a1)
        b2 = floor - gamma * (y2 + 0.5 * h * a2)
        b3 = -gamma * (y3 + 0.5 * h * a3)
        b4 = floor - gamma * (y4 + 0.5 * h * a4)

        c0 = -0.5 * gamma * (y0 + 0.5 * h * b0)
        c1 = drive - 0.5 * gamma * (y1 + 0.5 * h * b1)
        c2 = floor - gamma * (y2 + 0.5 * h * b2)
        c3 = -gamma * (y3 + 0.5 * h * b3)
        c4 = floor - gamma * (y4 + 0.5 * h * b4)

        d0 = -0.5 * gamma * (y0 + h * c0)
        d1 = drive - 0.5 * gamma * (y1 + h * c1)
        d2 = floor - gamma * (y2 + h * c2)
        d3 = -gamma * (y3 + h * c3)
        d4 = floor - gamma * (y4 + h * c4)

        y0 += (h / 6.0) * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
        y1 += (h / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
        y2 += (h / 6.0) * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
        y3 += (h / 6.0) * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
        y4 += (h / 6.0) * (a4 + 2.0 * b4 + 2.0 * c4 + d4)
    return y0, y1, y2, y3, y4


@njit(cache=True)
def fisher_quadrature(grid, mu_minus, mu_plus, mu_center, var_p, delta_f):
    """Trapezoid quadrature of the central-difference Fisher integrand."""
    norm = 1.0 / math.sqrt(2.0 * math.pi * var_p)
    inv2v = 0.5 / var_p
    inv_step = 1.0 / (4.0 * delta_f * delta_f)
    n = grid.shape[0]
    prev = 0.0
    total = 0.0
    for k in range(n):
        p_c = norm * math.exp(-((grid[k] - mu_center) ** 2) * inv2v)
        if p_c > 0.0:
            p_p = norm * math.exp(-((grid[k] - mu_plus) ** 2) * inv2v)
            p_m = norm * math.exp(-((grid[k] - mu_minus) ** 2) * inv2v)
            cur = (p_p - p_m) ** 2 * inv_step / p_c
        else:
            cur = 0.0
        if k > 0:
            total += 0.5 * (prev + cur) * (grid[k] - grid[k - 1])
        prev = cur
    return total
