"""Stochastic verification layer: sampling, maximum likelihood, and oracles.

Monte Carlo experiments draw momentum samples from the evolved probe,
estimate the force per trial, and compare the empirical mean squared error
with the Cramer-Rao prediction. The module also hosts the two independent
numerical oracles used to validate every closed form: a grid quadrature of
the Fisher integral and an RK4 integration of the moment equations.

Randomness is counter-based: a (seed, stream_id) pair addresses one Philox
stream, so trials are reproducible bit-for-bit regardless of how they are
chunked over worker threads.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from typing import IO

import numpy as np

from . import backend
from .bounds import NoInformationError, classical_fisher_momentum
from .gaussian import GaussianState, OscillatorParams, attenuation_d, evolve_forced, momentum_marginal

__all__ = [
    "EstimationReport",
    "RngStream",
    "empirical_score_fisher",
    "fisher_grid_oracle",
    "mle_force",
    "moment_ode_oracle",
    "run_experiment",
    "sample_momentum",
]

_MASK64 = (1 << 64) - 1
_CHUNK_ELEMENTS = 4_000_000  # cap on normals held in memory per chunk

DEFAULT_GRID_POINTS = 2**14
DEFAULT_GRID_SPAN_SIGMAS = 12.0


@dataclass(frozen=True)
class RngStream:
    """Address of one counter-based random stream.

    The same (seed, stream_id) pair yields the same sample sequence on every
    run and under any thread count; distinct stream_ids give statistically
    independent streams.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        key = (self.seed & _MASK64) | ((self.stream_id & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngStream":
        return replace(self, stream_id=(self.stream_id + offset) & _MASK64)


@dataclass(frozen=True)
class EstimationReport:
    """Outcome of one Monte Carlo estimation experiment."""

    f_true: float
    n_trials: int
    nu_shots: int
    estimate_mean: float
    estimate_variance: float
    empirical_mse: float
    fisher_per_shot: float
    crb_prediction: float
    attainment_ratio: float

    def __post_init__(self):
        if self.n_trials < 1 or self.nu_shots < 1:
            raise ValueError("counts must be positive")
        if not self.crb_prediction > 0:
            raise ValueError("crb_prediction must be positive")

    @property
    def count(self) -> int:
        return self.n_trials * self.nu_shots

    def to_json_dict(self) -> dict:
        return {
            "f_true": self.f_true,
            "estimates": {
                "mean": self.estimate_mean,
                "variance": self.estimate_variance,
                "n_trials": self.n_trials,
                "nu_shots": self.nu_shots,
                "count": self.count,
            },
            "empirical_mse": self.empirical_mse,
            "fisher_per_shot": self.fisher_per_shot,
            "crb_prediction": self.crb_prediction,
            "attainment_ratio": self.attainment_ratio,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def sample_momentum(state: GaussianState, mode: int, rng: RngStream, n: int) -> np.ndarray:
    """Draw n momentum-measurement outcomes from the Gaussian marginal."""
    if n < 1:
        raise ValueError("n must be at least 1")
    mean_p, var_p = momentum_marginal(state, mode)
    return mean_p + math.sqrt(var_p) * rng.generator().standard_normal(n)


def mle_force(samples: np.ndarray, d: float, sqrt_eta: float, mean_p0: float) -> float:
    """Closed-form maximum-likelihood force estimate from momentum samples.

    The Gaussian shift model gives F_hat = (sample mean - sqrt(eta) * mean_p0) / d,
    which is unbiased for any sample size.
    """
    if d == 0.0:
        raise NoInformationError("d = 0: the samples carry no force information")
    return float((np.mean(samples) - sqrt_eta * mean_p0) / d)


def _stream_samples_csv(sink: IO[str], trial: int, samples: np.ndarray):
    writer = csv.writer(sink, lineterminator="\n")
    for shot, value in enumerate(samples):
        writer.writerow([trial, shot, repr(float(value))])


def run_experiment(
    params: OscillatorParams,
    probe: GaussianState,
    t: float,
    nu_shots: int,
    n_trials: int,
    rng: RngStream,
    samples_sink: IO[str] | None = None,
) -> EstimationReport:
    """Full evolve / measure / estimate loop for n_trials independent trials.

    Each trial evolves a fresh probe, draws nu_shots momentum samples from
    stream (rng.seed, rng.stream_id + trial), and estimates the force by
    maximum likelihood. The report compares the empirical MSE across trials
    with the Cramer-Rao prediction 1 / (nu_shots * F_P).

    samples_sink, when given, receives CSV rows (trial, shot, p_value); the
    trials then run sequentially to keep the row order deterministic.
    """
    if nu_shots < 1 or n_trials < 1:
        raise ValueError("counts must be positive")
    d = attenuation_d(params.omega, params.gamma, t)
    if d == 0.0:
        raise NoInformationError("zero probing time carries no force information")
    evolved = evolve_forced(probe, params, t)
    mean_p_t, var_p_t = momentum_marginal(evolved, 0)
    sigma_p = math.sqrt(var_p_t)
    sqrt_eta = math.exp(-0.5 * params.gamma * t)
    shifted_mean_p0 = sqrt_eta * float(probe.mean[1])
    kern = backend.kernels()

    estimates = np.empty(n_trials)

    def run_chunk(bounds_pair: tuple[int, int]):
        start, stop = bounds_pair
        normals = np.empty((stop - start, nu_shots))
        for i in range(stop - start):
            gen = rng.child(start + i).generator()
            normals[i] = gen.standard_normal(nu_shots)
            if samples_sink is not None:
                _stream_samples_csv(samples_sink, start + i, mean_p_t + sigma_p * normals[i])
        estimates[start:stop] = kern.mc_trial_estimates(normals, mean_p_t, sigma_p, shifted_mean_p0, d)

    chunk = max(1, min(n_trials, _CHUNK_ELEMENTS // max(1, nu_shots)))
    ranges = [(a, min(a + chunk, n_trials)) for a in range(0, n_trials, chunk)]
    if samples_sink is not None:
        for pair in ranges:
            run_chunk(pair)
    else:
        backend.parallel_map(run_chunk, ranges)

    fisher_per_shot = classical_fisher_momentum(d, var_p_t)
    crb = 1.0 / (nu_shots * fisher_per_shot)
    f_true = params.force_dimensionless
    empirical_mse = float(np.mean((estimates - f_true) ** 2))
    return EstimationReport(
        f_true=f_true,
        n_trials=n_trials,
        nu_shots=nu_shots,
        estimate_mean=float(np.mean(estimates)),
        estimate_variance=float(np.var(estimates, ddof=1)) if n_trials > 1 else 0.0,
        empirical_mse=empirical_mse,
        fisher_per_shot=fisher_per_shot,
        crb_prediction=crb,
        attainment_ratio=empirical_mse / crb,
    )


def empirical_score_fisher(samples: np.ndarray, mean_p: float, var_p: float, d: float) -> float:
    """Sample-based Fisher estimate: variance of the per-sample score.

    For the Gaussian shift model the score is d (P - mean_p) / var_p, whose
    variance equals the momentum-measurement Fisher information.
    """
    score = d * (np.asarray(samples) - mean_p) / var_p
    return float(np.var(score, ddof=1))


# ---------------------------------------------------------------------------
# independent numerical oracles
# ---------------------------------------------------------------------------


def fisher_grid_oracle(
    params: OscillatorParams,
    probe: GaussianState,
    t: float,
    delta_f: float | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    span_sigmas: float = DEFAULT_GRID_SPAN_SIGMAS,
) -> float:
    """Numerical Fisher information of the momentum measurement.

    Integrates (dp/dF)^2 / p over a momentum grid with central differences
    in F, evolving the probe through the moment-level channel at F and at
    F +/- delta_f. The default step is 1e-4 * sigma / D, balancing
    truncation against cancellation in double precision.

    Raises:
        ValueError: if the grid spans fewer than 10 standard deviations or
            has fewer than 1e4 points (underspanned grids bias the integral).
    """
    if span_sigmas < 10.0:
        raise ValueError("grid underspanned: span must cover at least 10 standard deviations")
    if n_points < 10_000:
        raise ValueError("grid underspanned: need at least 1e4 points")
    d = attenuation_d(params.omega, params.gamma, t)
    if d == 0.0:
        return 0.0
    center = evolve_forced(probe, params, t)
    mu_center, var_p = momentum_marginal(center, 0)
    sigma = math.sqrt(var_p)
    step = delta_f if delta_f is not None else 1e-4 * sigma / d
    f0 = params.force_dimensionless
    mu_plus, _ = momentum_marginal(evolve_forced(probe, params.with_force(f0 + step), t), 0)
    mu_minus, _ = momentum_marginal(evolve_forced(probe, params.with_force(f0 - step), t), 0)
    grid = np.linspace(mu_center - span_sigmas * sigma, mu_center + span_sigmas * sigma, n_points)
    return float(backend.kernels().fisher_quadrature(grid, mu_minus, mu_plus, mu_center, var_p, step))


def moment_ode_oracle(
    params: OscillatorParams,
    init_mean: np.ndarray,
    init_cov: np.ndarray,
    t: float,
    steps_per_unit: int = 1000,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the single-mode moment equations with fixed-step RK4.

    d<X>/dt = -g/2 <X>, d<P>/dt = w F/2 - g/2 <P>, dVar/dt = -g Var +
    g (2 n_T + 1)/2 on both quadratures, dCov/dt = -g Cov. Serves as the
    independent oracle for the loss-plus-displacement channel; uses at least
    steps_per_unit steps per unit of gamma*t (>= 1000 required).
    """
    if steps_per_unit < 1000:
        raise ValueError("need at least 1000 integration steps per unit gamma*t")
    if t < 0:
        raise ValueError("t must be non-negative")
    mean = np.asarray(init_mean, dtype=float)
    cov = np.asarray(init_cov, dtype=float)
    if mean.shape != (2,) or cov.shape != (2, 2):
        raise ValueError("oracle integrates a single mode: mean (2,), cov (2, 2)")
    if t == 0.0:
        return mean.copy(), cov.copy()
    n_steps = max(steps_per_unit, int(math.ceil(steps_per_unit * params.gamma * t)))
    out = backend.kernels().rk4_moments(
        float(mean[0]),
        float(mean[1]),
        float(cov[0, 0]),
        float(cov[0, 1]),
        float(cov[1, 1]),
        params.omega,
        params.gamma,
        params.force_dimensionless,
        params.n_thermal,
        t,
        n_steps,
    )
    mean_out = np.array([out[0], out[1]])
    cov_out = np.array([[out[2], out[3]], [out[3], out[4]]])
    return mean_out, cov_out
