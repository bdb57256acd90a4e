import math

import numpy as np
import pytest

from forcebound import OscillatorParams, RngStream, fisher_grid_oracle, moment_ode_oracle, run_experiment, vacuum_state


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure steady-state cost."""
    params = OscillatorParams(mass=1.0, omega=1.0, gamma=1.0, n_thermal=1.0, force_dimensionless=0.1)
    t = math.log(2.0)
    moment_ode_oracle(params, np.zeros(2), 0.5 * np.eye(2), t)
    fisher_grid_oracle(params, vacuum_state(1), t)
    run_experiment(params, vacuum_state(1), t, nu_shots=2, n_trials=4, rng=RngStream(seed=1))
    yield
