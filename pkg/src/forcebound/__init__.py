"""Force-estimation precision bounds for a thermally damped oscillator probe.

The package simulates the probe in the Gaussian-moment formalism, evaluates
the classical and quantum Fisher-information bounds on force estimation,
optimizes the sequential-measurement probing time, and verifies Cramer-Rao
attainment by Monte Carlo. See the CLI (``forcebound --help``) for the batch
front end, and ``forcebound validate`` for the oracle identity suite.
"""

from .backend import active_backend_name, thread_count
from .bounds import (
    NO_INFORMATION,
    BoundInputs,
    GaugeParams,
    NoInformationError,
    attenuation_d,
    classical_fisher_momentum,
    classical_fisher_momentum_min_uncertainty,
    extended_qfi_thermal,
    extended_qfi_zero_t,
    force_bound_dimensionless,
    force_bound_physical,
    g_opt_zero_t,
    is_no_information,
    lambda_opt_thermal,
    qfi_min,
    squeezed_variance,
)
from .gaussian import (
    HBAR,
    K_BOLTZMANN,
    ChannelDescriptor,
    GaussianState,
    OscillatorParams,
    apply_symplectic,
    beam_splitter,
    displace,
    evolve_forced,
    momentum_marginal,
    partial_trace,
    purified_evolution,
    squeezed_ground_state,
    symplectic_form,
    thermal_loss_channel,
    two_mode_squeeze,
    vacuum_state,
)
from .montecarlo import (
    EstimationReport,
    RngStream,
    empirical_score_fisher,
    fisher_grid_oracle,
    mle_force,
    moment_ode_oracle,
    run_experiment,
    sample_momentum,
)
from .protocol import (
    BracketError,
    ProtocolConfig,
    SensitivityReport,
    asymptotic_ratio,
    delta_f_infinity,
    diffusive_bound,
    figure2_curve,
    optimal_tau,
    potential_sensitivity,
    sensitivity_report,
    sequential_bound,
    sequential_ratio_squared,
)
from .scenario import Scenario, ScenarioError, parse_scenario, parse_scenario_text

__version__ = "0.1.0"
