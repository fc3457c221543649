"""Dual-path performance engine for multi-layer aerial networks: closed-form
evaluation and Monte Carlo estimation of the successful-transmission
probability, plus sweep and optimization tooling."""

__version__ = "0.1.0"

from .model import (
    ChannelParams,
    Environment,
    LayerSpec,
    NetworkSpec,
    avg_rx_power,
    env_probability,
    los_probability,
    radial_intensity,
    sample_fading,
)
from .quadrature import (
    ConvergenceError,
    QuadResult,
    QuadSpec,
    integrate_finite,
    integrate_semi_infinite,
)
from .analysis import (
    AssociationTable,
    InconsistentResultError,
    LaplaceDerivatives,
    LinkClass,
    UndefinedDistributionError,
    UnsupportedCaseError,
    association_probability,
    conditional_laplace_derivs,
    conditional_stp,
    density_upper_bound,
    epsilon,
    exclusion_radius,
    link_classes,
    log_laplace_derivs,
    mainlink_pdf,
    nearest_ccdf,
    nearest_pdf,
    phi,
    stp_by_class,
    total_stp,
)
from .montecarlo import (
    Estimate,
    LayerSample,
    SimConfig,
    TrialOutcome,
    estimate_association,
    estimate_stp,
    far_field_mean,
    run_trial,
    run_trials,
    sample_interference,
    sample_layer,
    trial_rng,
)
from .sweep import (
    GridSpec,
    OptimalDensity,
    SweepPoint,
    SweepResult,
    apply_value,
    iso_total_density,
    optimal_density,
    sweep_1d,
    sweep_2d,
)
