"""frictionlab: Monte Carlo laboratory for diffusions with vanishing friction.

The package simulates the eps-regularized dynamics of a particle whose
friction coefficient vanishes on a band, evaluates the exact first-passage
and resolvent quantities of the projected (glued) limit process, and checks
by seeded Monte Carlo that the regularized process converges to that limit.
"""

from .glue import VERTEX, ConePoint, cone_distance, project_1d, project_2d
from .harness import (
    ExperimentConfig,
    StatsReport,
    binomial_ci,
    chi_square_uniform,
    ks_two_sample,
    run_experiment,
    wilson_interval,
)
from .limitproc import (
    LimitPath1D,
    LimitPathCone,
    cone_exit_angles,
    limit_marginal_1d,
    limit_marginal_cone,
    simulate_limit_1d,
    simulate_limit_cone,
)
from .oracle import (
    BVPSolution,
    MixingBounds,
    Schedule,
    ScheduleError,
    exit_probability,
    expected_exit_time,
    laplace_exit_time,
    mixing_bounds,
    resolvent_mode_solve,
    schedule,
)
from .profiles import (
    Coefficients,
    FrictionProfile,
    InvalidProfileError,
    PROFILES,
    asymmetric_profile,
    coefficients,
    make_profile,
    quadratic_profile,
    quartic_profile,
    validate_profile,
    with_constant_drift,
)
from .scale import NaturalTable, ProjectedScale, ScaleEvaluator, natural_table
from .sde import (
    CrossingCounters,
    ExitRecord,
    ExitSample,
    PathRecord,
    RunawayError,
    alpha_beta_count,
    alpha_beta_sample,
    crossing_sequence,
    default_dt,
    exit_sample_1d,
    exit_sample_2d,
    first_exit,
    marginal_sample_1d,
    marginal_sample_2d,
    natural_dt,
    simulate_path_1d,
    simulate_path_2d,
    tau_sigma_counts,
)

__version__ = "0.1.0"
