"""qedq: exact and asymptotic performance analysis of many-server queues
operating under square-root capacity rules, with capacity dimensioning
and a built-in stochastic validation engine.
"""

from .bulk import (
    BulkModel,
    BulkStationary,
    GaussianWalkMax,
    PoissonPlus,
    bulk_stationary,
    gaussian_walk_max,
    many_sources_staffing,
    pois_plus_stats,
)
from .errors import (
    ConfigurationError,
    DomainError,
    InstabilityError,
    NumericalError,
    QedqError,
)
from .exact import (
    BirthDeathResult,
    QueueModel,
    StationaryMeasures,
    erlang_a_measures,
    erlang_b,
    erlang_c,
    erlang_c_real,
    mms_measures,
    mms_pi,
    mmsn_measures,
    solve_birth_death,
)
from .qed import (
    AbandonmentLimits,
    HwStationary,
    QedBounds,
    QedPoint,
    corrected_delay_prob,
    delay_correction_coeff,
    erlang_a_qed_limits,
    finite_buffer_delay_limit,
    hw_stationary,
    infinite_server_delay,
    qed_bounds,
    qed_delay_prob,
    qed_loss_coefficient,
    qed_mean_delay,
    scaled_servers,
)
from .sim import (
    DiffusionModel,
    SamplePath,
    SimConfig,
    SimEstimate,
    TimeVaryingModel,
    diffusion_samples,
    nhpp_arrivals,
    sample_path,
    simulate,
    time_varying_delay_profile,
)
from .special import (
    NormalValues,
    PoissonTail,
    SeriesControl,
    normal_dist,
    normal_quantile,
    poisson_tail,
    round_half_up,
    zeta_half,
)
from .staffing import (
    StaffingProblem,
    StaffingSolution,
    beta_for_delay_target,
    cost_beta_star,
    cost_exhaustive,
    cost_qed,
    cost_refined,
    staff_exact,
    staff_qed,
    staff_uncertain,
    staffing_cost,
    staffing_cost_real,
)
from .timevarying import (
    ConstantRate,
    OfferedLoad,
    PiecewiseConstantRate,
    RateFunction,
    SampledRate,
    SinusoidRate,
    StaffingSchedule,
    mol_schedule,
    offered_load,
    parse_rate,
    psa_schedule,
)

__version__ = "0.1.0"
