"""Preference learning engine for dual-motor vibrotactile signals.

Learns a latent utility over a 4-parameter signal space (intensity, motor
balance, rhythm, grain) from pairwise A/B choices with confidence ratings,
selects maximally informative queries, and runs the full study protocol
(active learning, validation round, favorites) behind an HTTP API.
"""

from .acquisition import (
    AcquisitionConfig,
    QueryPair,
    choice_probability,
    eubo_score,
    information_gain,
    recommend,
    sample_candidates,
    select_pair,
)
from .prefmodel import (
    ComparisonRecord,
    FitConvergenceError,
    KernelConfig,
    LikelihoodConfig,
    MapResult,
    PreferencePosterior,
    effective_noise,
    fit_map,
    fit_posterior,
    kernel,
    kernel_matrix,
    laplace,
    log_posterior,
    posterior_cov,
    posterior_mean,
    predict,
    predict_pair,
)
from .session import (
    ProtocolError,
    SchemaVersionError,
    Session,
    SessionConfig,
    SessionLogError,
    ValidationSet,
    create_session,
    generate_validation_set,
    load_session,
    save_session,
)
from .signal import (
    DEFAULT_TOTAL_MS,
    MIN_GAP_MS,
    MIN_PULSE_MS,
    PARAM_RANGES,
    NormalizedPoint,
    Pulse,
    PulseTimeline,
    SignalParams,
    denormalize,
    motor_strengths,
    normalize,
    pulse_timing,
    render_pulse_train,
)
from .simulator import (
    GroundTruthUtility,
    SimulationConfig,
    SimulationTrace,
    oracle_respond,
    percentile_rank,
    random_gmm,
    run_simulation,
    spearman,
)

__version__ = "0.1.0"
