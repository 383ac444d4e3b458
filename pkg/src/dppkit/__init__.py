"""dppkit: exact finite-window computations for stationary determinantal
processes on the integer lattice induced by a [0,1]-valued symbol on the
circle - cylinder probabilities, mixing bounds, L^q-dimension estimates,
exact sampling, and the longest-common-substring growth experiment."""

from .symbol import (
    HypothesisError,
    Symbol,
    SymbolSpecError,
    TailDecay,
    TailSum,
    complement,
    contraction_margin,
    one_sidedness,
    symbol_from_json,
    tail_decay_exponent,
    tail_sum,
)
from .toeplitz import (
    LogDet,
    SzegoIntegral,
    build_T,
    build_T_window,
    build_lambda,
    hs_norm_sq_lambda,
    joint_window_block,
    log_det,
    szego_log_integral,
    trace_norm,
)
from .measure import (
    ConditioningError,
    NumericsError,
    PrefixState,
    RatioReport,
    conditional_next,
    correlation_ratio,
    cylinder_log_prob,
    cylinder_prob,
    joint_cylinder_log_prob,
    joint_cylinder_prob,
)
from .mixing import (
    FiniteWindowPsi,
    PsiBoundReport,
    SizeCapError,
    allones_lower_witness,
    psi_bound_report,
    psi_finite_window,
    psi_lower_bound,
    psi_upper_bound,
)
from .dimension import (
    DimensionEstimate,
    SNQTable,
    corr_dim_szego_lower,
    corr_dim_szego_upper,
    dim_q_estimate,
    s_n_q,
    s_n_q_table,
    sigma_n_2,
    sigma_n_q_walsh,
    submult_check,
)
from .sampler import BinarySequence, empirical_cylinder_test, sample_many, sample_prefix
from .lcs import LcsExperimentRow, lcs_length, lcs_length_dp, rate_experiment

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
