"""Power-normalized extreme-value laws, generalized log-Pareto distributions
and Hellinger/variational distance experiments between exact and limit laws
of power-normalized partial maxima."""

from .laws import (
    PMaxLawSpec,
    SupportInterval,
    NormingConstants,
    cdf,
    pdf,
    quantile,
    support,
    kth_limit_cdf,
    kth_limit_pdf,
    quantile_transform,
    neglog_cdf,
    x_from_neglog,
    hazard_w,
    p_type_apply,
    tabulated_norming,
    derive_norming,
    composed_neglog,
    composed_neglog_deriv,
    max_stability_residual,
)
from .glogpd import (
    GLogParetoSpec,
    VonMisesSpec,
    glogpd_support,
    glogpd_cdf,
    glogpd_pdf,
    glogpd_quantile,
    glogpd_from_pmax,
    vonmises_support,
    vonmises_cdf,
    vonmises_pdf,
    regain_glogpd,
    density_table,
)
from .quadrature import IntegrationResult, QuadratureError, integrate, cumulative_integrals, gamma_function
from .models import (
    DFHandle,
    law_handle,
    glogpd_handle,
    kth_limit_handle,
    vonmises_handle,
    perturbed_handle,
    normalized_handle,
    exact_max_handle,
    exact_kth_handle,
    PerturbedDensitySpec,
    EnvelopeCheckResult,
    build_perturbed,
    envelope_check,
    envelope_value,
    ExactMaxLaw,
    exact_max_cdf,
    exact_max_pdf,
    exact_kth_cdf,
    exact_kth_pdf,
    sample_top_k,
    sample_limit_top_k,
)
from .distances import (
    DistanceReport,
    BoundReport,
    hellinger,
    total_variation,
    kolmogorov,
    hellinger_upper_bound,
    top_k_variational_bound,
    hellinger_rate_bound,
    top_k_rate_bound,
    exact_vs_limit,
    resolve_norming,
)
from .experiments import (
    BaseConfig,
    ExperimentConfig,
    RateFit,
    RateRow,
    ExperimentResult,
    build_base,
    rate_experiment,
    fit_rate,
    report_emit,
    parse_report_csv,
    report_json_object,
    validate_report_json,
    DEFAULT_N_GRID,
)

__version__ = "0.1.0"
