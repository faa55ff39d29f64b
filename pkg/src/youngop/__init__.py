"""Matrix means and certified refinements/reverses of Young's inequality.

The hot kernels (cyclic Jacobi and the scaled Young gap) are compiled with
numba; set ``YOUNGOP_DISABLE_JIT=1`` before import to use the pure-numpy
versions instead.
"""
from ._jit import HAVE_NUMBA, JIT_ENABLED
from .errors import (
    DimLimitExceeded,
    DimMismatch,
    DomainViolation,
    InvalidCondition,
    InvalidWindow,
    NonConvergence,
    NonPositiveInput,
    NotPositiveDefinite,
    NoWitnessFound,
    WindowViolation,
    YoungOpError,
)
from .funcspec import FunctionSpec
from .functional_bounds import (
    curvature_bounds_power,
    exp_spec,
    log_bounds,
    neg_log_spec,
    power_bounds,
    power_spec,
    square_spec,
    thm41_bounds,
    thm42_bounds,
)
from .operator_young import (
    BoundReport,
    SandwichCondition,
    SpectrumWindow,
    amgm_report,
    arith_mean,
    cor31_bounds,
    extremize_fminmax,
    f_mean,
    fmin_fmax,
    geom_mean,
    spectrum_window,
    thm31_bounds,
    thm32_bounds,
    thm33_bounds,
    thmA_bounds,
    thmB_bounds,
    window_from_sandwich,
)
from .scalar_young import (
    ScalarBoundFamily,
    ScalarBoundResult,
    WeightSplit,
    evaluate_family,
    kantorovich,
    lemma21_bounds,
    midpoint_bounds,
    specht_ratio,
    surface_values,
    young_gap,
    young_ratio,
)
from .symcalc import (
    LoewnerMargin,
    SpdMatrix,
    SpectralDecomposition,
    SymMatrix,
    apply_scalar_fn,
    congruence,
    contraction,
    eigen_sym,
    loewner_cmp,
    mat_abs,
    mat_exp,
    mat_log,
    mat_power,
    spd_inv_sqrt,
    spd_sqrt,
)
from .verify import (
    GeneratorConfig,
    SuiteResult,
    nonordering_search,
    random_sandwich_pair,
    random_spd,
    run_suite,
)

__version__ = "0.1.0"
