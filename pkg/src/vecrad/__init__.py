"""Vector-valued Rademacher/Gaussian complexity estimation and bound checking."""

from .bounds import (
    BoundReport,
    ChainRuleComponents,
    bound_composite,
    bound_mixed_lower,
    bound_mixed_mc,
    bound_mixed_small_p,
    bound_mixed_upper,
    bound_tracenorm,
    chain_rule_components,
    quotient_trace_vs_frobenius,
    risk_dominant_term,
)
from .classes import (
    Activation,
    CompositeSpec,
    MixedNormSpec,
    TraceNormSpec,
    apply_activation,
    dual_exponent,
    project_weights,
    sup_composite_given_w,
    sup_mixed_norm,
    sup_trace_norm,
    weight_norm,
)
from .datagen import SpectrumSpec, generate, load_dataset, save_dataset
from .estimators import (
    AscentConfig,
    McEstimate,
    estimate_composite_rademacher,
    estimate_gaussian_width,
    estimate_rademacher,
    exact_rademacher,
)
from .indexing import IndexMap, multicategory_map, multitask_map, one_vs_one_map, overlap_factor
from .linalg import (
    DataSample,
    SpectralSummary,
    empirical_covariance,
    largest_eigenvalue,
    spectral_norm,
    subset_covariance,
    subset_squared_norms,
    summarize_spectrum,
)
from .sampling import GaussMatrix, RngStream, SignMatrix, sample_gauss, sample_signs
from .verifiers import (
    CheckOutcome,
    MaxAffine,
    PsdCheckResult,
    check_contraction,
    check_matrix_concentration,
    check_moment_psd_ordering,
    check_szarek_lower,
    double_factorial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
