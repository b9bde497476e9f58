"""Numerical laboratory for random sphere graphs and Ramsey lower-bound
diagnostics: cap thresholds, threshold constants, perfect-sequence spectra,
Monte Carlo estimators, certificate search, and the first-moment baseline."""

from .constants import (
    RamseyConfig,
    ThresholdConstants,
    hazard_mu,
    normal_cdf,
    normal_quantile,
    select_p_star,
    solve_p_C,
    threshold_constants,
)
from .errors import (
    DomainError,
    InfeasibleParametersError,
    RejectionExhaustedError,
    ResourceLimitError,
    SingularSequenceError,
    SphereRamseyError,
)
from .geometry import (
    CapThreshold,
    Subspace,
    cap_probability,
    gap_coefficient,
    project,
    projection_norm_tail,
    sample_unit_vector,
    sample_unit_vectors,
    shifted_cap_check,
    solve_cap_threshold,
    verify_cpk_asymptotic,
)
from .graph import (
    CliqueWitness,
    SphereGraph,
    UnionBoundReport,
    build_graph,
    certify_lower_bound,
    find_mono_clique,
    union_bound_report,
)
from .mc import MCEstimate, PredictionComparison, substream
from .sequences import (
    NonPerfectProfile,
    PerfectVerdict,
    SequenceDecomposition,
    basis_alignment,
    corner_coordinates,
    dual_basis,
    faithful_reorder,
    is_perfect,
    non_perfect_index,
    spectral_diagnostics,
)
from .baseline import BaselineResult, beta_C, erdos_bound, improvement_ratio, p_drift_check
from .estimators import (
    estimate_clique_prob,
    estimate_coefficient_mean,
    estimate_kappa,
    estimate_projection_inner,
    estimate_Q,
    exact_pair_region_prob,
    hatz_uniformity_test,
    perfect_fraction,
)
from .regions import sample_in_region
from .verify import verify_suite

__version__ = "0.1.0"
