"""fraclab: fractional Laplacians on weighted spectral models.

Kernels and killing terms of A^s by certified singular quadrature, stable
subordination, conservation and uniqueness diagnostics, and the associated
pure-jump processes with exact-law Monte Carlo validation.
"""

from .errors import (
    ConfigError,
    DiagonalPairError,
    FraclabError,
    IllConditionedCheckError,
    InvalidParameterError,
    QuadratureError,
    UnsupportedModelError,
    UnsupportedOrderError,
)
from .fields import (
    FractionalField,
    apply_bochner,
    apply_jump_part,
    apply_spectral,
    decomposition_residual,
    energy_form,
    fractional_field,
    hyperbolic3_heat_kernel,
    hyperbolic3_jump_kernel,
    hyperbolic3_mass,
    jump_kernel,
    jump_kernel_matrix,
    killing_term,
    sobolev_norm,
    zero_mean_terms,
)
from .jumps import (
    JumpGenerator,
    OccupationStats,
    PathSample,
    build_generator,
    jump_probability_check,
    simulate,
    simulate_path,
)
from .models import (
    HeatMassProfile,
    SpectralModel,
    build_circle,
    build_dirichlet_interval,
    build_graph,
    build_neumann_interval,
    heat_kernel,
    mass_profile,
    model_from_config,
    model_operator,
    model_summary,
    random_field,
    spectral_bottom,
    theta_infinity,
)
from .quadrature import (
    QuadratureResult,
    laplace_integrate,
    mellin_integrate,
    power_identity_residual,
    sigma_prefactor,
)
from .reports import CheckReport, ParabolicTrace, Residual, make_report, residual
from .semigroups import (
    ContractionReport,
    conservation_defect,
    contraction_report,
    resolvent_apply,
    smoothing_constant,
    subordinate_apply,
    subordinate_heat_kernel,
    subordinate_threshold,
)
from .subordinator import (
    TailEnvelope,
    half_stable_closed_form,
    laplace_residual,
    laplace_transform,
    stable_density,
    tail_envelope,
    tail_mass,
)
from .checks import (
    SUITES,
    check_conservativeness_equivalence,
    check_elliptic_uniqueness,
    check_generalized_conservation,
    check_long_time_rate,
    check_pairing_identity,
    check_parabolic_uniqueness,
    check_resolvent_conservation,
    check_resolvent_minimality,
    check_small_time_offdiagonal,
    check_varadhan,
    parabolic_trace,
    run_suite,
)
from .zoo import default_zoo

__version__ = "0.1.0"
