"""Numerical laboratory for sharp space-time estimates of the cubic
dispersive flow: extension operators, mixed-norm functionals, the
compactness-threshold constant, concentration experiments, dyadic
diagnostics, and trial-function optimization."""

__version__ = "0.1.0"

from .core import (
    DomainError,
    EmptyFamily,
    ExponentTriple,
    FreqGrid,
    FreqProfile,
    GridAsymmetry,
    GridMismatch,
    NonFiniteObjective,
    PreconditionViolation,
    SingularPoint,
    SpaceTimeField,
    SpaceTimeGrid,
    SupportOverlap,
    SupportViolation,
    WindowOverflow,
    bump_profile,
    centered_grid,
    gaussian_profile,
    l2_mass,
    make_exponents,
    random_profile,
    read_profile_csv,
    symmetric_grid,
    write_field_csv,
    write_profile_csv,
)
from .constants import APValue, a_p_closed_form, a_p_quadrature, compute_ap, cosine_average, phi_q
from .norms import airy_quotient, mixed_norm, mixed_norm_power, mixed_triangle_check, schrodinger_quotient
from .propagators import (
    SymmetryElement,
    airy_extension,
    apply_symmetry,
    approx_extension,
    restrict_frequency,
    schrodinger_extension,
    symmetrize_real,
)
from .bubbles import (
    aligned_bubble_grid,
    bubble_sweep,
    homogenized_mixed_norm,
    single_bubble,
    two_bubble,
)
from .dyadic import DyadicInterval, Parallelogram, bilinear_ratio, lemma34_check, parallelogram_overlap, refined_functional, refined_ratio, sim_related
from .smoothing import conjugate_root, f_delta, local_smoothing_value, schur_sup_bound
from .maximize import (
    AscentConfig,
    ThresholdReport,
    ascend,
    gaussian_trial_value,
    quotient_gradient,
    quotient_value,
    threshold_report,
)
