"""Oscillator Lie groups with bi-invariant Lorentzian metrics.

Geodesics in closed form and by integration, cocompact lattice families
with exact membership, closed-geodesic classification on the compact
quotients, and the isometry/normalizer toolkit.
"""

from .algebra import (
    AlgebraVector,
    CausalClass,
    FrequencyList,
    bracket,
    causal_class,
    causal_quantity,
    gram_matrix,
    inner,
)
from .exact import ExactScalar, PI, PiPoly, as_exact, parse_exact, pi_poly_sign
from .geodesics import (
    Geodesic,
    causal_character,
    christoffel,
    christoffel_table_report,
    christoffel_tabulated,
    eval_geodesic,
    eval_geodesic_exact,
    eval_geodesic_velocity,
    geodesic_rhs,
    integrate_geodesic,
    integrate_geodesic_batch,
    metric_at,
    metric_matrix,
)
from .group import (
    ExactModeUnsupportedAngle,
    GroupElement,
    RotationMatrix,
    conjugate,
    invert,
    multiply,
    rotation,
)
from .isometries import (
    Composite,
    Inner,
    Inversion,
    IsotropyElement,
    LeftTranslation,
    ShapeMismatch,
    Theta,
    apply_isometry,
    aut_intersection_check,
    check_local_isometry,
    is_fiber_preserving,
    isotropy_matrix,
    psi_decompose,
    semidirect_product,
    structure_relations_check,
    theta_B,
    validate_theta,
)
from .lattices import (
    Dim4Family,
    Dim6Family,
    GeneratorList,
    LatticeProfile,
    LatticeSpec,
    MembershipUndecidable,
    ProductWithLine,
    Twisted,
    UnsupportedSpec,
    central_element,
    contains,
    profile,
    pure_t_element,
)
from .lattices import from_json as lattice_from_json
from .normalizers import (
    NormalizerTable,
    in_normalizer,
    normalizer_oracle,
    normalizer_table_report,
    printed_table_membership,
    verification_grid,
)
from .quotient import (
    CertificateVerificationFailed,
    ClosedGeodesicCertificate,
    LightlikeVerdict,
    ProductLineVerdict,
    classify_lightlike,
    closed_timelike_and_spacelike,
    product_line_lightlike,
    search_closed,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraVector",
    "CausalClass",
    "CertificateVerificationFailed",
    "ClosedGeodesicCertificate",
    "Composite",
    "Dim4Family",
    "Dim6Family",
    "ExactModeUnsupportedAngle",
    "ExactScalar",
    "FrequencyList",
    "GeneratorList",
    "Geodesic",
    "GroupElement",
    "Inner",
    "Inversion",
    "IsotropyElement",
    "LatticeProfile",
    "LatticeSpec",
    "LeftTranslation",
    "LightlikeVerdict",
    "MembershipUndecidable",
    "NormalizerTable",
    "PI",
    "PiPoly",
    "ProductLineVerdict",
    "ProductWithLine",
    "RotationMatrix",
    "ShapeMismatch",
    "Theta",
    "Twisted",
    "UnsupportedSpec",
    "apply_isometry",
    "as_exact",
    "aut_intersection_check",
    "bracket",
    "causal_character",
    "causal_class",
    "causal_quantity",
    "central_element",
    "check_local_isometry",
    "christoffel",
    "christoffel_table_report",
    "christoffel_tabulated",
    "classify_lightlike",
    "closed_timelike_and_spacelike",
    "conjugate",
    "contains",
    "eval_geodesic",
    "eval_geodesic_exact",
    "eval_geodesic_velocity",
    "geodesic_rhs",
    "gram_matrix",
    "in_normalizer",
    "inner",
    "integrate_geodesic",
    "integrate_geodesic_batch",
    "invert",
    "is_fiber_preserving",
    "isotropy_matrix",
    "lattice_from_json",
    "metric_at",
    "metric_matrix",
    "multiply",
    "normalizer_oracle",
    "normalizer_table_report",
    "parse_exact",
    "pi_poly_sign",
    "printed_table_membership",
    "product_line_lightlike",
    "profile",
    "psi_decompose",
    "pure_t_element",
    "rotation",
    "search_closed",
    "semidirect_product",
    "structure_relations_check",
    "theta_B",
    "validate_theta",
    "verification_grid",
    "__version__",
]
