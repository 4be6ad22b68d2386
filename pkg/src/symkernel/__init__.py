"""Heat kernels on symmetric spaces.

The pipeline: build the curvature algebra of a symmetric space from its
Riemann tensor, attach a fiber representation, generate heat-kernel
coefficients by Gaussian averaging over the holonomy directions, and
evaluate exact diagonals on rank-one factors with independent spectral
cross-checks. A Dirac index layer sits on top of the spinor bundle.
"""

from .curvature import (
    CurvatureAlgebra,
    RiemannData,
    ValidationReport,
    algebra_from_dict,
    algebra_to_dict,
    assemble,
    flat_riemann,
    hyperbolic_riemann,
    pair_basis,
    product_riemann,
    riemann_from_dict,
    riemann_to_dict,
    sphere_riemann,
    sphere_volume,
    spectral_split,
    validate,
)
from .diagonal import (
    DiagonalResult,
    diagonal,
    heat_trace,
    hyperbolic_weight_plancherel,
    sphere_harmonic_oracle,
    sphere_weight_spectrum,
)
from .dirac import (
    IndexResult,
    chirality_matrix,
    dirac_index,
    dirac_square_terms,
    graded_heat_trace,
    index_from_coefficients,
)
from .errors import (
    BadAbelianField,
    BadParams,
    DegenerateSplit,
    MixedContourUnsupported,
    NotClosed,
    NotCompact,
    NotInteger,
    PoleHit,
    QuadratureNotConverged,
    RepresentationBroken,
    SymkernelError,
    SymmetryViolation,
    TailTooLarge,
    TruncationOverflow,
    Unsupported,
)
from .gaussian import (
    HeatExpansion,
    MomentEngine,
    bernoulli_numbers,
    heat_coefficients,
    log_sinhc_coefficients,
)
from .representations import (
    FiberRep,
    abelian_field,
    casimir,
    check_representation,
    clifford_gammas,
    gauge_curvature,
    holonomy_from_gauge,
    product_rep,
    rep_from_dict,
    rep_to_dict,
    represent,
    scalar_rep,
    spinor_rep,
    vector_rep,
    weight_rep,
)

__version__ = "0.1.0"

__all__ = [
    "BadAbelianField",
    "BadParams",
    "CurvatureAlgebra",
    "DegenerateSplit",
    "DiagonalResult",
    "FiberRep",
    "HeatExpansion",
    "IndexResult",
    "MixedContourUnsupported",
    "MomentEngine",
    "NotClosed",
    "NotCompact",
    "NotInteger",
    "PoleHit",
    "QuadratureNotConverged",
    "RepresentationBroken",
    "RiemannData",
    "SymkernelError",
    "SymmetryViolation",
    "TailTooLarge",
    "TruncationOverflow",
    "Unsupported",
    "ValidationReport",
    "abelian_field",
    "algebra_from_dict",
    "algebra_to_dict",
    "assemble",
    "bernoulli_numbers",
    "casimir",
    "check_representation",
    "chirality_matrix",
    "clifford_gammas",
    "diagonal",
    "dirac_index",
    "dirac_square_terms",
    "flat_riemann",
    "gauge_curvature",
    "graded_heat_trace",
    "heat_coefficients",
    "heat_trace",
    "holonomy_from_gauge",
    "hyperbolic_riemann",
    "hyperbolic_weight_plancherel",
    "index_from_coefficients",
    "log_sinhc_coefficients",
    "pair_basis",
    "product_rep",
    "product_riemann",
    "rep_from_dict",
    "rep_to_dict",
    "represent",
    "riemann_from_dict",
    "riemann_to_dict",
    "scalar_rep",
    "spectral_split",
    "sphere_harmonic_oracle",
    "sphere_riemann",
    "sphere_volume",
    "sphere_weight_spectrum",
    "spinor_rep",
    "validate",
    "vector_rep",
    "weight_rep",
]
