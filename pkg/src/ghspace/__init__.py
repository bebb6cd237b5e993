"""Exact computations on finite metric spaces in the Gromov-Hausdorff space."""

from .metric import (
    DistanceMatrix,
    PropertyReport,
    cayley_menger,
    codiameter,
    collinear_triples,
    components_at_scale,
    diameter,
    distance_set,
    is_totally_anisometric,
    isolation_profile,
    min_cayley_menger,
    property_report,
    validate,
)
from .gh import (
    Correspondence,
    GhResult,
    distortion,
    gh_exact,
    gh_local,
    gh_lower_bounds,
    gh_upper_permutation,
    glue,
    hausdorff,
)

__version__ = "0.1.0"
