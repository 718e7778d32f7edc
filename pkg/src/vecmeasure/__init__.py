"""Total variation and range of finitely atomic vector measures.

Exact masses under arbitrary seminorms, ranges as zonotopes, anisotropic
perimeters, zonal representations of norms, and convergence diagnostics
for sequences of measures.
"""

from .errors import (
    DimError,
    EmptyBody,
    InputError,
    NoCertificate,
    NoConvergence,
    NotANorm,
    NotContained,
    TooManyAtoms,
    UnknownScenario,
    VecMeasureError,
    WrongKind,
)
from .geometry import (
    ConvexPolygon,
    directed_hausdorff,
    hausdorff_distance,
    point_to_convex_distance,
    support,
)
from .measures import (
    ALL,
    MeasurableSet,
    VectorMeasure,
    add,
    dual_certificate,
    projected_variation,
    pushforward,
    range_of,
    restrict,
    scale,
    total_variation,
    tv_bruteforce_oracle,
)
from .norms import (
    Euclidean,
    Lp,
    Polygonal,
    Seminorm,
    SumOfCircles,
    ZonalMeasure,
    dual_eval,
    is_strictly_convex,
    strict_convexity_probe,
    validate_zonal,
    zonal_approx_2d,
    zonal_euclidean,
    zonal_from_polygonal_2d,
)
from .zonotopes import (
    Zonotope,
    contains_2d,
    crofton_perimeter,
    mass_perimeter_identity_check,
    minkowski_sum,
    perimeter,
    perimeter_monotonicity_check,
    vertices_2d,
)

__version__ = "0.1.0"
