"""Volumetric moments of random simplices in convex polytopes.

Even moments are exact rationals.  Odd moments come from an integral over
cutting hyperplanes whose integrand is exact per hyperplane, integrated by
tanh-sinh or Gauss-Legendre quadrature.  A Monte Carlo oracle, a symmetry
based configuration enumerator and a catalog of solids complete the set.
"""

from .rational import Rational, format_rational, parse_rational
from .polytope import (
    DegenerateError,
    Halfspace,
    Hyperplane,
    Polytope,
    Simplex,
    UnboundedError,
    hrep_from_vrep,
    monomial_moment,
    section_chart,
    slice_polytope,
    triangulate,
    volume,
    vrep_from_hrep,
)
from .lp import EmptyRegionError, LinearInequality, interior_point, strict_feasible
from .symmetry import (
    Configuration,
    Genealogy,
    SymmetryGroup,
    VertexPermutation,
    build_genealogy,
    enumerate_configurations,
    export_dot,
    group_closure,
    orbit,
)
from .moments import (
    CapacityError,
    ClosedFormValue,
    ball_mean,
    ball_moment,
    buchta_lift,
    even_moment,
    iota,
    segment_moment,
    square_moment,
    triangle_moment,
    zeta,
)
from .quadrature import QuadratureSpec
from .section import (
    OddMomentEstimate,
    config_contribution,
    integrand,
    odd_moment,
    transform_domain,
)

__version__ = "0.1.0"

__all__ = [
    "EmptyRegionError",
    "LinearInequality",
    "interior_point",
    "strict_feasible",
    "CapacityError",
    "ClosedFormValue",
    "Configuration",
    "DegenerateError",
    "Genealogy",
    "Halfspace",
    "Hyperplane",
    "OddMomentEstimate",
    "Polytope",
    "QuadratureSpec",
    "Rational",
    "Simplex",
    "SymmetryGroup",
    "UnboundedError",
    "VertexPermutation",
    "ball_mean",
    "ball_moment",
    "buchta_lift",
    "build_genealogy",
    "config_contribution",
    "enumerate_configurations",
    "even_moment",
    "export_dot",
    "format_rational",
    "group_closure",
    "hrep_from_vrep",
    "integrand",
    "iota",
    "monomial_moment",
    "odd_moment",
    "orbit",
    "parse_rational",
    "section_chart",
    "segment_moment",
    "slice_polytope",
    "square_moment",
    "transform_domain",
    "triangle_moment",
    "triangulate",
    "volume",
    "vrep_from_hrep",
    "zeta",
]
