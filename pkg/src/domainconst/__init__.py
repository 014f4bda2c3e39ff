"""Numerical lower bounds and interval bounds for domain-dependent constants.

The Friedrichs-Velte, Babuska-Aziz, improved Poincare and Hardy constants of
planar domains are bounded from below by Rayleigh quotients on polynomial
trial spaces, and from above by closed-form inequalities propagated over
intervals.
"""

from .bounds import (ConstantSet, DomainFacts, Interval, avkhadiev_hardy_bounds,
                     cone_hardy_bound, facts_from_geometry, merge_overrides, omega, propagate,
                     star_poincare_bound)
from .errors import (ContradictionError, DomainConstError, DomainMembershipError, FormError,
                     GeometryError, IllConditionedBasisError, StarShapeError)
from .geometry import (Disc, Ellipse, Point2, Polygon, boundary_distance, convexity_check,
                       directional_boundary_distance, domain_from_dict, exterior_cone_angle,
                       l_shape, load_domain, mean_distance, rectangle, regular_polygon,
                       star_shape_analysis, unit_square)
from .harness import (CatalogEntry, VerificationReport, default_catalog, emit_report,
                      run_catalog, run_entry, run_property_checks)
from .quadrature import build_quadrature
from .spectral import (BasisSpec, RayleighEstimate, assemble_gram, convergence_study,
                       friedrichs_velte_estimate, hardy_estimate, improved_poincare_estimate)
from .eigen import sym_generalized_eigen_max

__version__ = "0.1.0"
