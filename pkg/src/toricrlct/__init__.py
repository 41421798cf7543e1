"""Toric resolution of singularities and learning coefficients.

Exact lattice and cone algorithms (Hermite/Smith forms, double description,
Hilbert bases), Laurent polynomials with Newton polytopes, a script-driven
resolution driver, pole extraction for the zeta function of a Kullback
distance, and a quadrature cross-check.
"""

from .cones import Cone, Fan, NotPointedError, cone_isomorphism, dual_cone, fan_validate
from .hilbert import hilbert_basis, monoid_membership, triangulate
from .kernels import BACKEND
from .parser import PolynomialSyntaxError, parse
from .polynomial import LaurentPolynomial, newton_polytope, substitute_monomial, toric_ideal_basis
from .resolution import ResolutionStep, resolve, suggest_map
from .rlct import aggregate, chart_poles, learning_curve, stochastic_complexity_bound

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cone",
    "Fan",
    "LaurentPolynomial",
    "NotPointedError",
    "PolynomialSyntaxError",
    "ResolutionStep",
    "aggregate",
    "chart_poles",
    "cone_isomorphism",
    "dual_cone",
    "fan_validate",
    "hilbert_basis",
    "learning_curve",
    "monoid_membership",
    "newton_polytope",
    "parse",
    "resolve",
    "stochastic_complexity_bound",
    "substitute_monomial",
    "suggest_map",
    "toric_ideal_basis",
    "triangulate",
]
