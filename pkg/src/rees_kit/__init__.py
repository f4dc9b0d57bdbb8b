"""Defining ideals of Rees algebras of almost linearly presented height-two ideals.

Exact Groebner-basis tooling over Q and GF(p), pencil invariants of the
linear part, and two independent routes to the defining ideal (saturation of
the symmetric ideal and the case-by-case closed forms) that check each other.
"""

__version__ = "0.1.0"

from .groebner import GroebnerBasis, Ideal, buchberger, eliminate, reduce, s_polynomial
from .ideals import (colon, colon_element, dimension, fitting_ideal, gs_check, height,
                     intersect, min_prime_check, minor_ideal, radical_member, saturate)
from .instances import Instance, bundled, load_instance, random_instance, random_suite
from .pencil import Pencil, classify_phi_prime, pencil_from_matrix, pencil_invariants
from .rees import (BRANCHES, MethodMismatch, ReesError, ReesProblem, UnsupportedSubcase,
                   classify_case, defining_ideal, ideal_J, ideal_K, ideal_Kdoubleprime,
                   ideal_Kprime, jacobian_dual, normalize_shape, symbolic_square_K,
                   symmetric_ideal, validate_setting, verify_obs_colon)
from .ring import Field, MonomialOrder, PolyMatrix, Polynomial, RingContext, parse_poly

__all__ = [
    "BRANCHES", "Field", "GroebnerBasis", "Ideal", "Instance", "MethodMismatch", "MonomialOrder",
    "Pencil", "PolyMatrix", "Polynomial", "ReesError", "ReesProblem", "RingContext",
    "UnsupportedSubcase", "buchberger", "bundled", "classify_case", "classify_phi_prime", "colon",
    "colon_element", "defining_ideal", "dimension", "eliminate", "fitting_ideal", "gs_check",
    "height", "ideal_J", "ideal_K", "ideal_Kdoubleprime", "ideal_Kprime", "intersect",
    "jacobian_dual", "load_instance", "min_prime_check", "minor_ideal", "normalize_shape",
    "parse_poly", "pencil_from_matrix", "pencil_invariants", "radical_member", "random_instance",
    "random_suite", "reduce", "s_polynomial", "saturate", "symbolic_square_K", "symmetric_ideal",
    "validate_setting", "verify_obs_colon",
]
