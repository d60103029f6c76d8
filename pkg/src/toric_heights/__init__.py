"""Exact tools for heights and point counts on split toric varieties over Q.

The modules build on each other: integer lattices and exact LP
(``lattice``, ``lp``), cones and fans, rational functions with linear
denominators and X-functions of cones, the Picard lattice with the
invariants a(L) and b(L), heights of torus points, and finally local zeta
factors, counting and exponent fitting.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .cones import Cone, dual_cone, is_regular, minimal_face, triangulate
from .counting import (CountRow, CountTable, PoleData, count_points, count_table,
                       fit_exponents, local_zeta_factor, local_zeta_truncated,
                       tauberian_constant, zeta_partial_sum)
from .errors import ToricError
from .fans import Fan, PLFunction, anticanonical_function, evaluate_pl, is_projective, validate_fan
from .heights import TorusPoint, global_height, valuation_vector
from .picard import anticanonical_class, effective_cone, line_bundle_data, picard_lattice
from .ratfun import MultiPoly, RatFunc, principal_coefficient, principal_part, residue_descent
from .xfun import XFunction, numeric_x, x_function, x_function_image, x_function_projected

__all__ = [
    "Cone", "dual_cone", "is_regular", "minimal_face", "triangulate",
    "CountRow", "CountTable", "PoleData", "count_points", "count_table", "fit_exponents",
    "local_zeta_factor", "local_zeta_truncated", "tauberian_constant", "zeta_partial_sum",
    "ToricError", "Fan", "PLFunction", "anticanonical_function", "evaluate_pl",
    "is_projective", "validate_fan", "TorusPoint", "global_height", "valuation_vector",
    "anticanonical_class", "effective_cone", "line_bundle_data", "picard_lattice",
    "MultiPoly", "RatFunc", "principal_coefficient", "principal_part", "residue_descent",
    "XFunction", "numeric_x", "x_function", "x_function_image", "x_function_projected",
]
