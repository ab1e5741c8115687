"""Structural identifiability of linear compartmental models.

Two independent routes decide generic local identifiability: exact symbolic
Jacobian rank of the input-output coefficient map over a large prime field,
and combinatorial classifiers for directed-cycle graphs.  Closed-form
coefficient maps (cycle and catenary) and a spanning-forest formula provide
cross-checking oracles, and singular-locus polynomials are computed for
small identifiable models.
"""

__version__ = "0.1.0"

from .model import (
    CompartmentalModel,
    ParameterId,
    Shape,
    SymbolicMatrix,
    compartmental_matrix,
    make_model,
    parse_model,
    serialize_model,
    shape_of,
)
from .polynomial import Polynomial, elem_sym, eval_poly, parse_poly, poly_partial

__all__ = [
    "CompartmentalModel",
    "ParameterId",
    "Polynomial",
    "Shape",
    "SymbolicMatrix",
    "compartmental_matrix",
    "elem_sym",
    "eval_poly",
    "make_model",
    "parse_model",
    "parse_poly",
    "poly_partial",
    "serialize_model",
    "shape_of",
    "__version__",
]
