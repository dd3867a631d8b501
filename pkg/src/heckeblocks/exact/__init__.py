"""Exact algebra: polynomials, rational functions and Laurent matrices."""

from .poly import EMPTY, Polynomial, Scalar, VarTable, VarTableMismatch, format_scalar, poly_arith, ring
from .ratfunc import RationalFunction, ratfunc_eq
from .laurent import PGL2, SL2, FlavorMismatch, LaurentPolynomial, ProjectiveLaurentMatrix, laurent_mat_mul, regularity

__all__ = [
    "EMPTY",
    "FlavorMismatch",
    "LaurentPolynomial",
    "PGL2",
    "ProjectiveLaurentMatrix",
    "SL2",
    "laurent_mat_mul",
    "regularity",
    "Polynomial",
    "RationalFunction",
    "Scalar",
    "VarTable",
    "VarTableMismatch",
    "format_scalar",
    "poly_arith",
    "ratfunc_eq",
    "ring",
]
