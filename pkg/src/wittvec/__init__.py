"""Arithmetic in truncated p-typical Witt vectors W_n(F_q[X1..Xm])."""

from .errors import (ArityMismatch, ContextMismatch, DivisionByZero, InvalidParameter,
                     NotAPthPower, NotDivisible, ParseError, WittError)
from .field import FqElement, FqField, find_irreducible, is_irreducible, is_prime
from .galois import GaloisRing, GrElement
from .naive import NaivePolyTable, build_table, count_monomials
from .poly import (ZZ, Poly, monomial_p_valuation, poly_evaluate, poly_exact_div_p,
                   poly_frobenius, poly_inv_frobenius, poly_lift, poly_mul, poly_pow,
                   poly_project)
from .witt import (Backend, GhostTuple, WittContext, WittVector, format_witt, ghost_components,
                   ghost_inverse, illusie_lift, illusie_unlift, is_in_illusie_image, parse_witt,
                   random_witt, teichmueller, verschiebung, witt_add, witt_frobenius, witt_mul,
                   witt_neg, witt_one, witt_op, witt_sub, witt_zero)

__all__ = [
    "ArityMismatch", "ContextMismatch", "DivisionByZero", "InvalidParameter", "NotAPthPower",
    "NotDivisible", "ParseError", "WittError",
    "FqElement", "FqField", "find_irreducible", "is_irreducible", "is_prime",
    "GaloisRing", "GrElement",
    "NaivePolyTable", "build_table", "count_monomials",
    "ZZ", "Poly", "monomial_p_valuation", "poly_evaluate", "poly_exact_div_p", "poly_frobenius",
    "poly_inv_frobenius", "poly_lift", "poly_mul", "poly_pow", "poly_project",
    "Backend", "GhostTuple", "WittContext", "WittVector", "format_witt", "ghost_components",
    "ghost_inverse", "illusie_lift", "illusie_unlift", "is_in_illusie_image", "parse_witt",
    "random_witt", "teichmueller", "verschiebung", "witt_add", "witt_frobenius", "witt_mul",
    "witt_neg", "witt_one", "witt_op", "witt_sub", "witt_zero",
]
