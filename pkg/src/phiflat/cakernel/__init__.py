"""Exact polynomial arithmetic and Groebner bases over QQ."""
from .poly import Poly, PolyRing, QuotientRing, make_ring, parse_poly, fmt_rational, monomial_order
from .ideals import (
    FreeSubmodule,
    Ideal,
    colon,
    eliminate,
    exact_divide,
    groebner_basis,
    ideal,
    intersect,
    intersect_ideals,
    is_nonzerodivisor,
    lift,
    module_kernel,
    normal_form,
    preimage,
    radical_member,
    reduced_basis,
    saturate,
    syzygies,
    syzygies_of,
    unit_vector,
)

__all__ = [
    "Poly", "PolyRing", "QuotientRing", "make_ring", "parse_poly", "fmt_rational",
    "monomial_order", "FreeSubmodule", "Ideal", "colon", "eliminate", "exact_divide",
    "groebner_basis", "ideal", "intersect", "intersect_ideals", "is_nonzerodivisor",
    "lift", "module_kernel", "normal_form", "preimage", "radical_member",
    "reduced_basis", "saturate", "syzygies", "syzygies_of", "unit_vector",
]
