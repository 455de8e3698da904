"""Exact linear algebra over Z, Z/n, F_p and F_p[x]."""

from .matrix import Mat, block_diag, kron_identity
from .normalforms import (
    Submodule,
    determinant,
    echelon,
    hermite_form,
    invariant_factors,
    kernel_rows,
    preimage,
    quotient_order,
    smith_form,
    solve_linear,
    sub_intersection,
    sub_leq,
    sub_membership,
    sub_sum,
)
from .rings import (
    INFINITE,
    element_from_json,
    element_to_json,
    format_poly,
    ZZ,
    Integers,
    IntegersMod,
    Poly,
    PolynomialsOverPrimeField,
    PrimeField,
    RingDescriptor,
)

__all__ = [
    "INFINITE",
    "element_from_json",
    "element_to_json",
    "format_poly",
    "ZZ",
    "Integers",
    "IntegersMod",
    "Mat",
    "Poly",
    "PolynomialsOverPrimeField",
    "PrimeField",
    "RingDescriptor",
    "Submodule",
    "block_diag",
    "determinant",
    "echelon",
    "hermite_form",
    "invariant_factors",
    "kernel_rows",
    "kron_identity",
    "preimage",
    "quotient_order",
    "smith_form",
    "solve_linear",
    "sub_intersection",
    "sub_leq",
    "sub_membership",
    "sub_sum",
]
