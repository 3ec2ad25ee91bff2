"""Exact integer arithmetic in cyclotomic fields.

Sums of roots of unity are represented by integer exponent-count vectors:
``counts[m]`` copies of ``exp(2*pi*1j*m/order)``.  Whether such a sum is
exactly zero is decided by reducing the polynomial ``sum counts[m] x^m``
modulo the cyclotomic polynomial of the given order, entirely over the
integers.  No floating-point zero test is involved.
"""

from __future__ import annotations

import cmath
import functools
import math


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(order: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the cyclotomic polynomial of ``order``.

    Computed by exact division: x^n - 1 divided by the product of the
    cyclotomic polynomials of all proper divisors of n.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order == 1:
        return (-1, 1)
    num = [0] * (order + 1)
    num[0] = -1
    num[order] = 1
    for d in range(1, order):
        if order % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials; raises if a remainder is left."""
    num = list(num)
    while den and den[-1] == 0:
        den.pop()
    dn = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        coeff = num[i]
        if coeff == 0:
            continue
        q, r = divmod(coeff, lead)
        if r != 0:
            raise ArithmeticError("non-exact polynomial division")
        out[i - dn] = q
        for j, c in enumerate(den):
            num[i - dn + j] -= q * c
    if any(num):
        raise ArithmeticError("non-zero remainder in exact polynomial division")
    return out


def reduce_root_counts(counts, order: int) -> tuple[int, ...]:
    """Remainder of ``sum counts[m] x^m`` modulo the order-th cyclotomic polynomial."""
    if len(counts) != order:
        raise ValueError("counts must have one slot per residue")
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    rem = [int(c) for c in counts]
    for i in range(len(rem) - 1, deg - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        # phi is monic, so the reduction stays integral
        for j in range(deg + 1):
            rem[i - deg + j] -= c * phi[j]
    return tuple(rem[:deg])


def root_sum_is_zero(counts, order: int) -> bool:
    """Exact test: does ``sum counts[m] exp(2 pi i m / order)`` vanish?"""
    return all(c == 0 for c in reduce_root_counts(counts, order))


def root_sum_value(counts, order: int) -> complex:
    """Floating-point value of the root-of-unity sum (for reporting only)."""
    return sum(
        int(c) * cmath.exp(2j * math.pi * m / order)
        for m, c in enumerate(counts)
        if c
    )
