"""First-order differential operators behind matrix logarithms.

The log of a substitution-with-prefunction matrix acts on EGF coefficient
vectors the way q(z) d/dz + v(z) acts on series: v is read off by applying
the matrix to the constant series 1, q by applying it to z.  The finite-q
probe q (M^{1/q} - I) realizes the same generator as a limit, which makes
the convergence claim itself testable in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator

from .errors import DomainError, OrderMismatchError
from .riordan import (
    LowerMatrix,
    RiordanPair,
    TriMatrix,
    fractional_power,
    is_substitution_with_prefunction,
    matrix_from_pair,
    tri_log,
)
from .series import Series


@dataclass(frozen=True)
class VectorFieldOp:
    """Operator f -> q * f' + v * f in the tangent space of the unipotent
    group: q vanishes to order 2 and v to order 1, so the matrix of the
    operator is strictly lower triangular."""

    q: Series
    v: Series

    def __post_init__(self):
        if self.q.order != self.v.order:
            raise OrderMismatchError("operator components need equal orders")
        if self.q.order < 1:
            raise DomainError("operator needs order >= 1")
        if self.v[0] != 0 or self.q[0] != 0 or self.q[1] != 0:
            raise DomainError("tangent operator needs q = O(z^2) and v = O(z)")


def generator(m: TriMatrix) -> LowerMatrix:
    """The limit of q (M^{1/q} - I) as q grows, realized exactly as log m.

    Restricted to the substitution-with-prefunction group, where the result
    decomposes as a vector field plus a scalar field."""
    if not is_substitution_with_prefunction(m):
        raise DomainError("matrix is outside the substitution-with-prefunction group")
    return tri_log(m)


def generator_probe(m: TriMatrix, q: int) -> LowerMatrix:
    """Finite-q stage q (M^{1/q} - I) of the generator limit; the distance
    to log m shrinks like 1/q entrywise."""
    if q < 1:
        raise DomainError("probe parameter must be a positive integer")
    return fractional_power(m, Fraction(1, q)).minus_identity().scale(q)


def operator_matrix(op: VectorFieldOp, n: int) -> LowerMatrix:
    """Matrix of q d/dz + v on EGF coefficients, n x n.

    Column k collects q z^{k-1}/(k-1)! + v z^k/k!, so the entry (i, k) is
    C(i, k-1) q_{i-k+1} + C(i, k) v_{i-k}."""
    if n < 1:
        raise DomainError("matrix size must be >= 1")
    if n - 1 > op.q.order:
        raise OrderMismatchError(
            f"size {n} needs operator order >= {n - 1}, have {op.q.order}"
        )
    rows = []
    for i in range(n):
        row = []
        for k in range(i):
            val = comb(i, k) * op.v[i - k]
            if k >= 1:
                val += comb(i, k - 1) * op.q[i - k + 1]
            row.append(val)
        rows.append(tuple(row))
    return LowerMatrix(n, tuple(rows))


def decompose_operator(l: LowerMatrix) -> VectorFieldOp:
    """Split a generator into (q, v): v is l applied to 1 (column 0), q is
    l applied to z minus z times v.  The candidate is checked by rebuilding
    the matrix; a mismatch means l is not of the form q d/dz + v."""
    if l.size < 2:
        raise DomainError("decomposition needs size >= 2 to probe with z")
    v = Series([l.entry(i, 0) for i in range(l.size)])
    lz = Series([l.entry(i, 1) for i in range(l.size)])
    op = VectorFieldOp(lz - v.shift_mul_z(), v)
    if operator_matrix(op, l.size) != l:
        raise DomainError("matrix is not of the form q*d/dz + v")
    return op


def vector_field_table(phi: Series, n: int) -> Series:
    """Vector field q of the pure substitution matrix of phi at size n,
    in EGF coefficients (q has order n - 1).  The scalar part is zero for
    pure substitutions, so q alone carries the generator."""
    if phi.order < 1 or phi[0] != 0 or phi[1] != 1:
        raise DomainError("substitution needs phi = z + higher terms")
    m = matrix_from_pair(RiordanPair(Series.one(phi.order), phi), n)
    return decompose_operator(tri_log(m)).q


def field_rows(q: Series) -> Iterator[tuple]:
    """CSV rows (n, egf_coeff, taylor_coeff) for a vector field series."""
    for i, (a, t) in enumerate(zip(q.coeffs, q.taylor())):
        yield i, str(a), str(t)
