"""Substitution matrices built from labelled graph classes.

A class of connected structures with c_m of them on m points assembles into
set-partition counts: entry (n, k) of its matrix is the partial Bell
polynomial B_{n,k}(c), the number of structures on n points with k
components.  With c_1 = 1 this is exactly the matrix of the substitution
phi_c = sum c_m z^m/m!, which the brute-force oracles here cross-check for
equivalence relations and idempotent endofunctions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from operator import index
from typing import Iterable

from .errors import DomainError, OrderMismatchError, ResourceLimitError
from .partitions import enum_partitions
from .riordan import TriMatrix
from .series import Series

EQUIVALENCE_GUARD = 10
IDEMPOTENT_GUARD = 7


@dataclass(frozen=True)
class ConnectedCounts:
    """Counts c_1..c_N of connected structures on m labelled points."""

    counts: tuple[int, ...]

    def __post_init__(self):
        try:
            coerced = tuple(index(v) for v in self.counts)
        except TypeError as e:
            raise DomainError("connected counts must be integers") from e
        if any(v < 0 for v in coerced):
            raise DomainError("connected counts must be non-negative")
        object.__setattr__(self, "counts", coerced)

    @classmethod
    def of(cls, counts: Iterable[int]) -> "ConnectedCounts":
        return cls(tuple(counts))

    @classmethod
    def equivalence_relations(cls, length: int) -> "ConnectedCounts":
        """One connected structure per point set: a single block."""
        return cls((1,) * length)

    @classmethod
    def idempotent_endofunctions(cls, length: int) -> "ConnectedCounts":
        """c_m = m: a connected idempotent graph is a point set mapped onto
        one chosen fixed point."""
        return cls(tuple(range(1, length + 1)))

    def phi(self) -> Series:
        """The substitution series sum c_m z^m/m!."""
        return Series([0] + list(self.counts))


def matrix_from_connected_counts(c: ConnectedCounts, n: int) -> TriMatrix:
    """Matrix with entries B_{n,k}(c): structures on n points having exactly
    k components.  Unitriangular, which pins c_1 = 1 (a lone point must
    carry exactly one connected structure)."""
    if n < 1:
        raise DomainError("matrix size must be >= 1")
    if n >= 2 and (not c.counts or c.counts[0] != 1):
        raise DomainError("unitriangular matrix needs c_1 = 1")
    if n - 1 > len(c.counts):
        raise OrderMismatchError(
            f"size {n} needs counts up to c_{n - 1}, have {len(c.counts)}"
        )
    b = [[0] * n for _ in range(n)]
    b[0][0] = 1
    for i in range(1, n):
        for k in range(1, i + 1):
            b[i][k] = sum(
                comb(i - 1, m - 1) * c.counts[m - 1] * b[i - m][k - 1]
                for m in range(1, i - k + 2)
            )
    rows = tuple(tuple(Fraction(b[i][k]) for k in range(i)) for i in range(n))
    return TriMatrix(n, rows)


def oracle_equivalence(n: int, guard: int = EQUIVALENCE_GUARD) -> dict[int, int]:
    """Partitions of [1..n] tallied by block count, by direct enumeration."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > guard:
        raise ResourceLimitError(f"equivalence oracle capped at n <= {guard}")
    out: dict[int, int] = {}
    for p in enum_partitions(n):
        out[p.block_count] = out.get(p.block_count, 0) + 1
    return out


def oracle_idempotent(n: int, guard: int = IDEMPOTENT_GUARD) -> dict[int, int]:
    """Idempotent endofunctions of [1..n] tallied by number of weakly
    connected components of the functional graph.  Scans all n^n maps."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > guard:
        raise ResourceLimitError(f"idempotent oracle capped at n <= {guard}")
    out: dict[int, int] = {}
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in product(range(n), repeat=n):
        if any(f[f[i]] != f[i] for i in range(n)):
            continue
        for i in range(n):
            parent[i] = i
        for i in range(n):
            ri, rf = find(i), find(f[i])
            if ri != rf:
                parent[ri] = rf
        k = sum(1 for i in range(n) if find(i) == i)
        out[k] = out.get(k, 0) + 1
    return out
