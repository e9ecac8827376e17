"""Set partitions, their intersection diagrams, and the diagram expansion of
the Hadamard product of two free exponentials.

A pair of partitions of [1..n] meets in a matrix of block intersection
cardinalities.  Forgetting the block orders leaves a packed matrix up to row
and column permutations; tallying those classes over all ordered pairs gives
the weight-n piece of the product expansion as a polynomial in two alphabets,
one letter per block size on each side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from operator import index
from typing import Iterable, Iterator, Mapping

from ._backend import kernels
from .errors import DomainError, ResourceLimitError

# Enumeration guards: partitions grow like the Bell numbers, ordered pairs
# like their square.  Callers can raise them explicitly.
PARTITION_GUARD = 12
PAIR_GUARD = 8


@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported map k -> count, stored as sorted (k, count) pairs."""

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = 0
        for k, c in self.counts:
            if k <= prev or c <= 0:
                raise DomainError("multi-index must be sorted with positive counts")
            prev = k

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "MultiIndex":
        tally: dict[int, int] = {}
        for s in sizes:
            tally[s] = tally.get(s, 0) + 1
        return cls(tuple(sorted(tally.items())))

    def get(self, k: int) -> int:
        for kk, c in self.counts:
            if kk == k:
                return c
        return 0

    @property
    def weight(self) -> int:
        return sum(k * c for k, c in self.counts)

    def __str__(self) -> str:
        if not self.counts:
            return "-"
        return " ".join(f"{k}^{c}" for k, c in self.counts)


@dataclass(frozen=True)
class SetPartition:
    """Unordered partition of [1..n].

    Storage is canonical (each block sorted ascending, blocks ordered by
    least element) so that equality of values is equality of partitions; the
    block order itself carries no meaning.
    """

    ground_size: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        total = 0
        for b in self.blocks:
            if not b or list(b) != sorted(b):
                raise DomainError("blocks must be non-empty and sorted ascending")
            seen.update(b)
            total += len(b)
        if total != len(seen) or seen != set(range(1, self.ground_size + 1)):
            raise DomainError("blocks must partition [1..n] exactly")
        firsts = [b[0] for b in self.blocks]
        if firsts != sorted(firsts):
            raise DomainError("blocks must be ordered by least element")

    @classmethod
    def of(cls, ground_size: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        """Build from blocks in any order, normalizing the storage."""
        norm = sorted(tuple(sorted(b)) for b in blocks)
        return cls(ground_size, tuple(norm))

    @classmethod
    def from_rgs(cls, rgs) -> "SetPartition":
        """Decode a restricted growth string; first occurrence order equals
        least-element order, so the result is already canonical."""
        if not rgs:
            raise DomainError("empty growth string")
        blocks: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for x, b in enumerate(rgs, start=1):
            blocks[b].append(x)
        return cls(len(rgs), tuple(tuple(b) for b in blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)


def enum_partitions(n: int, guard: int = PARTITION_GUARD) -> Iterator[SetPartition]:
    """All partitions of [1..n], one per restricted growth string, in the
    lexicographic order of those strings."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > guard:
        raise ResourceLimitError(f"partition enumeration capped at n <= {guard}")
    return (SetPartition.from_rgs(r) for r in kernels.all_rgs(n))


def partition_type(p: SetPartition) -> MultiIndex:
    """Tally of block sizes; weight equals the ground size."""
    return MultiIndex.from_sizes(len(b) for b in p.blocks)


def stab_order(t: MultiIndex) -> int:
    """Order of the stabilizer in the symmetric group of any partition of
    type t: permute within blocks, permute equal-size blocks."""
    out = 1
    for k, c in t.counts:
        out *= factorial(k) ** c * factorial(c)
    return out


def intersection_matrix(
    p1: SetPartition, p2: SetPartition
) -> tuple[tuple[int, ...], ...]:
    """Rows follow p1's blocks, columns p2's; entry (i, j) is the overlap
    cardinality.  Row sums are p1's block sizes, column sums p2's."""
    if p1.ground_size != p2.ground_size:
        raise DomainError("partitions live on different ground sets")
    where2 = {}
    for j, b in enumerate(p2.blocks):
        for x in b:
            where2[x] = j
    q = len(p2.blocks)
    rows = []
    for b in p1.blocks:
        row = [0] * q
        for x in b:
            row[where2[x]] += 1
        rows.append(tuple(row))
    return tuple(rows)


def _as_rows(matrix) -> tuple[tuple[int, ...], ...]:
    try:
        rows = tuple(tuple(index(v) for v in r) for r in matrix)
    except TypeError as e:
        raise DomainError("matrix entries must be integers") from e
    return rows


def _check_packed(rows: tuple[tuple[int, ...], ...]):
    if not rows or not rows[0]:
        raise DomainError("matrix must be non-empty")
    q = len(rows[0])
    for r in rows:
        if len(r) != q:
            raise DomainError("matrix rows must have equal length")
        if any(v < 0 for v in r):
            raise DomainError("matrix entries must be non-negative")
        if not any(r):
            raise DomainError("zero row: matrix is not packed")
    for j in range(q):
        if not any(r[j] for r in rows):
            raise DomainError("zero column: matrix is not packed")


@dataclass(frozen=True)
class Diagram:
    """Class of a packed matrix under row and column permutations, keyed by
    its lexicographically least representative (row-major comparison)."""

    canon: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _check_packed(self.canon)
        if kernels.canonical_form(self.canon) != self.canon:
            raise DomainError("matrix is not the least representative of its class")

    @property
    def rows(self) -> int:
        return len(self.canon)

    @property
    def cols(self) -> int:
        return len(self.canon[0])

    @property
    def weight(self) -> int:
        """Total of all entries (the number of lines of the diagram)."""
        return sum(sum(r) for r in self.canon)

    def to_json_obj(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "matrix": [list(r) for r in self.canon],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Diagram":
        rows = _as_rows(obj["matrix"])
        if len(rows) != obj["rows"] or (rows and len(rows[0]) != obj["cols"]):
            raise DomainError("matrix shape disagrees with rows/cols fields")
        return cls(rows)


def canonical_class(matrix) -> Diagram:
    """Least representative of `matrix` over all row and column permutations.

    Two matrices map to equal Diagrams iff one is a row/column permutation of
    the other."""
    rows = _as_rows(matrix)
    _check_packed(rows)
    return Diagram(kernels.canonical_form(rows))


def spot_types(d: Diagram) -> tuple[MultiIndex, MultiIndex]:
    """(alpha, beta): alpha tallies the column sums of the class, beta the
    row sums.  Both have weight equal to the line count of d."""
    beta = MultiIndex.from_sizes(sum(r) for r in d.canon)
    alpha = MultiIndex.from_sizes(
        sum(r[j] for r in d.canon) for j in range(d.cols)
    )
    return alpha, beta


def enum_diagrams_with_mult(n: int, guard: int = PAIR_GUARD) -> dict[Diagram, int]:
    """Tally the intersection classes over all ordered pairs of partitions of
    [1..n].  Values sum to the square of the n-th Bell number; iteration
    order is the row-major order of the canonical matrices."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > guard:
        raise ResourceLimitError(f"pair enumeration capped at n <= {guard}")
    tally = kernels.diagram_tally(n)
    return {Diagram(c): m for c, m in sorted(tally.items())}


def mult_fast(d: Diagram, guard: int = PAIR_GUARD) -> int:
    """Pair count of d computed without touching the full pair space: fix one
    partition with d's row sums as block sizes, count partners whose class is
    d, and scale by the number of partitions of that type."""
    n = d.weight
    if n > guard:
        raise ResourceLimitError(f"multiplicity count capped at weight <= {guard}")
    blocks = []
    start = 1
    for s in (sum(r) for r in d.canon):
        blocks.append(tuple(range(start, start + s)))
        start += s
    p1 = SetPartition(n, tuple(blocks))
    count = 0
    for p2 in enum_partitions(n, guard=n):
        if kernels.canonical_form(intersection_matrix(p1, p2)) == d.canon:
            count += 1
    _, beta = spot_types(d)
    return count * factorial(n) // stab_order(beta)


class TwoAlphabetPoly:
    """Integer-coefficient polynomial in two alphabets L and V, with
    monomials keyed by a pair of multi-indices (exponent tallies).  Terms
    with zero coefficient are never stored, so equality of the term maps is
    equality of polynomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc: dict[tuple[MultiIndex, MultiIndex], int] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, coeff in items:
                acc[key] = acc.get(key, 0) + coeff
        self.terms = {k: c for k, c in acc.items() if c}

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoAlphabetPoly):
            return NotImplemented
        return self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list:
        return sorted(
            self.terms.items(), key=lambda kv: (kv[0][0].counts, kv[0][1].counts)
        )

    def evaluate(self, lvals: Mapping[int, object], vvals: Mapping[int, object]) -> Fraction:
        """Substitute numeric values for the letters: lvals[k] for L_k,
        vvals[k] for V_k."""
        total = Fraction(0)
        try:
            for (alpha, beta), coeff in self.terms.items():
                prod = Fraction(coeff)
                for k, c in alpha.counts:
                    prod *= Fraction(lvals[k]) ** c
                for k, c in beta.counts:
                    prod *= Fraction(vvals[k]) ** c
                total += prod
        except KeyError as e:
            raise DomainError(f"no value supplied for alphabet index {e.args[0]}") from e
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (alpha, beta), coeff in self.sorted_terms():
            letters = [
                f"L{k}" + (f"^{c}" if c > 1 else "") for k, c in alpha.counts
            ] + [f"V{k}" + (f"^{c}" if c > 1 else "") for k, c in beta.counts]
            mono = " ".join(letters)
            if not mono:
                bits.append(str(coeff))
            elif coeff == 1:
                bits.append(mono)
            else:
                bits.append(f"{coeff} {mono}")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"TwoAlphabetPoly({self})"


def hadamard_via_diagrams(n: int, guard: int = PAIR_GUARD) -> TwoAlphabetPoly:
    """Weight-n coefficient of the Hadamard product of two free exponentials,
    expanded over diagram classes: sum over |d| = n of mult(d) times the
    monomial L^alpha(d) V^beta(d)."""
    pairs = []
    for d, m in enum_diagrams_with_mult(n, guard=guard).items():
        alpha, beta = spot_types(d)
        pairs.append(((alpha, beta), m))
    return TwoAlphabetPoly(pairs)


def mult_rows(n: int, tally: Mapping[Diagram, int]) -> Iterator[tuple]:
    """CSV corpus rows (n, canonical_matrix_flat, mult, alpha, beta); the
    flat field is 'PxQ:' followed by the row-major entries."""
    for d in sorted(tally, key=lambda dd: (dd.rows, dd.cols, dd.canon)):
        alpha, beta = spot_types(d)
        flat = ",".join(str(v) for r in d.canon for v in r)
        yield n, f"{d.rows}x{d.cols}:{flat}", tally[d], str(alpha), str(beta)
