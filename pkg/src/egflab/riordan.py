"""Unitriangular matrices acting on EGF coefficient vectors, the pairs
(prefactor g, substitution phi) behind them, and their exact logarithms and
rational powers.

The matrix of f -> g * (f o phi) has M[i, k] = (i!/k!) [z^i] g * phi^k.  Such
matrices form a group under multiplication; log is a finite sum because M - I
is nilpotent, so M^t = exp(t log M) stays exactly rational for rational t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import DomainError, OrderMismatchError
from .series import Series, _q


def _coerce_rows(size: int, rows) -> tuple[tuple[Fraction, ...], ...]:
    out = tuple(tuple(_q(v) for v in r) for r in rows)
    if len(out) != size:
        raise DomainError("row count must equal the matrix size")
    for i, r in enumerate(out):
        if len(r) != i:
            raise DomainError(f"row {i} must hold exactly its {i} strictly-lower entries")
    return out


@dataclass(frozen=True)
class TriMatrix:
    """Unitriangular square matrix.

    Only the strictly-lower entries are stored (row i holds columns 0..i-1);
    the diagonal is identically 1 and everything above it 0, so the type
    cannot express a non-unipotent matrix.
    """

    size: int
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("matrix size must be >= 1")
        object.__setattr__(self, "rows", _coerce_rows(self.size, self.rows))

    @classmethod
    def identity(cls, size: int) -> "TriMatrix":
        return cls(size, tuple((0,) * i for i in range(size)))

    def entry(self, i: int, j: int) -> Fraction:
        if j > i:
            return Fraction(0)
        if j == i:
            return Fraction(1)
        return self.rows[i][j]

    def principal(self, m: int) -> "TriMatrix":
        """Leading m x m submatrix."""
        if not 1 <= m <= self.size:
            raise DomainError("submatrix size out of range")
        return TriMatrix(m, self.rows[:m])

    def minus_identity(self) -> "LowerMatrix":
        return LowerMatrix(self.size, self.rows)

    def to_json_obj(self) -> dict:
        return {
            "size": self.size,
            "rows": [[str(v) for v in r] for r in self.rows],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "TriMatrix":
        return cls(obj["size"], tuple(tuple(r) for r in obj["rows"]))


@dataclass(frozen=True)
class LowerMatrix:
    """Strictly lower triangular square matrix (zero diagonal), the shape of
    logarithms of unitriangular matrices.  Storage as in TriMatrix."""

    size: int
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("matrix size must be >= 1")
        object.__setattr__(self, "rows", _coerce_rows(self.size, self.rows))

    @classmethod
    def zero(cls, size: int) -> "LowerMatrix":
        return cls(size, tuple((0,) * i for i in range(size)))

    def entry(self, i: int, j: int) -> Fraction:
        if j >= i:
            return Fraction(0)
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    def principal(self, m: int) -> "LowerMatrix":
        if not 1 <= m <= self.size:
            raise DomainError("submatrix size out of range")
        return LowerMatrix(m, self.rows[:m])

    def _check_size(self, other: "LowerMatrix"):
        if self.size != other.size:
            raise OrderMismatchError(
                f"matrix sizes differ: {self.size} != {other.size}"
            )

    def __add__(self, other: "LowerMatrix") -> "LowerMatrix":
        self._check_size(other)
        return LowerMatrix(
            self.size,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __sub__(self, other: "LowerMatrix") -> "LowerMatrix":
        self._check_size(other)
        return LowerMatrix(
            self.size,
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def scale(self, t) -> "LowerMatrix":
        t = _q(t)
        return LowerMatrix(
            self.size, tuple(tuple(t * v for v in r) for r in self.rows)
        )

    def max_abs(self) -> Fraction:
        worst = Fraction(0)
        for r in self.rows:
            for v in r:
                if abs(v) > worst:
                    worst = abs(v)
        return worst

    def to_json_obj(self) -> dict:
        return {
            "size": self.size,
            "rows": [[str(v) for v in r] for r in self.rows],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "LowerMatrix":
        return cls(obj["size"], tuple(tuple(r) for r in obj["rows"]))


@dataclass(frozen=True)
class RiordanPair:
    """Pair (g, phi) with g = 1 + higher terms and phi = z + higher terms,
    acting on series by f -> g * (f o phi)."""

    g: Series
    phi: Series

    def __post_init__(self):
        if self.g.order != self.phi.order:
            raise OrderMismatchError("pair components need equal orders")
        if self.g[0] != 1:
            raise DomainError("prefactor needs constant term 1")
        if self.phi.order < 1 or self.phi[0] != 0 or self.phi[1] != 1:
            raise DomainError("substitution needs phi = z + higher terms")


def matrix_from_pair(p: RiordanPair, n: int) -> TriMatrix:
    """Matrix of f -> g * (f o phi) on EGF coefficients, truncated to n x n:
    M[i, k] = (i!/k!) [z^i] g * phi^k."""
    if n < 1:
        raise DomainError("matrix size must be >= 1")
    if n - 1 > p.g.order:
        raise OrderMismatchError(
            f"size {n} needs pair order >= {n - 1}, have {p.g.order}"
        )
    cols = [p.g]
    for k in range(1, n):
        cols.append(cols[-1] * p.phi)
    rows = tuple(
        tuple(cols[k][i] / factorial(k) for k in range(i)) for i in range(n)
    )
    return TriMatrix(n, rows)


def pair_from_matrix(m: TriMatrix) -> RiordanPair:
    """Unique candidate pair: g is column 0; phi unwinds column 1 through
    M[i, 1] = sum_j C(i, j) phi_j g_{i-j}.  Always solvable; whether the
    candidate reproduces the whole matrix is a separate membership test."""
    if m.size < 2:
        raise DomainError("pair extraction needs size >= 2")
    order = m.size - 1
    g = [m.entry(i, 0) for i in range(m.size)]
    phi = [Fraction(0), Fraction(1)] + [Fraction(0)] * (order - 1)
    for i in range(2, m.size):
        phi[i] = m.entry(i, 1) - sum(
            comb(i, j) * phi[j] * g[i - j] for j in range(1, i)
        )
    return RiordanPair(Series(g), Series(phi))


def is_substitution_with_prefunction(m: TriMatrix) -> bool:
    """True iff m is exactly the matrix of its own extracted pair.  Sizes at
    most 3 are always inside (no constrained entries yet)."""
    if m.size <= 3:
        return True
    return matrix_from_pair(pair_from_matrix(m), m.size) == m


def tri_mul(a: TriMatrix, b: TriMatrix) -> TriMatrix:
    if a.size != b.size:
        raise OrderMismatchError(f"matrix sizes differ: {a.size} != {b.size}")
    n = a.size
    rows = []
    for i in range(n):
        row = []
        for j in range(i):
            row.append(
                sum(a.entry(i, k) * b.entry(k, j) for k in range(j, i + 1))
            )
        rows.append(tuple(row))
    return TriMatrix(n, tuple(rows))


def _dense_strict(m, n):
    return [[m.entry(i, j) for j in range(n)] for i in range(n)]


def _mul_dense(a, b, n):
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            out[i][j] = sum(a[i][k] * b[k][j] for k in range(j, i + 1))
    return out


def tri_log(m: TriMatrix) -> LowerMatrix:
    """log m = sum_{j>=1} (-1)^{j+1} (m - I)^j / j, a finite sum because
    m - I is nilpotent of index <= size."""
    n = m.size
    nd = _dense_strict(m.minus_identity(), n)
    total = [row[:] for row in nd]
    term = nd
    for j in range(2, n):
        term = _mul_dense(term, nd, n)
        c = Fraction((-1) ** (j + 1), j)
        for i in range(n):
            for k in range(i):
                total[i][k] += c * term[i][k]
    return LowerMatrix(n, tuple(tuple(total[i][:i]) for i in range(n)))


def tri_exp(l: LowerMatrix) -> TriMatrix:
    """exp of a strictly lower matrix: I + sum_{j>=1} l^j / j!, finite."""
    n = l.size
    ld = _dense_strict(l, n)
    total = [[Fraction(0)] * n for _ in range(n)]
    term = None
    for j in range(1, n):
        term = ld if term is None else _mul_dense(term, ld, n)
        inv = Fraction(1, factorial(j))
        for i in range(n):
            for k in range(i):
                total[i][k] += inv * term[i][k]
    return TriMatrix(n, tuple(tuple(total[i][:i]) for i in range(n)))


def fractional_power(m: TriMatrix, t) -> TriMatrix:
    """m^t = exp(t log m), exact for rational t; m^0 = I, m^1 = m, and
    s, t -> m^s m^t is a one-parameter group."""
    return tri_exp(tri_log(m).scale(_q(t)))


def pascal_matrix(n: int) -> TriMatrix:
    """Binomial coefficient matrix: the pair (e^z, z)."""
    order = max(n - 1, 1)
    return matrix_from_pair(
        RiordanPair(Series.exp_z(order), Series.z(order)), n
    )


def stirling_matrix(n: int) -> TriMatrix:
    """Set-partition count matrix: the pair (1, e^z - 1)."""
    order = max(n - 1, 1)
    return matrix_from_pair(
        RiordanPair(Series.one(order), Series.exp_z_minus_one(order)), n
    )
