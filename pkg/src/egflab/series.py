"""Truncated formal power series in the EGF convention, over exact rationals.

A Series of order N stores coefficients a_0..a_N of

    f(z) = sum_{n<=N} a_n * z^n / n!

All arithmetic is exact (fractions.Fraction); there is no floating point in
this module.  The truncation order travels with the value and every binary
operation insists on equal orders -- silent coercion is a bug magnet in
series code, so it is simply not offered.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import DomainError, OrderMismatchError

Q = Fraction


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise DomainError(f"not an exact rational: {x!r}")


class Series:
    """Immutable EGF-convention truncated series."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable):
        cs = tuple(_q(c) for c in coeffs)
        if not cs:
            raise DomainError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "order", len(cs) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(order: int) -> "Series":
        return Series([0] * (order + 1))

    @staticmethod
    def one(order: int) -> "Series":
        return Series([1] + [0] * order)

    @staticmethod
    def z(order: int) -> "Series":
        cs = [0] * (order + 1)
        if order >= 1:
            cs[1] = 1
        return Series(cs)

    @staticmethod
    def exp_z(order: int) -> "Series":
        """e^z: every EGF coefficient is 1."""
        return Series([1] * (order + 1))

    @staticmethod
    def exp_z_minus_one(order: int) -> "Series":
        """e^z - 1, the substitution of set partitions."""
        return Series([0] + [1] * order)

    @staticmethod
    def z_exp_z(order: int) -> "Series":
        """z*e^z: a_n = n (EGF of rooted idempotent components)."""
        return Series([n for n in range(order + 1)])

    @staticmethod
    def monomial(k: int, order: int) -> "Series":
        """z^k/k! as a series (a_k = 1)."""
        cs = [0] * (order + 1)
        if k <= order:
            cs[k] = 1
        return Series(cs)

    @staticmethod
    def from_taylor(taylor: Sequence) -> "Series":
        """Build from ordinary Taylor coefficients [z^n]f."""
        return Series([_q(t) * factorial(n) for n, t in enumerate(taylor)])

    # -- views -------------------------------------------------------------

    def taylor(self) -> tuple:
        """Ordinary Taylor coefficients [z^n]f = a_n/n!."""
        return tuple(a / factorial(n) for n, a in enumerate(self.coeffs))

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Series)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Series({[str(c) for c in self.coeffs]})"

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def _check_order(self, other: "Series"):
        if self.order != other.order:
            raise OrderMismatchError(
                f"series orders differ: {self.order} != {other.order}"
            )

    def __add__(self, other: "Series") -> "Series":
        self._check_order(other)
        return Series([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Series") -> "Series":
        self._check_order(other)
        return Series([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Series":
        return Series([-a for a in self.coeffs])

    def scale(self, c) -> "Series":
        c = _q(c)
        return Series([c * a for a in self.coeffs])

    def __mul__(self, other: "Series") -> "Series":
        """EGF product: c_n = sum_k C(n,k) a_k b_{n-k}."""
        self._check_order(other)
        a, b = self.coeffs, other.coeffs
        return Series(
            [
                sum(comb(n, k) * a[k] * b[n - k] for k in range(n + 1))
                for n in range(self.order + 1)
            ]
        )

    def derivative(self) -> "Series":
        """d/dz, one order lower in content but same truncation window shifted:
        (f')_n = a_{n+1}; the top coefficient is lost."""
        cs = list(self.coeffs[1:]) + [Fraction(0)]
        return Series(cs)

    def shift_mul_z(self) -> "Series":
        """Multiply by z: (z*f)_n = n * a_{n-1}."""
        cs = [Fraction(0)] * (self.order + 1)
        for n in range(1, self.order + 1):
            cs[n] = n * self.coeffs[n - 1]
        return Series(cs)

    def compose(self, phi: "Series") -> "Series":
        """f(phi(z)) truncated at the common order.

        Requires phi(0) = 0.  Computed by Horner accumulation on the Taylor
        coefficients: R = t_N; R = R*Phi + t_k for k = N-1..0.
        """
        self._check_order(phi)
        if phi.coeffs[0] != 0:
            raise DomainError("composition needs phi with zero constant term")
        N = self.order
        t = self.taylor()
        p = phi.taylor()

        def trunc_mul(u, v):
            return [
                sum(u[k] * v[n - k] for k in range(n + 1)) for n in range(N + 1)
            ]

        acc = [t[N]] + [Fraction(0)] * N
        for k in range(N - 1, -1, -1):
            acc = trunc_mul(acc, p)
            acc[0] += t[k]
        return Series.from_taylor(acc)

    def exp(self) -> "Series":
        """exp(f) for f with zero constant term.

        EGF recurrence from E' = f'E:  e_{n+1} = sum_k C(n,k) a_{k+1} e_{n-k}.
        """
        if self.coeffs[0] != 0:
            raise DomainError("exp needs zero constant term")
        a = self.coeffs
        e = [Fraction(1)]
        for n in range(self.order):
            e.append(sum(comb(n, k) * a[k + 1] * e[n - k] for k in range(n + 1)))
        return Series(e)

    def log(self) -> "Series":
        """log(f) for f with constant term 1; inverse of exp at every order."""
        if self.coeffs[0] != 1:
            raise DomainError("log needs constant term 1")
        g = self.coeffs
        l = [Fraction(0)]
        for n in range(self.order):
            # g_{n+1} = l_{n+1} + sum_{k<n} C(n,k) l_{k+1} g_{n-k}
            l.append(
                g[n + 1]
                - sum(comb(n, k) * l[k + 1] * g[n - k] for k in range(n))
            )
        return Series(l)

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {"order": self.order, "egf_coeffs": [str(c) for c in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(obj: dict) -> "Series":
        coeffs = [Fraction(s) for s in obj["egf_coeffs"]]
        s = Series(coeffs)
        if s.order != obj["order"]:
            raise DomainError("order field disagrees with coefficient count")
        return s

    @staticmethod
    def from_json(text: str) -> "Series":
        return Series.from_json_obj(json.loads(text))


def hadamard(f: Series, g: Series) -> Series:
    """Hadamard exponential product: componentwise a_n * b_n."""
    f._check_order(g)
    return Series([a * b for a, b in zip(f.coeffs, g.coeffs)])
