"""Tests for the exact EGF series layer."""

import random
from fractions import Fraction
from itertools import permutations
from math import comb, factorial

import pytest

from egflab.errors import DomainError, OrderMismatchError
from egflab.series import Series, hadamard


def bell_numbers(count):
    # independent oracle: B_{n+1} = sum_k C(n,k) B_k
    bs = [1]
    for n in range(count - 1):
        bs.append(sum(comb(n, k) * bs[k] for k in range(n + 1)))
    return bs


def involution_counts(count, allow_fixed_points=True):
    # independent oracle: permutations equal to their own inverse, optionally
    # restricted to the fixed-point-free ones (perfect matchings)
    out = []
    for n in range(count):
        total = 0
        for p in permutations(range(n)):
            if all(p[p[i]] == i for i in range(n)) and (
                allow_fixed_points or all(p[i] != i for i in range(n))
            ):
                total += 1
        out.append(total)
    return out


def random_series(rng, order, zero_const=False, one_const=False):
    cs = [
        Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(order + 1)
    ]
    if zero_const:
        cs[0] = Fraction(0)
    if one_const:
        cs[0] = Fraction(1)
    return Series(cs)


def test_add_componentwise():
    assert Series([1, 1, 0]) + Series([0, 0, 2]) == Series([1, 1, 2])


def test_add_zero_is_identity():
    f = Series([3, Fraction(1, 2), -4])
    assert f + Series.zero(2) == f


def test_add_inverse_cancels():
    assert Series([1, -1]) + Series([-1, 1]) == Series([0, 0])


def test_mul_one_plus_z_squared():
    one_plus_z = Series([1, 1, 0, 0])
    sq = one_plus_z * one_plus_z
    # (1+z)^2 = 1 + 2z + 2 * z^2/2!
    assert sq == Series([1, 2, 2, 0])


def test_mul_by_one_is_identity():
    f = Series([2, -3, Fraction(5, 7), 1])
    assert f * Series.one(3) == f


def test_mul_exp_exp_doubles():
    n = 10
    prod = Series.exp_z(n) * Series.exp_z(n)
    assert prod == Series([2**k for k in range(n + 1)])


def test_mul_commutative_associative():
    rng = random.Random(601)
    for _ in range(10):
        f = random_series(rng, 8)
        g = random_series(rng, 8)
        h = random_series(rng, 8)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)


def test_compose_identity_both_sides():
    rng = random.Random(602)
    f = random_series(rng, 7)
    phi = random_series(rng, 7, zero_const=True)
    assert f.compose(Series.z(7)) == f
    assert Series.z(7).compose(phi) == phi


def test_compose_exp_of_exp_minus_one_gives_partition_counts():
    n = 9
    got = Series.exp_z(n).compose(Series.exp_z_minus_one(n))
    assert got == Series(bell_numbers(n + 1))


def test_compose_associative():
    rng = random.Random(603)
    for _ in range(5):
        f = random_series(rng, 7)
        phi = random_series(rng, 7, zero_const=True)
        psi = random_series(rng, 7, zero_const=True)
        assert f.compose(phi).compose(psi) == f.compose(phi.compose(psi))


def test_compose_needs_zero_constant_term():
    with pytest.raises(DomainError):
        Series.z(4).compose(Series.one(4))


def test_exp_of_z_is_all_ones():
    assert Series.z(8).exp() == Series.exp_z(8)


def test_exp_of_square_half_counts_matchings():
    n = 7
    f = Series.monomial(2, n).exp()
    assert f == Series(involution_counts(n + 1, allow_fixed_points=False))
    assert f.coeffs[:7] == (1, 0, 1, 0, 3, 0, 15)


def test_exp_of_z_plus_square_half_counts_involutions():
    n = 7
    f = (Series.z(n) + Series.monomial(2, n)).exp()
    assert f == Series(involution_counts(n + 1))


def test_exp_log_roundtrip():
    rng = random.Random(604)
    for order in (1, 3, 8):
        for _ in range(5):
            f = random_series(rng, order, zero_const=True)
            assert f.exp().log() == f
            g = random_series(rng, order, one_const=True)
            assert g.log().exp() == g


def test_exp_log_constant_term_checks():
    with pytest.raises(DomainError):
        Series.one(3).exp()
    with pytest.raises(DomainError):
        Series.zero(3).log()


def test_hadamard_componentwise():
    assert hadamard(Series([1, 2, 4]), Series([1, 3, 9])) == Series([1, 6, 36])


def test_hadamard_exp_is_unit():
    rng = random.Random(605)
    f = random_series(rng, 6)
    assert hadamard(f, Series.exp_z(6)) == f
    assert hadamard(Series.exp_z(6), Series.exp_z(6)) == Series.exp_z(6)


def test_hadamard_commutative_associative():
    rng = random.Random(606)
    f = random_series(rng, 8)
    g = random_series(rng, 8)
    h = random_series(rng, 8)
    assert hadamard(f, g) == hadamard(g, f)
    assert hadamard(hadamard(f, g), h) == hadamard(f, hadamard(g, h))


def test_order_mismatch_rejected():
    f = Series.one(3)
    g = Series.one(4)
    for op in (lambda: f + g, lambda: f - g, lambda: f * g, lambda: hadamard(f, g)):
        with pytest.raises(OrderMismatchError):
            op()


def test_taylor_conversion_roundtrip():
    rng = random.Random(607)
    f = random_series(rng, 9)
    assert Series.from_taylor(f.taylor()) == f
    assert f.taylor()[4] == f[4] / factorial(4)


def test_derivative_shifts_coefficients():
    f = Series([5, 1, 2, 6])
    assert f.derivative() == Series([1, 2, 6, 0])


def test_shift_mul_z_matches_catalog():
    # z * e^z has EGF coefficients a_n = n
    assert Series.exp_z(8).shift_mul_z() == Series.z_exp_z(8)


def test_scale_and_neg():
    f = Series([1, 2, 3])
    assert f.scale(Fraction(1, 2)) == Series([Fraction(1, 2), 1, Fraction(3, 2)])
    assert -f == Series([-1, -2, -3])


def test_json_roundtrip_keeps_fractions():
    f = Series([Fraction(1, 3), -2, Fraction(7, 5)])
    obj = f.to_json_obj()
    assert obj["order"] == 2
    assert obj["egf_coeffs"] == ["1/3", "-2", "7/5"]
    assert Series.from_json(f.to_json()) == f


def test_json_order_field_checked():
    with pytest.raises(DomainError):
        Series.from_json_obj({"order": 3, "egf_coeffs": ["1", "2"]})


def test_series_is_immutable():
    f = Series([1, 2])
    with pytest.raises(AttributeError):
        f.coeffs = (Fraction(0),)
