from fractions import Fraction

import pytest

from coinlab.errors import BadInput
from coinlab.numerics import (
    ExactComplex,
    bits_to_cover,
    frac_bit,
    frac_sqrt_lower,
    parse_fraction,
    simplest_between,
    sqrt_fraction_parts,
    sum_of_squares,
    trunc_bits,
)


def test_exact_complex_field_ops():
    a = ExactComplex(Fraction(1, 2), Fraction(1, 3))
    b = ExactComplex(Fraction(-2, 5), Fraction(4))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * a.conjugate() == ExactComplex(a.abs2())
    assert (1 / a) * a == ExactComplex(1)
    assert -a + a == ExactComplex(0)
    assert not ExactComplex(0)
    with pytest.raises(ZeroDivisionError):
        a / ExactComplex(0)


def test_exact_complex_real_access():
    assert ExactComplex(Fraction(3, 7)).real_fraction == Fraction(3, 7)
    with pytest.raises(TypeError):
        ExactComplex(0, 1).real_fraction


def test_parse_fraction():
    assert parse_fraction("3/10") == Fraction(3, 10)
    assert parse_fraction("0.6") == Fraction(3, 5)
    assert parse_fraction(7) == Fraction(7)
    assert parse_fraction(0.5) == Fraction(1, 2)
    with pytest.raises(BadInput):
        parse_fraction("x/y")


def test_bits_helpers():
    # 5/8 = 0.101
    assert [frac_bit(Fraction(5, 8), i) for i in (1, 2, 3, 4)] == [1, 0, 1, 0]
    assert trunc_bits(Fraction(9, 20), 11) == Fraction(921, 2048)
    assert bits_to_cover(Fraction(1, 5)) == 3
    assert bits_to_cover(Fraction(1)) == 0
    assert bits_to_cover(Fraction(1, 8)) == 3


def test_sum_of_squares_lagrange():
    for n in list(range(1, 200)) + [7 * 4**3, 2 ** 20 + 7, 12345]:
        parts = sum_of_squares(n)
        assert 1 <= len(parts) <= 4
        assert sum(x * x for x in parts) == n


def test_sqrt_fraction_parts():
    for p in [Fraction(1, 2), Fraction(9, 10), Fraction(1, 10), Fraction(2, 3),
              Fraction(9, 25), Fraction(1), Fraction(3, 7)]:
        parts = sqrt_fraction_parts(p)
        assert sum(q * q for q in parts) == p
    assert sqrt_fraction_parts(Fraction(9, 25)) == [Fraction(3, 5)]
    assert sqrt_fraction_parts(Fraction(0)) == []


def test_frac_sqrt_lower():
    for x in [Fraction(2), Fraction(1, 3), Fraction(15, 64)]:
        lo = frac_sqrt_lower(x, 80)
        assert lo * lo <= x
        assert (lo + Fraction(1, 2 ** 70)) ** 2 > x


def test_simplest_between():
    assert simplest_between(Fraction(0), Fraction(1, 4)) == Fraction(1, 5)
    assert simplest_between(Fraction(2, 7), Fraction(3, 7)) == Fraction(1, 3)
    got = simplest_between(Fraction(399, 1000), Fraction(401, 1000))
    assert got == Fraction(2, 5)
    lo = Fraction(2, 5) - Fraction(1, 2 ** 40)
    hi = Fraction(2, 5) + Fraction(1, 2 ** 40)
    assert simplest_between(lo, hi) == Fraction(2, 5)
