"""Scalar arithmetic layers shared by every module.

Two numeric modes exist throughout the package:

* ``"exact"`` -- values are :class:`ExactComplex`, a pair of
  :class:`fractions.Fraction` components.  No rounding ever happens.
* an ``int`` -- binary floating point with that many significand bits,
  carried by mpmath ``mpf``/``mpc`` scalars (default 128 bits).

A "mode" argument anywhere in the package is one of those two things.
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath import mp

from .errors import BadInput

DEFAULT_PRECISION_BITS = 128

EXACT = "exact"

_MP_SCALARS = (mp.mpf, mp.mpc)


def is_exact_mode(mode) -> bool:
    return mode == EXACT


def check_mode(mode):
    if mode == EXACT:
        return mode
    if isinstance(mode, int) and mode >= 4:
        return mode
    raise BadInput(f"mode must be 'exact' or a bit count >= 4, got {mode!r}")


def default_tol(mode):
    """Default comparison tolerance: 0 in exact mode, 2^-(bits-24) in float mode."""
    if mode == EXACT:
        return Fraction(0)
    return mp.mpf(2) ** -(mode - 24)


class ExactComplex:
    """Complex scalar with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def coerce(x) -> "ExactComplex":
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactComplex(x)
        raise BadInput(f"cannot coerce {type(x).__name__} into exact mode")

    @staticmethod
    def _try(x):
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactComplex(x)
        return None

    def _as_mpc(self):
        return mp.mpc(mp.convert(self.re), mp.convert(self.im))

    def __add__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return self._as_mpc() + other
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return self._as_mpc() - other
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return other - self._as_mpc()
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return self._as_mpc() * other
            return NotImplemented
        return ExactComplex(self.re * o.re - self.im * o.im,
                            self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return self._as_mpc() / other
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("exact complex division by zero")
        return ExactComplex((self.re * o.re + self.im * o.im) / d,
                            (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = ExactComplex._try(other)
        if o is None:
            if isinstance(other, _MP_SCALARS):
                return other / self._as_mpc()
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def real_fraction(self) -> Fraction:
        if self.im != 0:
            raise InvalidRealAccess(self)
        return self.re

    def __eq__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except BadInput:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"ExactComplex({self.re})"
        return f"ExactComplex({self.re}, {self.im})"


class InvalidRealAccess(TypeError):
    def __init__(self, value):
        super().__init__(f"value {value!r} has a nonzero imaginary part")


EC_ZERO = ExactComplex(0)
EC_ONE = ExactComplex(1)


def scalar_zero(mode):
    return EC_ZERO if mode == EXACT else mp.mpc(0)


def scalar_one(mode):
    return EC_ONE if mode == EXACT else mp.mpc(1)


def as_scalar(x, mode):
    """Coerce a number into the given mode's scalar type."""
    if mode == EXACT:
        if isinstance(x, str):
            return ExactComplex(parse_fraction(x))
        return ExactComplex.coerce(x)
    with mp.workprec(mode):
        if isinstance(x, ExactComplex):
            return mp.mpc(mp.convert(x.re), mp.convert(x.im))
        if isinstance(x, Fraction):
            return mp.mpc(mp.convert(x))
        if isinstance(x, str):
            return mp.mpc(mp.convert(parse_fraction(x)))
        return mp.mpc(x)


def scalar_abs2(x):
    if isinstance(x, ExactComplex):
        return x.abs2()
    a = abs(x)
    return a * a


def is_exact_scalar(x) -> bool:
    return isinstance(x, (ExactComplex, Fraction, int))


# ---------------------------------------------------------------------------
# Fraction helpers

def parse_fraction(text) -> Fraction:
    """Parse "num/den", integer, or decimal strings into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        # a float converts to its exact binary value; pass strings for decimals
        return Fraction(text)
    s = str(text).strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"cannot parse fraction {text!r}") from exc


def frac_str(f: Fraction) -> str:
    return str(f)


def frac_bit(x: Fraction, i: int) -> int:
    """i-th bit (1-based, most significant first) of the binary expansion of x in [0,1)."""
    if i < 1:
        raise BadInput("bit index is 1-based")
    return (math.floor(x * (1 << i))) & 1


def trunc_bits(x: Fraction, h: int) -> Fraction:
    """x rounded down to h binary fraction digits."""
    scale = 1 << h
    return Fraction(math.floor(x * scale), scale)


def bits_to_cover(f: Fraction) -> int:
    """Smallest k >= 0 with 2^-k <= f, for f in (0, 1]."""
    if f <= 0:
        raise BadInput("need a positive fraction")
    k = 0
    g = Fraction(1)
    while g > f:
        g /= 2
        k += 1
    return k


def frac_sqrt_lower(x: Fraction, bits: int = 64) -> Fraction:
    """A rational lower bound on sqrt(x), accurate to about 2^-bits relatively."""
    if x < 0:
        raise BadInput("sqrt of a negative value")
    if x == 0:
        return Fraction(0)
    scale = 1 << bits
    return Fraction(math.isqrt((x.numerator * scale * scale) // x.denominator), scale)


def sum_of_squares(n: int) -> list[int]:
    """n as a sum of at most four positive integer squares (Lagrange)."""
    if n < 0:
        raise BadInput("need a nonnegative integer")
    if n == 0:
        return []
    s = math.isqrt(n)
    if s * s == n:
        return [s]
    for x in range(s, 0, -1):
        r = n - x * x
        y = math.isqrt(r)
        if y * y == r:
            return [x, y]
    for x in range(s, 0, -1):
        rest = n - x * x
        ss = math.isqrt(rest)
        for y in range(ss, 0, -1):
            r = rest - y * y
            z = math.isqrt(r)
            if z * z == r:
                return [x, y, z] if z else [x, y]
    for x in range(s, 0, -1):
        sub = sum_of_squares(n - x * x)
        if len(sub) <= 3:
            return [x] + sub
    raise RuntimeError("four-square decomposition failed")  # unreachable


def sqrt_fraction_parts(p: Fraction) -> list[Fraction]:
    """Rationals q_k with sum q_k^2 = p; a single q when sqrt(p) is rational."""
    if p < 0:
        raise BadInput("need a nonnegative fraction")
    if p == 0:
        return []
    num, den = p.numerator, p.denominator
    ns, ds = math.isqrt(num), math.isqrt(den)
    if ns * ns == num and ds * ds == den:
        return [Fraction(ns, ds)]
    return [Fraction(m, den) for m in sum_of_squares(num * den)]


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction with smallest denominator strictly inside (lo, hi), 0 <= lo < hi."""
    if not (0 <= lo < hi):
        raise BadInput("need 0 <= lo < hi")
    if lo == 0:
        # smallest q with 1/q < hi
        q = math.floor(1 / hi) + 1
        return Fraction(1, q)
    n = math.floor(lo) + 1
    if Fraction(n) < hi:
        return Fraction(n)
    whole = math.floor(lo)
    if lo == whole:
        return whole + simplest_between(Fraction(0), hi - whole)
    return whole + 1 / simplest_between(1 / (hi - whole), 1 / (lo - whole))
