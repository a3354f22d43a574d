"""Information in a bias: encode bits into a coin, recover them by tallying,
sample an exactly r-biased bit from a binary-expansion oracle, and extract
unbiased bits from a biased source with the von Neumann pair trick."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .automaton import philox_rng
from .errors import BadInput, CoinExhausted
from .numerics import frac_bit, parse_fraction


@dataclass(frozen=True)
class BiasEncoding:
    """A bit string packed into the leading binary digits of a coin bias."""

    bits: str
    bias: Fraction
    trials: int

    @property
    def s(self) -> int:
        return len(self.bits)


def encode_bias(bits: str) -> BiasEncoding:
    """Pack a bit string w into the bias 0.w, with the default trial budget
    64 * 2^(2s) that drives the per-bit failure probability below 2^-20."""
    if not bits or any(b not in "01" for b in bits):
        raise BadInput("bits must be a nonempty 0/1 string")
    s = len(bits)
    bias = Fraction(int(bits, 2), 1 << s)
    return BiasEncoding(bits, bias, 64 * (1 << (2 * s)))


def bernoulli_source(p):
    """Coin source: (trials, rng) -> number of heads, sampled binomially."""
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p

    def draw(trials: int, rng) -> int:
        return int(rng.binomial(trials, pv))

    return draw


def exact_source(p):
    """Noise-free source whose head count is the rounded expectation; stands in
    for the binomial quantile when checking the codec at zero noise."""
    pf = parse_fraction(p)

    def draw(trials: int, rng) -> int:
        return round(pf * trials)

    return draw


def decode_bits(source, s: int, trials: int | None = None, seed: int = 0) -> str:
    """Estimate the bias by tallying heads and read off the first s bits.

    The estimate is rounded to the nearest multiple of 2^-s with ties toward
    the lower value; estimates above the top grid point saturate to it.
    """
    if s < 1:
        raise BadInput("need at least one bit")
    if trials is None:
        trials = 64 * (1 << (2 * s))
    if trials < 1:
        raise BadInput("need at least one trial")
    rng = philox_rng(seed, 0xC0DEC)
    heads = source(trials, rng)
    est = Fraction(heads, trials)
    k = math.ceil(est * (1 << s) - Fraction(1, 2))
    k = min(max(k, 0), (1 << s) - 1)
    return format(k, f"0{s}b")


@dataclass(frozen=True)
class ExpansionOracle:
    """Bit oracle j -> b_j for a real r in (0,1) whose expansion ends by h."""

    bit_fn: object
    h: int

    def __post_init__(self):
        if self.h < 1:
            raise BadInput("expansion cutoff must be at least 1")

    def bit(self, j: int) -> int:
        if j < 1:
            raise BadInput("bit indices are 1-based")
        if j > self.h:
            return 0
        b = self.bit_fn(j)
        if b not in (0, 1):
            raise BadInput(f"oracle produced a non-bit {b!r}")
        return b

    def value(self) -> Fraction:
        return sum(Fraction(self.bit(j), 1 << j) for j in range(1, self.h + 1))

    @staticmethod
    def from_fraction(r, h: int | None = None) -> "ExpansionOracle":
        rf = parse_fraction(r)
        if not 0 < rf < 1:
            raise BadInput("r must lie strictly inside (0,1)")
        if h is None:
            h = 1
            while (rf * (1 << h)).denominator != 1:
                h += 1
                if h > 4096:
                    raise BadInput("r has no finite binary expansion")
        elif (rf * (1 << h)).denominator != 1:
            raise BadInput(f"expansion of {rf} is not zero beyond {h} bits")
        return ExpansionOracle(lambda j: frac_bit(rf, j), h)


def biased_bit(oracle: ExpansionOracle, seed: int = 0, trial: int = 0,
               bit_stream=None) -> int:
    """Emit 1 with probability exactly r by comparing unbiased bits against
    the expansion of r; ties fall through and exhaustion outputs 0."""
    rng = None if bit_stream is not None else philox_rng(seed, trial)
    for j in range(1, oracle.h + 1):
        z = bit_stream(j) if bit_stream is not None else int(rng.integers(0, 2))
        b = oracle.bit(j)
        if z < b:
            return 1
        if z > b:
            return 0
    return 0


def von_neumann(bit_source, seed: int = 0, max_pairs: int = 10**6):
    """Draw bit pairs until they differ: (1,0) -> 1, (0,1) -> 0.

    Returns (bit, pairs_used); raises CoinExhausted when max_pairs equal
    pairs come up first (a degenerate-bias signal).
    """
    if max_pairs < 1:
        raise BadInput("need at least one pair")
    rng = philox_rng(seed, 0x7A135)
    for used in range(1, max_pairs + 1):
        b1 = bit_source(rng)
        b2 = bit_source(rng)
        if b1 == 1 and b2 == 0:
            return 1, used
        if b1 == 0 and b2 == 1:
            return 0, used
    raise CoinExhausted(max_pairs)


def bernoulli_bit_source(p):
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p

    def draw(rng) -> int:
        return 1 if rng.random() < pv else 0

    return draw


def roundtrip(bits: str, seed: int = 0, trials: int | None = None) -> dict:
    """encode -> simulate a biased coin -> decode; reports success."""
    enc = encode_bias(bits)
    budget = trials if trials is not None else enc.trials
    recovered = decode_bits(bernoulli_source(enc.bias), enc.s, budget, seed)
    return {
        "bits": bits,
        "bias": f"{enc.bias.numerator}/{enc.bias.denominator}",
        "trials": budget,
        "recovered": recovered,
        "success": recovered == bits,
    }
