import math
from fractions import Fraction

import pytest

from coinlab import advice as ad
from coinlab.errors import BadInput, CoinExhausted


# ---------------------------------------------------------------------------
# encode / decode

def test_encode_examples():
    assert ad.encode_bias("1").bias == Fraction(1, 2)
    assert ad.encode_bias("101").bias == Fraction(5, 8)
    enc = ad.encode_bias("00000001")
    assert enc.bias == Fraction(1, 256)
    assert enc.trials == 64 * 2 ** 16
    with pytest.raises(BadInput):
        ad.encode_bias("")
    with pytest.raises(BadInput):
        ad.encode_bias("102")


def test_decode_saturation_and_floor():
    assert ad.decode_bits(lambda t, rng: t, 3) == "111"
    assert ad.decode_bits(lambda t, rng: 0, 3) == "000"


def test_decode_tie_rounds_down():
    # estimate exactly halfway between 2/8 and 3/8 -> lower value wins
    source = (lambda t, rng: (t * 5) // 16)
    assert ad.decode_bits(source, 3, trials=16) == "010"


def test_decode_recovery_rate():
    enc = ad.encode_bias("101")
    hits = 0
    for seed in range(200):
        got = ad.decode_bits(ad.bernoulli_source(enc.bias), 3, enc.trials, seed)
        hits += got == "101"
    assert hits >= 198  # Chernoff predicts essentially all of them


def test_codec_exact_source_all_widths():
    for s in range(1, 7):
        for w in range(1 << s):
            bits = format(w, f"0{s}b")
            bias = Fraction(w, 1 << s)
            assert ad.decode_bits(ad.exact_source(bias), s) == bits
    for s in (7, 8, 10):
        for w in (0, 1, (1 << s) // 3, (1 << s) - 1):
            bits = format(w, f"0{s}b")
            assert ad.decode_bits(ad.exact_source(Fraction(w, 1 << s)), s) == bits


def test_end_to_end_roundtrip_rate():
    for bits in ("101", "10110", "10110101"):
        wins = sum(ad.roundtrip(bits, seed)["success"] for seed in range(60))
        assert wins >= 59


# ---------------------------------------------------------------------------
# biased_bit

def test_biased_bit_half():
    orc = ad.ExpansionOracle.from_fraction(Fraction(1, 2))
    assert orc.h == 1
    outs = {ad.biased_bit(orc, bit_stream=lambda j, z=z: z) for z in (0, 1)}
    assert ad.biased_bit(orc, bit_stream=lambda j: 0) == 1
    assert ad.biased_bit(orc, bit_stream=lambda j: 1) == 0
    assert outs == {0, 1}


@pytest.mark.parametrize("num,den", [(5, 8), (11, 16), (1, 16), (2741, 4096)])
def test_biased_bit_exhaustive_exactness(num, den):
    r = Fraction(num, den)
    orc = ad.ExpansionOracle.from_fraction(r)
    assert orc.h <= 12
    hits = 0
    total = 1 << orc.h
    for prefix in range(total):
        stream = [(prefix >> (orc.h - j)) & 1 for j in range(1, orc.h + 1)]
        hits += ad.biased_bit(orc, bit_stream=lambda j: stream[j - 1])
    assert Fraction(hits, total) == r


def test_biased_bit_sampled_statistics():
    r = Fraction(5, 8)
    orc = ad.ExpansionOracle.from_fraction(r)
    n = 100000
    hits = sum(ad.biased_bit(orc, seed=77, trial=t) for t in range(n))
    se = math.sqrt(float(r) * (1 - float(r)) / n)
    assert abs(hits / n - float(r)) < 3 * se


def test_oracle_validation():
    with pytest.raises(BadInput):
        ad.ExpansionOracle.from_fraction(Fraction(1, 3), h=4)  # not finite by 4
    orc = ad.ExpansionOracle.from_fraction(Fraction(5, 8))
    assert orc.value() == Fraction(5, 8)
    assert orc.bit(99) == 0
    with pytest.raises(BadInput):
        orc.bit(0)


# ---------------------------------------------------------------------------
# von Neumann extractor

def test_von_neumann_statistics():
    n = 100000
    ones = 0
    for k in range(n):
        bit, _ = ad.von_neumann(ad.bernoulli_bit_source(0.9), seed=k)
        ones += bit
    se = math.sqrt(0.25 / n)
    assert abs(ones / n - 0.5) < 3 * se


def test_von_neumann_exhaustion():
    with pytest.raises(CoinExhausted) as err:
        ad.von_neumann(lambda rng: 1, max_pairs=25)
    assert err.value.pairs_used == 25


def test_von_neumann_fixed_pair_stream():
    stream = iter([1, 0] * 4)
    bit, used = ad.von_neumann(lambda rng: next(stream))
    assert bit == 1 and used == 1


def test_von_neumann_conditional_fairness_exact():
    # two-flip enumeration: P(pair) p(1-p) each for (1,0) and (0,1); the
    # emitted bit is 1 exactly on (1,0), so conditioned on emission it is fair
    p = Fraction(9, 10)
    weights = {}
    for b1 in (0, 1):
        for b2 in (0, 1):
            w = (p if b1 else 1 - p) * (p if b2 else 1 - p)
            stream = iter([b1, b2])
            try:
                bit, _ = ad.von_neumann(lambda rng: next(stream), max_pairs=1)
            except CoinExhausted:
                continue
            weights[bit] = weights.get(bit, Fraction(0)) + w
    assert weights[0] == weights[1] == p * (1 - p)
