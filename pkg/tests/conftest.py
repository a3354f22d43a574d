"""Shared fixtures: gallery machines and random channel factories."""

import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from coinlab import constructions as cons
from coinlab import linalg as la
from coinlab.numerics import EXACT, ExactComplex, sqrt_fraction_parts


@pytest.fixture(scope="session")
def single_flip():
    return cons.single_flip_automaton()


@pytest.fixture(scope="session")
def first_heads():
    return cons.first_heads_automaton()


@pytest.fixture(scope="session")
def zero_vs_eps():
    return cons.zero_vs_eps_automaton(Fraction(1, 10))


@pytest.fixture(scope="session")
def hc_k1():
    return cons.hc_walk_automaton(Fraction(1, 2), Fraction(1, 4), 1)


@pytest.fixture(scope="session")
def hc_k2():
    return cons.hc_walk_automaton(Fraction(1, 2), Fraction(1, 10), 2)


@pytest.fixture(scope="session")
def hc_k2_fit(hc_k2):
    from coinlab.rational import fit_rational
    return fit_rational(hc_k2)


def random_channel_float(dim: int, n_ops: int, rng, prec: int = 128) -> la.Superoperator:
    """Random CPTP channel: Gaussian operators normalised by M^(-1/2)."""
    with mp.workprec(prec):
        gs = []
        for _ in range(n_ops):
            g = np.empty((dim, dim), dtype=object)
            for i in range(dim):
                for j in range(dim):
                    g[i, j] = mp.mpc(rng.normal(), rng.normal())
            gs.append(g)
        m = la.zeros(dim, dim, prec)
        for g in gs:
            m = m + la.dagger(g) @ g
        mm = la.to_mp_matrix(m)
        for i in range(dim):
            for j in range(dim):
                mm[i, j] = (mm[i, j] + mp.conj(mm[j, i])) / 2
        evals, evecs = mp.eighe(mm)
        inv_sqrt = la.zeros(dim, dim, prec)
        for k in range(dim):
            w = 1 / mp.sqrt(evals[k])
            for i in range(dim):
                for j in range(dim):
                    inv_sqrt[i, j] = inv_sqrt[i, j] + \
                        mp.mpc(evecs[i, k]) * w * mp.conj(mp.mpc(evecs[j, k]))
        return la.Superoperator(dim, tuple(g @ inv_sqrt for g in gs))


def _pyth_rotation(dim: int, i: int, j: int, flip: bool) -> np.ndarray:
    """Rational orthogonal rotation by the (3,4,5) angle in the (i, j) plane."""
    u = la.eye(dim, EXACT)
    c, s = Fraction(3, 5), Fraction(4, 5)
    if flip:
        c, s = s, c
    u[i, i] = ExactComplex(c)
    u[j, j] = ExactComplex(c)
    u[i, j] = ExactComplex(-s)
    u[j, i] = ExactComplex(s)
    return u


def random_channel_exact(dim: int, rng) -> la.Superoperator:
    """Random rational-entry CPTP channel: a rational-weight mixture of
    rational rotations and a classical reset."""
    n_unitaries = int(rng.integers(1, 3))
    weights_den = int(rng.integers(3, 9))
    cuts = sorted(rng.integers(1, weights_den, size=n_unitaries).tolist())
    weights = []
    prev = 0
    for cut in cuts:
        weights.append(Fraction(max(cut - prev, 0), weights_den))
        prev = cut
    weights.append(Fraction(weights_den - prev, weights_den))
    parts = []
    for w in weights:
        if w == 0:
            continue
        kind = int(rng.integers(0, 3))
        if kind < 2:
            u = la.eye(dim, EXACT)
            for _ in range(int(rng.integers(1, 3))):
                i, j = rng.choice(dim, size=2, replace=False)
                u = u @ _pyth_rotation(dim, int(i), int(j), bool(rng.integers(0, 2)))
            parts.append((w, [u]))
        else:
            dest = int(rng.integers(0, dim))
            ops = []
            for src in range(dim):
                k = la.zeros(dim, dim, EXACT)
                k[dest, src] = ExactComplex(1)
                ops.append(k)
            parts.append((w, ops))
    kraus = []
    for w, ops in parts:
        for q in sqrt_fraction_parts(w):
            for op in ops:
                kraus.append(ExactComplex(q) * op)
    return la.Superoperator(dim, tuple(kraus))
