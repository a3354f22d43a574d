import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from coinlab import automaton as am
from coinlab import constructions as cons
from coinlab import fixed_point as fp
from coinlab import linalg as la
from coinlab.errors import BadInput, PrecisionFailure
from coinlab.numerics import EXACT, ExactComplex

from conftest import random_channel_exact, random_channel_float


def _identity_automaton(dim=2, accept=1, mode=am.ONE_SIDED, initial=0):
    ident = la.Superoperator(dim, (la.eye(dim, EXACT),))
    return am.CoinAutomaton(dim=dim, e0=ident, e1=ident,
                            initial=la.DensityMatrix.basis_state(dim, initial),
                            accept_index=accept, mode=mode,
                            accepting_set=frozenset({initial}) if mode == am.LIMIT
                            else frozenset())


def _max_err(a, b):
    return max(abs(complex(a[i, j]) - complex(b[i, j]))
               for i in range(a.shape[0]) for j in range(a.shape[1]))


# ---------------------------------------------------------------------------
# lambda_z

def test_lambda_z_identity_transfer():
    b = fp.TransferMatrix(4, la.eye(4, EXACT), Fraction(1, 2))
    for z in (Fraction(1, 10), Fraction(1, 1000)):
        lz = fp.lambda_z(b, z)
        assert all(lz[i, j] == la.eye(4, EXACT)[i, j] for i in range(4) for j in range(4))


def test_lambda_z_zero_transfer():
    b = fp.TransferMatrix(3, la.zeros(3, 3, EXACT), Fraction(1, 2))
    z = Fraction(1, 7)
    lz = fp.lambda_z(b, z)
    for i in range(3):
        for j in range(3):
            assert lz[i, j] == (ExactComplex(z) if i == j else ExactComplex(0))


def test_lambda_z_matches_truncated_series():
    rng = np.random.default_rng(17)
    e0 = random_channel_float(2, 2, rng)
    e1 = random_channel_float(2, 2, rng)
    m = _pair_automaton(e0, e1)
    b = fp.transfer_matrix(m, 0.3, 128)
    z = 1e-3
    lz = la.to_complex128(fp.lambda_z(b, z, prec=128))
    bm = la.to_complex128(b.b_p)
    acc = np.zeros_like(bm)
    power = np.eye(bm.shape[0], dtype=complex)
    t_cap = 20000
    for _ in range(t_cap):
        acc += z * power
        power = (1 - z) * (power @ bm)
    err = np.abs(lz - acc).max()
    assert err <= 2 * (1 - z) ** t_cap + 1e-9


def _pair_automaton(e0, e1, accept=0):
    # wraps two raw channels for transfer-matrix tests; no absorbing accept,
    # so use limit mode to skip that invariant
    mode = EXACT if (e0.exact and e1.exact) else 53
    return am.CoinAutomaton(dim=e0.dim, e0=e0, e1=e1,
                            initial=la.DensityMatrix.basis_state(e0.dim, 0, mode),
                            accept_index=accept, mode=am.LIMIT,
                            accepting_set=frozenset({accept}))


def test_lambda_z_rejects_bad_z():
    b = fp.TransferMatrix(4, la.eye(4, EXACT), Fraction(1, 2))
    for z in (0, 1, -0.5):
        with pytest.raises(BadInput):
            fp.lambda_z(b, z)


# ---------------------------------------------------------------------------
# lambda_limit

def test_lambda_limit_identity():
    b = fp.TransferMatrix(4, la.eye(4, EXACT), Fraction(1, 2))
    op = fp.lambda_limit(b)
    assert op.provenance == fp.EXACT_LHOPITAL
    assert all(op.lambda_p[i, j] == la.eye(4, EXACT)[i, j]
               for i in range(4) for j in range(4))


def test_lambda_limit_single_flip_exact_and_float(single_flip):
    bt = fp.transfer_matrix(single_flip, Fraction(3, 10))
    op = fp.lambda_limit(bt)
    v0 = la.vectorize(single_flip.initial.matrix)
    vacc = la.vectorize(la.DensityMatrix.basis_state(3, 1))
    lam_v0 = op.lambda_p @ v0
    acc = sum((vacc[i].conjugate() * lam_v0[i] for i in range(9)), ExactComplex(0))
    assert acc == ExactComplex(Fraction(3, 10))
    opf = fp.lambda_limit(fp.transfer_matrix(single_flip, 0.3, 128))
    assert opf.provenance == fp.Z_EXTRAPOLATION
    assert _max_err(op.lambda_p, opf.lambda_p) < 1e-9


def test_lambda_limit_hc_walk_gambler(hc_k2):
    a = fp.limiting_accept(hc_k2, Fraction(3, 5))
    assert a == Fraction(9, 13)


def test_lambda_limit_invariants_random_channels():
    rng = np.random.default_rng(23)
    for dim in (2, 3):
        e0 = random_channel_float(dim, 2, rng)
        e1 = random_channel_float(dim, 2, rng)
        m = _pair_automaton(e0, e1)
        for p in (0.2, 0.5):
            op = fp.lambda_limit(fp.transfer_matrix(m, p, 128))
            assert op.diagnostics["residual_fixed"] <= 1e-10
            assert op.diagnostics["residual_idem"] <= 1e-10
            assert op.diagnostics["max_entry"] <= 1 + 1e-10


def test_lambda_limit_exact_vs_float_on_rational_channels():
    rng = np.random.default_rng(29)
    for dim in (2, 3):
        e0 = random_channel_exact(dim, rng)
        e1 = random_channel_exact(dim, rng)
        m = _pair_automaton(e0, e1)
        bt_exact = fp.transfer_matrix(m, Fraction(2, 5), EXACT)
        bt_float = fp.transfer_matrix(m, Fraction(2, 5), 128)
        op_e = fp.lambda_limit(bt_exact)
        op_f = fp.lambda_limit(bt_float)
        assert _max_err(op_e.lambda_p, op_f.lambda_p) < 1e-9


def test_lambda_limit_precision_failure_is_loud():
    rng = np.random.default_rng(3)
    e0 = random_channel_float(2, 2, rng)
    e1 = random_channel_float(2, 2, rng)
    m = _pair_automaton(e0, e1)
    bt = fp.transfer_matrix(m, 0.4, 64)
    with pytest.raises(PrecisionFailure):
        fp.lambda_limit(bt, 64, conv_tol=mp.mpf(10) ** -80, max_rungs=3,
                        escalations=0)


# ---------------------------------------------------------------------------
# limiting_accept

def test_limiting_accept_first_heads_paper_values(first_heads):
    assert fp.limiting_accept(first_heads, Fraction(3, 10)) == 1
    assert fp.limiting_accept(first_heads, 0) == 0
    rep = fp.limiting_accept_report(first_heads, 0.3, mode=96)
    assert abs(rep.value - 1) < 1e-12


def test_limiting_accept_never_accepting():
    m = _identity_automaton(dim=2, accept=1, mode=am.HALTING, initial=0)
    assert fp.limiting_accept(m, Fraction(1, 2)) == 0


def test_limiting_accept_requires_mode(single_flip):
    limit_m = _identity_automaton(mode=am.LIMIT)
    with pytest.raises(BadInput):
        fp.limiting_accept(limit_m, Fraction(1, 2))


def test_limit_dominance(single_flip, zero_vs_eps, hc_k1):
    for m in (single_flip, zero_vs_eps, hc_k1):
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(4, 5)):
            a = float(fp.limiting_accept(m, p))
            curve = am.accept_prob_curve(m, float(p), 1000)
            assert all(at <= a + 1e-10 for at in curve)


def test_halting_mass(first_heads, single_flip):
    assert fp.halting_mass(single_flip, Fraction(1, 3)) == 1
    assert fp.halting_mass(first_heads, Fraction(1, 3)) == 1  # eventually heads
    stuck = _identity_automaton(dim=3, accept=1, mode=am.HALTING)
    assert fp.halting_mass(stuck, Fraction(1, 2)) == 0


# ---------------------------------------------------------------------------
# cesaro_accept

def test_cesaro_identity_occupancy():
    m = _identity_automaton(mode=am.LIMIT)
    assert fp.cesaro_accept(m, Fraction(1, 2)) == 1


def test_cesaro_two_cycle():
    swap_moves = {0: [(1, 1)], 1: [(1, 0)]}
    ch = am.classical_channel(2, swap_moves)
    m = am.CoinAutomaton(dim=2, e0=ch, e1=ch,
                         initial=la.DensityMatrix.basis_state(2, 0),
                         accept_index=0, mode=am.LIMIT,
                         accepting_set=frozenset({0}))
    assert fp.cesaro_accept(m, Fraction(1, 3)) == Fraction(1, 2)
    avg = fp.cesaro_partial_average(m, 0.3, 10**4)
    assert abs(avg - 0.5) < 1e-3


def test_cesaro_hc_walk_matches_halting(hc_k2):
    limit_variant = am.CoinAutomaton(
        dim=hc_k2.dim, e0=hc_k2.e0, e1=hc_k2.e1, initial=hc_k2.initial,
        accept_index=hc_k2.accept_index, reject_index=hc_k2.reject_index,
        mode=am.LIMIT, accepting_set=frozenset({hc_k2.accept_index}))
    for q in (Fraction(2, 5), Fraction(3, 5)):
        assert fp.cesaro_accept(limit_variant, q) == fp.limiting_accept(hc_k2, q)


# ---------------------------------------------------------------------------
# dead subspace / live probability / leaky check

def _reachability_dead_oracle(m):
    """States from which Accept is unreachable in the Markov digraph."""
    tables = am._classical_tables(m)
    edges = {s: set() for s in range(m.dim)}
    for coin in (0, 1):
        for src in range(m.dim):
            for w, dst in tables[coin][src]:
                if w > 0:
                    edges[src].add(dst)
    reach = set()
    frontier = [m.accept_index]
    rev = {s: set() for s in range(m.dim)}
    for src, dsts in edges.items():
        for d in dsts:
            rev[d].add(src)
    while frontier:
        cur = frontier.pop()
        if cur in reach:
            continue
        reach.add(cur)
        frontier.extend(rev[cur] - reach)
    return sorted(set(range(m.dim)) - reach)


def test_dead_subspace_single_flip(single_flip):
    rep = fp.dead_subspace(single_flip)
    assert len(rep.dead_basis) == 1
    v = rep.dead_basis[0]
    assert v[2] != ExactComplex(0) and v[0] == ExactComplex(0) and v[1] == ExactComplex(0)


def test_dead_subspace_identity_automaton():
    m = _identity_automaton(dim=3, accept=1, mode=am.ONE_SIDED)
    rep = fp.dead_subspace(m)
    # every non-accept basis direction is dead
    assert len(rep.dead_basis) == 2
    for v in rep.dead_basis:
        assert v[m.accept_index] == ExactComplex(0)


def test_dead_subspace_hc_walk_matches_reachability(hc_k2):
    oracle = _reachability_dead_oracle(hc_k2)
    rep = fp.dead_subspace(hc_k2)
    assert len(rep.dead_basis) == len(oracle)
    for v in rep.dead_basis:
        support = {i for i in range(hc_k2.dim) if v[i] != ExactComplex(0)}
        assert support <= set(oracle)


def test_dead_subspace_bias_independent(single_flip, hc_k1):
    for m in (single_flip, hc_k1):
        a = fp.dead_subspace(m, bias="1/2")
        b = fp.dead_subspace(m, bias="1/4")
        assert len(a.dead_basis) == len(b.dead_basis)
        assert all(a.dead_projector[i, j] == b.dead_projector[i, j]
                   for i in range(m.dim) for j in range(m.dim))


def test_dead_subspace_float_mode(single_flip):
    rep = fp.dead_subspace(single_flip, mode=128)
    assert len(rep.dead_basis) == 1
    assert abs(complex(rep.dead_basis[0][2])) > 0.999


def test_live_prob_identity_initial_dead():
    m = _identity_automaton(dim=3, accept=1, mode=am.ONE_SIDED, initial=0)
    rep = fp.dead_subspace(m)
    for t in (0, 1, 5):
        assert abs(fp.live_prob(m, 0.5, t, rep)) < 1e-12


def test_live_prob_single_flip_resolves(single_flip):
    rep = fp.dead_subspace(single_flip)
    assert abs(fp.live_prob(single_flip, 0.3, 0, rep) - 1) < 1e-12
    for t in (1, 2, 5):
        assert abs(fp.live_prob(single_flip, 0.3, t, rep)) < 1e-12


def test_live_prob_hc_matches_power_iteration(hc_k2):
    rep = fp.dead_subspace(hc_k2)
    q = 0.6
    tables = am._classical_tables(hc_k2)
    mat = np.zeros((hc_k2.dim, hc_k2.dim))
    for coin, prob in ((0, 1 - q), (1, q)):
        for src in range(hc_k2.dim):
            for w, dst in tables[coin][src]:
                mat[dst, src] += prob * w
    dist = np.zeros(hc_k2.dim)
    dist[2] = 1.0
    for _ in range(10):
        dist = mat @ dist
    dead = set(_reachability_dead_oracle(hc_k2))
    oracle = sum(v for i, v in enumerate(dist)
                 if i not in dead and i != hc_k2.accept_index)
    assert abs(fp.live_prob(hc_k2, q, 10, rep) - oracle) < 1e-12


def test_sandwich_property(single_flip, zero_vs_eps, hc_k1):
    for m in (single_flip, zero_vs_eps, hc_k1):
        rep = fp.dead_subspace(m)
        for p in (0.25, 0.5, 0.8):
            a = float(fp.limiting_accept(m, Fraction(p).limit_denominator(100)))
            curve = am.accept_prob_curve(m, p, 60)
            lives = fp.live_prob_curve(m, p, 60, rep)
            for t in (0, 1, 5, 20, 60):
                assert a <= curve[t] + lives[t] + 1e-10


def test_leaky_check_hc(hc_k2):
    rep = fp.leaky_check(hc_k2, 0.5, n_samples=100, seed=4)
    assert not rep.vacuous
    assert rep.value > 1e-6


def test_leaky_check_single_flip(single_flip):
    for p in (0.3, 0.6):
        rep = fp.leaky_check(single_flip, p, n_samples=50, seed=9)
        assert rep.value >= min(p, 1 - p) - 1e-9


def test_leaky_check_vacuous():
    m = _identity_automaton(dim=3, accept=1, mode=am.ONE_SIDED)
    rep = fp.leaky_check(m, 0.5, n_samples=10, seed=0)
    assert rep.vacuous and rep.value is None


# ---------------------------------------------------------------------------
# continuity probe (fit vs sampled acceptance, interior grid)

def test_continuity_probe(single_flip, zero_vs_eps):
    from coinlab.rational import fit_rational, isolate_roots
    for m in (single_flip, zero_vs_eps):
        fit = fit_rational(m)
        step = Fraction(1, 1000)
        p = Fraction(1, 100)
        while p <= Fraction(99, 100):
            assert fit.eval(p) == fp.limiting_accept(m, p)
            p += step * 10  # exact equality holds; stride keeps runtime sane
        if fit.denominator.degree >= 1:
            assert isolate_roots(fit.denominator, 0, 1) == []


def test_mode_agreement_gallery(single_flip, first_heads, zero_vs_eps, hc_k1):
    for m in (single_flip, first_heads, zero_vs_eps, hc_k1):
        for p in (Fraction(3, 10), Fraction(1, 2)):
            exact_val = fp.limiting_accept(m, p, mode=EXACT)
            float_val = fp.limiting_accept(m, p, mode=128)
            assert abs(float(exact_val) - float(float_val)) < 1e-9
