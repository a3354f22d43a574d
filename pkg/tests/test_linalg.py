from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from coinlab import linalg as la
from coinlab.errors import InvariantViolation
from coinlab.numerics import EXACT, ExactComplex

from conftest import random_channel_float


def _ec(x):
    return ExactComplex(Fraction(x))


def test_vectorize_basis_state():
    rho = la.DensityMatrix.basis_state(2, 0)
    assert list(la.vectorize(rho)) == [_ec(1), _ec(0), _ec(0), _ec(0)]


def test_vectorize_maximally_mixed():
    half = Fraction(1, 2)
    rho = la.from_rows([[half, 0], [0, half]])
    assert list(la.vectorize(rho)) == [_ec(half), _ec(0), _ec(0), _ec(half)]


def test_vectorize_round_trip_random():
    rng = np.random.default_rng(5)
    m = np.empty((3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            m[i, j] = ExactComplex(Fraction(int(rng.integers(-9, 9)), 7),
                                   Fraction(int(rng.integers(-9, 9)), 5))
    back = la.devectorize(la.vectorize(m), 3)
    assert all(back[i, j] == m[i, j] for i in range(3) for j in range(3))


def test_superop_matrix_identity_channel():
    e = la.Superoperator(2, (la.eye(2, EXACT),))
    m = la.superop_matrix(e)
    ident = la.eye(4, EXACT)
    assert all(m[i, j] == ident[i, j] for i in range(4) for j in range(4))


def test_superop_matrix_unitary_is_kron():
    # rational rotation; checked entrywise against the defining identity on
    # every matrix unit (the channel applied to E_ij, then vectorised)
    c, s = Fraction(3, 5), Fraction(4, 5)
    u = la.from_rows([[c, -s], [s, c]])
    e = la.Superoperator(2, (u,))
    m = la.superop_matrix(e)
    kron = np.kron(u, np.vectorize(lambda x: x.conjugate())(u))
    for i in range(4):
        for j in range(4):
            assert m[i, j] == kron[i, j]
    for i in range(2):
        for j in range(2):
            unit = la.zeros(2, 2, EXACT)
            unit[i, j] = _ec(1)
            direct = la.vectorize(u @ unit @ la.dagger(u))
            via_mat = m @ la.vectorize(unit)
            assert all(direct[k] == via_mat[k] for k in range(4))


def test_superop_matrix_defining_identity_random():
    rng = np.random.default_rng(11)
    e = random_channel_float(3, 2, rng)
    m = la.superop_matrix(e)
    with mp.workprec(128):
        for trial in range(10):
            rho = _random_density(3, rng)
            direct = la.vectorize(la.apply_channel(e, rho))
            via = m @ la.vectorize(rho)
            err = max(abs(a - b) for a, b in zip(direct, via))
            assert err < 1e-12


def _random_density(dim, rng, prec=128):
    with mp.workprec(prec):
        g = np.empty((dim, dim), dtype=object)
        for i in range(dim):
            for j in range(dim):
                g[i, j] = mp.mpc(rng.normal(), rng.normal())
        h = g @ la.dagger(g)
        tr = sum(h[i, i] for i in range(dim))
        return (1 / tr) * h


def test_validate_kraus_identity():
    chk = la.validate_kraus(la.Superoperator(2, (la.eye(2, EXACT),)))
    assert chk.passed and chk.residual == 0


def test_validate_kraus_rational_bitflip_mix():
    # exact weights 3/5 and 4/5: (3/5)^2 + (4/5)^2 = 1
    x = la.from_rows([[0, 1], [1, 0]])
    ops = (ExactComplex(Fraction(3, 5)) * la.eye(2, EXACT),
           ExactComplex(Fraction(4, 5)) * x)
    chk = la.validate_kraus(la.Superoperator(2, ops))
    assert chk.passed and chk.residual2 == 0


def test_validate_kraus_float_bitflip_mix():
    with mp.workprec(128):
        w = mp.mpc(mp.sqrt(mp.mpf(1) / 2))
        ident = la.eye(2, 128)
        x = la.zeros(2, 2, 128)
        x[0, 1] = mp.mpc(1)
        x[1, 0] = mp.mpc(1)
        chk = la.validate_kraus(la.Superoperator(2, (w * ident, w * x)))
        assert chk.passed
        assert chk.residual < 1e-30


def test_validate_kraus_scaled_identity_fails():
    for dim in (2, 3):
        scaled = ExactComplex(Fraction(9, 10)) * la.eye(dim, EXACT)
        chk = la.validate_kraus(la.Superoperator(dim, (scaled,)))
        assert not chk.passed
        # residual is 0.19 * sqrt(dim)
        assert chk.residual2 == Fraction(19, 100) ** 2 * dim


def test_apply_identity_channel():
    rho = la.DensityMatrix.basis_state(2, 1)
    out = la.apply_channel(la.Superoperator(2, (la.eye(2, EXACT),)), rho)
    assert all(out.matrix[i, j] == rho.matrix[i, j] for i in range(2) for j in range(2))


def test_apply_full_dephasing_on_plus():
    p0 = la.zeros(2, 2, EXACT)
    p0[0, 0] = _ec(1)
    p1 = la.zeros(2, 2, EXACT)
    p1[1, 1] = _ec(1)
    plus = la.from_rows([[Fraction(1, 2)] * 2] * 2)
    out = la.apply_channel(la.Superoperator(2, (p0, p1)), la.DensityMatrix(2, plus))
    assert out.matrix[0, 1] == _ec(0) and out.matrix[1, 0] == _ec(0)
    assert out.matrix[0, 0] == _ec(Fraction(1, 2))
    out.validate()


def test_apply_preserves_trace_and_validity():
    rng = np.random.default_rng(2)
    with mp.workprec(128):
        for dim in (2, 3, 4):
            e = random_channel_float(dim, 3, rng)
            rho = _random_density(dim, rng)
            out = la.apply_channel(e, la.DensityMatrix(dim, rho))
            tr = sum(out.matrix[i, i] for i in range(dim))
            assert abs(tr - 1) < 1e-12
            out.validate(tol=mp.mpf(1e-20))


def test_mat_vec_identity_on_all_matrix_units():
    rng = np.random.default_rng(3)
    e = random_channel_float(2, 2, rng)
    with mp.workprec(128):
        m = la.superop_matrix(e)
        for i in range(2):
            for j in range(2):
                unit = la.zeros(2, 2, 128)
                unit[i, j] = mp.mpc(1)
                direct = la.vectorize(la.apply_channel(e, unit))
                via = m @ la.vectorize(unit)
                assert max(abs(a - b) for a, b in zip(direct, via)) < 1e-30


def test_exact_psd():
    assert la.exact_psd(la.from_rows([[1, 0], [0, 0]]))
    assert la.exact_psd(la.from_rows([[Fraction(1, 2), Fraction(1, 2)],
                                      [Fraction(1, 2), Fraction(1, 2)]]))
    assert not la.exact_psd(la.from_rows([[1, 2], [2, 1]]))
    assert not la.exact_psd(la.from_rows([[0, 1], [1, 0]]))


def test_density_validation_rejects_bad_states():
    bad_trace = la.from_rows([[1, 0], [0, 1]])
    with pytest.raises(InvariantViolation):
        la.DensityMatrix(2, bad_trace).validate()
    not_psd = la.from_rows([[Fraction(3, 2), 0], [0, Fraction(-1, 2)]])
    with pytest.raises(InvariantViolation):
        la.DensityMatrix(2, not_psd).validate()


def test_exact_solvers():
    a = la.from_rows([[2, 1], [1, 3]])
    b = la.vectorize(la.eye(2, EXACT))[:2]
    b = np.array([_ec(1), _ec(0)], dtype=object)
    x = la.exact_solve(a, b)
    assert x[0] == _ec(Fraction(3, 5)) and x[1] == _ec(Fraction(-1, 5))
    ns = la.exact_nullspace(la.from_rows([[1, 2], [2, 4]]))
    assert len(ns) == 1
    v = ns[0]
    assert v[0] + ExactComplex(2) * v[1] == _ec(0)
