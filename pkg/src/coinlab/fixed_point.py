"""Abel-limit fixed-point analysis of transfer matrices.

For a bias-p mixture channel with transfer matrix B_p, the resolvent family
Lambda_{z,p} = z [I - (1-z) B_p]^{-1} has a z -> 0 limit Lambda_p that fixes
the channel's stationary structure and yields the limiting acceptance
probability a(p) = v_Acc^dag Lambda_p v_0.

Two routes compute the limit:

* exact: every entry of the resolvent restricted to a Krylov subspace is a
  rational function f(z)/g(z); taking the lowest nonvanishing denominator
  coefficient (c_k/d_k at z = 0) gives the limit with no rounding at all.
* float: evaluate the resolvent on a decreasing z-ladder and extrapolate to
  z = 0 with windowed Neville polynomials, escalating precision on demand.

The module also splits the state space into dead and live parts and hosts the
leak-rate check used by the continuity analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp

from .automaton import (
    HALTING,
    LIMIT,
    ONE_SIDED,
    CoinAutomaton,
    mixed_superop_matrix,
)
from .errors import BadInput, InvariantViolation, PrecisionFailure
from .linalg import (
    DensityMatrix,
    Matrix,
    apply_adjoint_channel,
    apply_channel,
    convert_matrix,
    dagger,
    exact_inverse,
    exact_nullspace,
    exact_solve,
    eye,
    mp_solve,
    to_complex128,
    to_mp_matrix,
    vectorize,
    zeros,
)
from .numerics import (
    DEFAULT_PRECISION_BITS,
    EXACT,
    ExactComplex,
    as_scalar,
    default_tol,
    parse_fraction,
    scalar_abs2,
)

EXACT_LHOPITAL = "exact_lhopital"
Z_EXTRAPOLATION = "z_extrapolation"


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """S^2 x S^2 matrix representation of the bias-p mixture channel."""

    dim: int
    b_p: Matrix
    bias: object
    precision_bits: int | None = None

    @property
    def exact(self) -> bool:
        return isinstance(self.b_p[0, 0], ExactComplex)


def transfer_matrix(m: CoinAutomaton, p, mode=None) -> TransferMatrix:
    """Build B_p = p mat(e1) + (1-p) mat(e0) in the requested mode."""
    if mode is None:
        mode = EXACT if m.exact else (m.precision_bits or DEFAULT_PRECISION_BITS)
    if mode == EXACT:
        pf = parse_fraction(p)
        return TransferMatrix(m.dim * m.dim, mixed_superop_matrix(m, pf, EXACT), pf)
    return TransferMatrix(m.dim * m.dim, mixed_superop_matrix(m, p, mode), p, mode)


@dataclass(frozen=True, eq=False)
class FixedPointOperator:
    """The Abel limit Lambda_p together with its quality diagnostics."""

    dim: int
    lambda_p: Matrix
    provenance: str
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AbelReport:
    value: object  # Fraction (exact) or mpf
    provenance: str
    achieved: object | None  # extrapolant agreement in float mode
    precision_bits: int | None
    rungs: int | None


@dataclass(frozen=True, eq=False)
class SubspaceReport:
    """Dead/live decomposition of the S-dimensional state space."""

    dim: int
    dead_basis: tuple  # vectors in C^S
    live_projector: Matrix
    dead_projector: Matrix
    v_live: np.ndarray
    v_dead: np.ndarray
    accept_index: int

    @property
    def live_dim(self) -> int:
        return self.dim - len(self.dead_basis) - 1


# ---------------------------------------------------------------------------
# Exact route: Krylov recurrence + closed-form resolvent + L'Hopital

def _vdot(w, v):
    acc = None
    for a, b in zip(w, v):
        term = a.conjugate() * b
        acc = term if acc is None else acc + term
    return acc


def _to_sparse(vec) -> dict:
    return {i: x for i, x in enumerate(vec) if not x.is_zero()}


class _IncrementalSpan:
    """Tracks a growing span with exact elimination and expresses new vectors
    as combinations of the raw vectors already inserted.

    Vectors are sparse index->ExactComplex dicts; classical machines keep the
    whole Krylov iteration on the diagonal, so this is what makes large walks
    cheap."""

    def __init__(self):
        self.rows = []  # (pivot index, reduced sparse vector, raw coordinates)
        self.count = 0

    def reduce(self, vec: dict):
        """Return (residual, coords) with vec = residual + sum coords_i raw_i."""
        r = dict(vec)
        coords = [ExactComplex(0)] * self.count
        for piv, rvec, rcoords in self.rows:
            pivot_val = r.get(piv)
            if pivot_val is not None and not pivot_val.is_zero():
                f = pivot_val / rvec[piv]
                for k, v in rvec.items():
                    nv = r.get(k, ExactComplex(0)) - f * v
                    if nv.is_zero():
                        r.pop(k, None)
                    else:
                        r[k] = nv
                for i, c in enumerate(rcoords):
                    coords[i] = coords[i] + f * c
        return r, coords

    def insert_reduced(self, residual: dict, coords):
        """Store a vector whose reduction is ``residual``; registers it as raw #count."""
        piv = min(residual)
        raw_coords = [-(c if isinstance(c, ExactComplex) else ExactComplex(c))
                      for c in coords]
        raw_coords.append(ExactComplex(1))
        self.rows.append((piv, residual, raw_coords))
        self.count += 1


def _krylov_recurrence(matvec, v0):
    """Krylov vectors u_i = B^i v0 and coefficients a with B^d v0 = sum a_i u_i."""
    span = _IncrementalSpan()
    us = []
    cur = list(v0)
    for _ in range(len(v0) + 1):
        residual, coords = span.reduce(_to_sparse(cur))
        if not residual:
            return us, [ExactComplex.coerce(c) if not isinstance(c, ExactComplex)
                        else c for c in coords]
        span.insert_reduced(residual, coords)
        us.append(cur)
        nxt = matvec(cur)
        cur = list(nxt)
    raise InvariantViolation("Krylov iteration failed to close")


def _one_minus_z_pows(n):
    """Coefficient lists of (1-z)^k for k = 0..n."""
    pows = [[ExactComplex(1)]]
    for _ in range(n):
        prev = pows[-1]
        nxt = [ExactComplex(0)] * (len(prev) + 1)
        for i, c in enumerate(prev):
            nxt[i] = nxt[i] + c
            nxt[i + 1] = nxt[i + 1] - c
        pows.append(nxt)
    return pows


def _abel_limits(a):
    """Limits lim_{z->0} z c_j(z) for the Krylov resolvent coordinates.

    With w = 1-z and recurrence coefficients a (length d), coordinate j of
    [I - (1-z)B]^{-1} v0 in the Krylov basis is c_j = n_j(w)/g~(w) where
    n_j(w) = w^j - sum_{i>j} a_i w^{d+j-i} and g~(w) = 1 - sum_i a_i w^{d-i}.
    Every numerator coefficient below the first nonzero denominator
    coefficient must vanish exactly; that is asserted, not assumed.
    """
    d = len(a)
    wp = _one_minus_z_pows(2 * d + 1)

    def poly_add(p, q, scale=None):
        n = max(len(p), len(q))
        out = [ExactComplex(0)] * n
        for i, c in enumerate(p):
            out[i] = out[i] + c
        for i, c in enumerate(q):
            out[i] = out[i] + (c if scale is None else scale * c)
        return out

    g = [ExactComplex(1)]
    for i in range(d):
        g = poly_add(g, wp[d - i], scale=-a[i])
    k_star = next((k for k, c in enumerate(g) if not c.is_zero()), None)
    if k_star is None:
        raise InvariantViolation("resolvent denominator vanished identically")
    lams = []
    for j in range(d):
        numer = wp[j]
        for i in range(j + 1, d):
            numer = poly_add(numer, wp[d + j - i], scale=-a[i])
        f = [ExactComplex(0)] + list(numer)  # multiply by z
        for k in range(k_star):
            if k < len(f) and not f[k].is_zero():
                raise InvariantViolation(
                    "z->0 limit does not exist: numerator below denominator order")
        fk = f[k_star] if k_star < len(f) else ExactComplex(0)
        lams.append(fk / g[k_star])
    return lams


def _abel_apply_exact(matvec, v0):
    """Exact Lambda . v0 via the Krylov resolvent."""
    us, a = _krylov_recurrence(matvec, v0)
    if not us:
        return [ExactComplex(0)] * len(v0)
    lams = _abel_limits(a)
    out = [ExactComplex(0)] * len(v0)
    for lam, u in zip(lams, us):
        if lam.is_zero():
            continue
        for i, x in enumerate(u):
            out[i] = out[i] + lam * x
    return out


def _channel_matvec(m: CoinAutomaton, pf: Fraction):
    """vec-level multiplication by B_p through sparse channel application."""
    a = as_scalar(pf, EXACT)
    b = as_scalar(1 - pf, EXACT)
    dim = m.dim

    def mv(v):
        x = np.empty((dim, dim), dtype=object)
        for i in range(dim):
            for j in range(dim):
                x[i, j] = v[i * dim + j]
        y = a * apply_channel(m.e1, x) + b * apply_channel(m.e0, x)
        return [y[i, j] for i in range(dim) for j in range(dim)]

    return mv


def _matrix_matvec(b: Matrix):
    n = b.shape[0]

    def mv(v):
        out = []
        for i in range(n):
            acc = ExactComplex(0)
            for j in range(n):
                if not b[i, j].is_zero():
                    acc = acc + b[i, j] * v[j]
            out.append(acc)
        return out

    return mv


def _lambda_exact(b: TransferMatrix) -> FixedPointOperator:
    """Full exact Abel limit: closed-form resolvent over powers of B.

    The Krylov vectors here are the flattened powers I, B, B^2, ...; the
    recurrence that closes the span is the minimal polynomial of B, and the
    limit matrix is the same combination of powers that the per-entry
    L'Hopital rule produces.
    """
    n = b.dim
    bm = b.b_p

    def mv(flat):
        x = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                x[i, j] = flat[i * n + j]
        y = bm @ x
        return [y[i, j] for i in range(n) for j in range(n)]

    ident = eye(n, EXACT)
    flat0 = [ident[i, j] for i in range(n) for j in range(n)]
    lam_flat = _abel_apply_exact(mv, flat0)
    lam = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            lam[i, j] = lam_flat[i * n + j]
    op = FixedPointOperator(n, lam, EXACT_LHOPITAL, {})
    _validate_fixed_point(op, b, exact=True)
    return op


# ---------------------------------------------------------------------------
# Float route: z-ladder + windowed Neville extrapolation

def _neville_at_zero(points):
    """Polynomial extrapolation of (z, value) pairs to z = 0."""
    zs = [p[0] for p in points]
    vals = [p[1] for p in points]
    k = len(points)
    for j in range(1, k):
        for i in range(k - 1, j - 1, -1):
            vals[i] = (zs[i - j] * vals[i] - zs[i] * vals[i - 1]) / (zs[i - j] - zs[i])
    return vals[-1]


def _max_abs(x) -> object:
    if isinstance(x, np.ndarray):
        best = mp.mpf(0)
        for v in x.reshape(-1):
            a = abs(v)
            if a > best:
                best = a
        return best
    return abs(x)


def _ladder(start, ratio, count):
    z = mp.mpf(start)
    r = mp.mpf(ratio)
    for _ in range(count):
        yield z
        z = z * r


def _extrapolate_ladder(eval_rung, prec, conv_tol, ladder_start, ladder_ratio,
                        window, max_rungs):
    """Run the z-ladder until two successive extrapolants agree within conv_tol."""
    zmin = mp.mpf(2) ** (-(prec - 40))
    pts = []
    prev = None
    achieved = None
    rungs = 0
    for z in _ladder(ladder_start, ladder_ratio, max_rungs):
        if z < zmin:
            break
        val = eval_rung(z)
        pts.append((z, val))
        if len(pts) > window:
            pts.pop(0)
        est = _neville_at_zero(pts)
        rungs += 1
        if prev is not None:
            achieved = _max_abs(est - prev)
            if achieved <= conv_tol:
                return est, achieved, rungs
        prev = est
    return None, achieved, rungs


def _default_conv_tol(prec):
    return mp.mpf(2) ** (-max(30, (prec - 24) // 2))


def _lambda_float(b: TransferMatrix, prec, conv_tol=None, ladder_start="1e-4",
                  ladder_ratio="1e-2", window=4, max_rungs=60,
                  escalations=2) -> FixedPointOperator:
    base_prec = prec
    attempt = 0
    achieved = None
    while attempt <= escalations:
        work = base_prec * (2 ** attempt)
        with mp.workprec(work + 30):
            tol = conv_tol if conv_tol is not None else _default_conv_tol(base_prec)
            bm = convert_matrix(b.b_p, work + 30)
            n = b.dim
            ident = eye(n, work + 30)

            def rung(z):
                sys = ident - (1 - z) * bm
                return z * _mp_inverse(sys, work + 30)

            est, achieved, rungs = _extrapolate_ladder(
                rung, work, tol, ladder_start, ladder_ratio, window, max_rungs)
            if est is not None:
                op = FixedPointOperator(
                    n, est, Z_EXTRAPOLATION,
                    {"achieved": achieved, "rungs": rungs, "precision_bits": work,
                     "conv_tol": tol})
                _validate_fixed_point(op, b, exact=False, prec=work)
                return op
        attempt += 1
    raise PrecisionFailure(
        f"z-ladder did not converge below {conv_tol} after {escalations} escalations",
        achieved=achieved)


def _mp_inverse(a: Matrix, prec) -> Matrix:
    am = to_mp_matrix(a)
    try:
        inv = am ** -1
    except ZeroDivisionError as exc:
        raise PrecisionFailure("resolvent system is numerically singular") from exc
    out = np.empty(a.shape, dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i, j] = mp.mpc(inv[i, j])
    return out


def _validate_fixed_point(op: FixedPointOperator, b: TransferMatrix, exact: bool,
                          prec: int | None = None, hard_tol=1e-8):
    lam = op.lambda_p
    bl = b.b_p @ lam if exact else convert_matrix(b.b_p, prec) @ lam
    fixed = bl - lam
    idem = lam @ lam - lam
    if exact:
        if any(not x.is_zero() for x in fixed.reshape(-1)):
            raise InvariantViolation("exact fixed-point residual is nonzero")
        if any(not x.is_zero() for x in idem.reshape(-1)):
            raise InvariantViolation("exact idempotence residual is nonzero")
        if any(x.abs2() > 1 for x in lam.reshape(-1)):
            raise InvariantViolation("exact fixed-point entry exceeds 1 in magnitude")
        op.diagnostics.update({"residual_fixed": 0.0, "residual_idem": 0.0,
                               "max_entry": _float_max_abs(lam)})
        return
    rf = _inf_norm(fixed)
    ri = _inf_norm(idem)
    me = _float_max_abs(lam)
    op.diagnostics.update({"residual_fixed": float(rf), "residual_idem": float(ri),
                           "max_entry": me})
    slack = max(hard_tol, 1e3 * float(op.diagnostics.get("achieved") or 0))
    if float(rf) > slack or float(ri) > slack:
        raise InvariantViolation(
            f"fixed-point residuals too large (fixed {float(rf):.3g}, idem {float(ri):.3g})")
    if me > 1 + slack:
        raise InvariantViolation(f"fixed-point entry magnitude {me:.6g} exceeds 1")


def _inf_norm(a: Matrix):
    """Max row sum of entry magnitudes."""
    best = mp.mpf(0)
    for i in range(a.shape[0]):
        s = mp.mpf(0)
        for j in range(a.shape[1]):
            x = a[i, j]
            s += mp.sqrt(mp.mpf(scalar_abs2(x))) if isinstance(x, ExactComplex) else abs(x)
        if s > best:
            best = s
    return best


def _float_max_abs(a: Matrix) -> float:
    best = 0.0
    for x in a.reshape(-1):
        v = math.sqrt(float(scalar_abs2(x))) if isinstance(x, ExactComplex) else float(abs(x))
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# Public operations

def lambda_z(b: TransferMatrix, z, prec: int | None = None) -> Matrix:
    """The resolvent z [I - (1-z) B_p]^{-1} at one interior z."""
    zf = parse_fraction(z) if not isinstance(z, float) else z
    if not 0 < zf < 1:
        raise BadInput("z must lie strictly between 0 and 1")
    if b.exact and isinstance(zf, Fraction):
        n = b.dim
        ident = eye(n, EXACT)
        sys = ident - as_scalar(1 - zf, EXACT) * b.b_p
        rhs = as_scalar(zf, EXACT) * ident
        return exact_solve(sys, rhs)
    work = prec or b.precision_bits or DEFAULT_PRECISION_BITS
    with mp.workprec(work + 30):
        zm = mp.convert(zf) if isinstance(zf, Fraction) else mp.mpf(zf)
        bm = convert_matrix(b.b_p, work + 30)
        return zm * _mp_inverse(eye(b.dim, work) - (1 - zm) * bm, work)


def lambda_limit(b: TransferMatrix, mode=None, *, conv_tol=None,
                 ladder_start="1e-4", ladder_ratio="1e-2", window=4,
                 max_rungs=60, escalations=2) -> FixedPointOperator:
    """The Abel limit Lambda_p of the transfer matrix.

    Exact inputs take the rational-function L'Hopital route; float inputs run
    the z-ladder with Richardson/Neville extrapolation, doubling the working
    precision up to ``escalations`` times before failing loudly.
    """
    if mode is None:
        mode = EXACT if b.exact else (b.precision_bits or DEFAULT_PRECISION_BITS)
    if mode == EXACT:
        if not b.exact:
            raise BadInput("exact fixed point needs an exact transfer matrix")
        return _lambda_exact(b)
    return _lambda_float(b, mode, conv_tol, ladder_start, ladder_ratio,
                         window, max_rungs, escalations)


def limiting_accept(m: CoinAutomaton, p, mode=None, **opts):
    """Limiting acceptance probability a(p) = v_Acc^dag Lambda_p v_0."""
    return limiting_accept_report(m, p, mode, **opts).value


def limiting_accept_report(m: CoinAutomaton, p, mode=None, *, conv_tol=None,
                           ladder_start="1e-4", ladder_ratio="1e-2", window=4,
                           max_rungs=60, escalations=2) -> AbelReport:
    if m.mode not in (HALTING, ONE_SIDED):
        raise BadInput("limiting acceptance applies to halting or one-sided machines")
    w = vectorize(DensityMatrix.basis_state(m.dim, m.accept_index, EXACT))
    return _abel_scalar(m, p, w, mode, conv_tol, ladder_start, ladder_ratio,
                        window, max_rungs, escalations)


def halting_mass(m: CoinAutomaton, p, mode=None):
    """Probability of eventually being absorbed in Accept or Reject."""
    proj = zeros(m.dim, m.dim, EXACT)
    proj[m.accept_index, m.accept_index] = ExactComplex(1)
    if m.reject_index is not None:
        proj[m.reject_index, m.reject_index] = ExactComplex(1)
    return _abel_scalar(m, p, vectorize(proj), mode, None, "1e-4", "1e-2",
                        4, 60, 2).value


def cesaro_accept(m: CoinAutomaton, p, mode=None, **opts):
    """Limit-mode acceptance: Abel limit of occupancy of the accepting set."""
    if m.mode != LIMIT:
        raise BadInput("cesaro acceptance applies to limit-mode machines")
    if not m.accepting_set:
        raise BadInput("limit mode needs a nonempty accepting set")
    proj = zeros(m.dim, m.dim, EXACT)
    for i in m.accepting_set:
        proj[i, i] = ExactComplex(1)
    w = vectorize(proj)
    return _abel_scalar(m, p, w, mode, None, "1e-4", "1e-2", 4, 60, 2).value


def cesaro_partial_average(m: CoinAutomaton, p, t_steps: int = 10**4) -> float:
    """Finite Cesaro mean (a_1 + ... + a_T)/T of accepting-set occupancy."""
    from .automaton import _double_steps  # local import to avoid cycle on load
    idx = sorted(m.accepting_set)
    total = 0.0
    count = 0
    for step, rho in enumerate(_double_steps(m, p, t_steps, False)):
        if step == 0:
            continue
        total += float(sum(rho[i, i].real for i in idx))
        count += 1
    return total / count


def _abel_scalar(m: CoinAutomaton, p, w_vec, mode, conv_tol, ladder_start,
                 ladder_ratio, window, max_rungs, escalations) -> AbelReport:
    if mode is None:
        mode = EXACT if m.exact and not isinstance(p, float) else \
            (m.precision_bits or DEFAULT_PRECISION_BITS)
    if mode == EXACT:
        if not m.exact:
            raise BadInput("exact limiting acceptance needs an exact automaton")
        pf = parse_fraction(p)
        if not 0 <= pf <= 1:
            raise BadInput("bias must lie in [0,1]")
        v0 = vectorize(m.initial.matrix)
        lam_v0 = _abel_apply_exact(_channel_matvec(m, pf), list(v0))
        val = _vdot(list(w_vec), lam_v0)
        if val is None:
            val = ExactComplex(0)
        frac = val.real_fraction
        if not 0 <= frac <= 1:
            raise InvariantViolation(f"limiting acceptance {frac} outside [0,1]")
        return AbelReport(frac, EXACT_LHOPITAL, None, None, None)
    prec = mode
    attempt = 0
    achieved = None
    while attempt <= escalations:
        work = prec * (2 ** attempt)
        with mp.workprec(work + 30):
            tol = conv_tol if conv_tol is not None else _default_conv_tol(prec)
            bt = transfer_matrix(m, p, work + 30)
            bm = bt.b_p
            n = bt.dim
            ident = eye(n, work + 30)
            v0 = convert_matrix(vectorize(m.initial.matrix), work + 30)
            wv = convert_matrix(w_vec, work + 30)

            def rung(z):
                sys = ident - (1 - z) * bm
                y = mp_solve(sys, v0, work + 30)
                acc = mp.mpc(0)
                for a, bb in zip(wv, y):
                    acc += mp.conj(a) * bb
                return z * acc

            est, achieved, rungs = _extrapolate_ladder(
                rung, work, tol, ladder_start, ladder_ratio, window, max_rungs)
            if est is not None:
                val = mp.re(est)
                if val < -float(tol) * 10 or val > 1 + float(tol) * 10 + 1e-12:
                    raise InvariantViolation(
                        f"limiting acceptance {mp.nstr(val, 10)} outside [0,1]")
                return AbelReport(val, Z_EXTRAPOLATION, achieved, work, rungs)
        attempt += 1
    raise PrecisionFailure(
        "limiting acceptance extrapolation did not converge", achieved=achieved)


# ---------------------------------------------------------------------------
# Dead / live decomposition

def dead_subspace(m: CoinAutomaton, mode=None, prec: int | None = None,
                  bias="1/2") -> SubspaceReport:
    """Maximal subspace D with zero accept overlap under B_bias^t for all t.

    Membership is bias independent on (0,1); the default witness bias is 1/2.
    Float mode treats overlaps below 10x the mode tolerance as zero.
    """
    if mode is None:
        mode = EXACT if m.exact else (m.precision_bits or DEFAULT_PRECISION_BITS)
    pf = parse_fraction(bias)
    s = m.dim
    cap = s * s
    if mode == EXACT:
        a = as_scalar(pf, EXACT)
        b = as_scalar(1 - pf, EXACT)
        h = zeros(s, s, EXACT)
        h[m.accept_index, m.accept_index] = ExactComplex(1)
        total = zeros(s, s, EXACT)
        span = _IncrementalSpan()
        for _ in range(cap + 1):
            flat = [h[i, j] for i in range(s) for j in range(s)]
            residual, coords = span.reduce(_to_sparse(flat))
            if not residual:
                break
            span.insert_reduced(residual, coords)
            total = total + h
            h = a * apply_adjoint_channel(m.e1, h) + b * apply_adjoint_channel(m.e0, h)
        basis = exact_nullspace(total)
        for v in basis:
            if not v[m.accept_index].is_zero():
                raise InvariantViolation("dead subspace is not orthogonal to Accept")
        dead_proj = _exact_projector(basis, s)
        acc_proj = zeros(s, s, EXACT)
        acc_proj[m.accept_index, m.accept_index] = ExactComplex(1)
        live_proj = eye(s, EXACT) - dead_proj - acc_proj
        return SubspaceReport(s, tuple(basis), live_proj, dead_proj,
                              vectorize(live_proj), vectorize(dead_proj),
                              m.accept_index)
    work = prec or (mode if isinstance(mode, int) else DEFAULT_PRECISION_BITS)
    with mp.workprec(work + 30):
        a = as_scalar(pf, work)
        b = as_scalar(1 - pf, work)
        e0 = _float_channel(m, 0, work)
        e1 = _float_channel(m, 1, work)
        h = zeros(s, s, work)
        h[m.accept_index, m.accept_index] = mp.mpc(1)
        total = zeros(s, s, work)
        for _ in range(cap + 1):
            total = total + h
            h = a * apply_adjoint_channel(e1, h) + b * apply_adjoint_channel(e0, h)
        # Hermitian PSD kernel split
        tm = to_mp_matrix(total)
        for i in range(s):
            for j in range(s):
                tm[i, j] = (tm[i, j] + mp.conj(tm[j, i])) / 2
        evals, evecs = mp.eighe(tm)
        thr = 10 * default_tol(work)
        basis = []
        dead_proj = zeros(s, s, work)
        for k in range(s):
            if evals[k] < thr:
                vec = np.empty(s, dtype=object)
                for i in range(s):
                    vec[i] = mp.mpc(evecs[i, k])
                basis.append(vec)
                for i in range(s):
                    for j in range(s):
                        dead_proj[i, j] = dead_proj[i, j] + vec[i] * mp.conj(vec[j])
        acc_proj = zeros(s, s, work)
        acc_proj[m.accept_index, m.accept_index] = mp.mpc(1)
        live_proj = eye(s, work) - dead_proj - acc_proj
        return SubspaceReport(s, tuple(basis), live_proj, dead_proj,
                              vectorize(live_proj), vectorize(dead_proj),
                              m.accept_index)


def _float_channel(m: CoinAutomaton, which: int, prec: int):
    from .linalg import Superoperator
    ch = m.e1 if which else m.e0
    return Superoperator(m.dim, tuple(convert_matrix(k, prec) for k in ch.kraus))


def _exact_projector(basis, s) -> Matrix:
    if not basis:
        return zeros(s, s, EXACT)
    a = np.empty((s, len(basis)), dtype=object)
    for j, v in enumerate(basis):
        for i in range(s):
            a[i, j] = v[i]
    gram = dagger(a) @ a
    inv = exact_inverse(gram)
    return a @ inv @ dagger(a)


def live_prob(m: CoinAutomaton, p, t: int, report: SubspaceReport | None = None):
    """g_t(p): probability of being neither accepted nor dead after t steps."""
    return live_prob_curve(m, p, t, report)[t]


def live_prob_curve(m: CoinAutomaton, p, t_max: int,
                    report: SubspaceReport | None = None):
    from .automaton import _double_steps
    if report is None:
        report = dead_subspace(m)
    proj = to_complex128(report.live_projector)
    out = []
    for rho in _double_steps(m, p, t_max, False):
        out.append(float(np.trace(proj @ rho).real))
    return out


@dataclass(frozen=True)
class LeakyReport:
    vacuous: bool
    value: float | None
    samples: int
    k_max: int


def leaky_check(m: CoinAutomaton, p, n_samples: int = 100, seed: int = 0,
                report: SubspaceReport | None = None) -> LeakyReport:
    """Observed infimum of max_k |(v_Acc + v_Dead)^dag B_p^k vec(rho)| over
    random live-supported states; strictly positive when the live space is
    nonempty."""
    if report is None:
        report = dead_subspace(m)
    s = m.dim
    live = to_complex128(report.live_projector)
    evals, evecs = np.linalg.eigh((live + live.conj().T) / 2)
    cols = [evecs[:, i] for i in range(s) if evals[i] > 0.5]
    if not cols:
        return LeakyReport(True, None, 0, s * s)
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), 0xDEAD]))
    k0 = np.stack([to_complex128(k) for k in m.e0.kraus])
    k1 = np.stack([to_complex128(k) for k in m.e1.kraus])
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p
    w = to_complex128(report.dead_projector).reshape(-1)
    acc = np.zeros(s * s, dtype=np.complex128)
    acc[m.accept_index * s + m.accept_index] = 1.0
    w = w + acc
    k_max = s * s
    worst = None
    from .automaton import _apply_double
    for _ in range(n_samples):
        coeff = rng.normal(size=len(cols)) + 1j * rng.normal(size=len(cols))
        psi = sum(c * v for c, v in zip(coeff, cols))
        psi = psi / np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        best = 0.0
        cur = rho
        for _ in range(k_max):
            cur = pv * _apply_double(k1, cur) + (1 - pv) * _apply_double(k0, cur)
            val = abs(np.vdot(w, cur.reshape(-1)))
            if val > best:
                best = val
        if worst is None or best < worst:
            worst = best
    return LeakyReport(False, float(worst), n_samples, k_max)
