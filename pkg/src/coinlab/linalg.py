"""Dense complex linear algebra over the two numeric backends.

Matrices are numpy object arrays whose entries are either ExactComplex
(exact mode) or mpmath mpc (float mode).  The module also houses the
density-matrix / Kraus-channel types and the row-major vec/mat
correspondence between channels and transfer matrices.

Float-mode arithmetic rounds at the ambient mpmath precision: callers that
care wrap calls in ``mp.workprec(bits)`` (the automaton and fixed-point
layers always do).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .errors import BadInput, InvariantViolation
from .numerics import (
    EXACT,
    ExactComplex,
    as_scalar,
    default_tol,
    scalar_abs2,
    scalar_zero,
)

Matrix = np.ndarray  # object-dtype, 2-d


def zeros(rows: int, cols: int, mode=EXACT) -> Matrix:
    a = np.empty((rows, cols), dtype=object)
    z = scalar_zero(mode)
    a[:] = z
    return a


def eye(n: int, mode=EXACT) -> Matrix:
    a = zeros(n, n, mode)
    one = as_scalar(1, mode)
    for i in range(n):
        a[i, i] = one
    return a


def from_rows(rows, mode=EXACT) -> Matrix:
    r = len(rows)
    c = len(rows[0])
    a = np.empty((r, c), dtype=object)
    for i in range(r):
        if len(rows[i]) != c:
            raise BadInput("ragged matrix rows")
        for j in range(c):
            a[i, j] = as_scalar(rows[i][j], mode)
    return a


def dagger(a: Matrix) -> Matrix:
    out = np.empty((a.shape[1], a.shape[0]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[j, i] = a[i, j].conjugate()
    return out


def matrix_mode(a: Matrix):
    flat = a.reshape(-1) if a.ndim > 1 else a
    return EXACT if isinstance(flat[0], ExactComplex) else None


def is_exact_matrix(a: Matrix) -> bool:
    return all(isinstance(x, ExactComplex) for x in a.reshape(-1))


def convert_matrix(a: Matrix, mode) -> Matrix:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(*a.shape):
        out[idx] = as_scalar(a[idx], mode)
    return out


def to_complex128(a: Matrix) -> np.ndarray:
    out = np.empty(a.shape, dtype=np.complex128)
    for idx, x in np.ndenumerate(a):
        if isinstance(x, ExactComplex):
            out[idx] = complex(float(x.re), float(x.im))
        else:
            out[idx] = complex(x)
    return out


def max_abs2(a: Matrix):
    """Largest squared entry magnitude (Fraction in exact mode, mpf otherwise)."""
    best = None
    for x in a.reshape(-1):
        v = scalar_abs2(x)
        if best is None or v > best:
            best = v
    return best


def frobenius_norm2(a: Matrix):
    """Squared Frobenius norm, exact in exact mode."""
    total = None
    for x in a.reshape(-1):
        v = scalar_abs2(x)
        total = v if total is None else total + v
    return total


def nonzero_entries(a: Matrix):
    return [(i, j, a[i, j]) for i in range(a.shape[0]) for j in range(a.shape[1])
            if not _entry_is_zero(a[i, j])]


def _entry_is_zero(x) -> bool:
    if isinstance(x, ExactComplex):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# Density matrices and channels

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """S x S Hermitian, trace-1, positive semidefinite state."""

    dim: int
    matrix: Matrix

    @staticmethod
    def basis_state(dim: int, index: int, mode=EXACT) -> "DensityMatrix":
        m = zeros(dim, dim, mode)
        m[index, index] = as_scalar(1, mode)
        return DensityMatrix(dim, m)

    @property
    def exact(self) -> bool:
        return is_exact_matrix(self.matrix)

    def validate(self, tol=None, prec: int = 53):
        if self.matrix.shape != (self.dim, self.dim):
            raise InvariantViolation("density matrix shape mismatch")
        exact = self.exact
        if tol is None:
            tol = default_tol(EXACT if exact else prec)
        tol2 = tol * tol
        adj = dagger(self.matrix)
        for i in range(self.dim):
            for j in range(self.dim):
                if scalar_abs2(self.matrix[i, j] - adj[i, j]) > tol2:
                    raise InvariantViolation("density matrix is not Hermitian")
        tr = self.matrix[0, 0]
        for i in range(1, self.dim):
            tr = tr + self.matrix[i, i]
        one = as_scalar(1, EXACT if exact else prec)
        if scalar_abs2(tr - one) > tol2:
            raise InvariantViolation("density matrix trace is not 1")
        if exact:
            if not exact_psd(self.matrix):
                raise InvariantViolation("density matrix is not PSD")
        else:
            evs = mp_eigvals_hermitian(self.matrix, prec)
            if any(e < -tol for e in evs):
                raise InvariantViolation("density matrix has a negative eigenvalue")
        return self


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Kraus-form channel: rho -> sum_j E_j rho E_j^dagger."""

    dim: int
    kraus: tuple

    def __post_init__(self):
        if not self.kraus:
            raise BadInput("a channel needs at least one Kraus operator")
        object.__setattr__(self, "kraus", tuple(self.kraus))
        for k in self.kraus:
            if k.shape != (self.dim, self.dim):
                raise BadInput("Kraus operator dimension mismatch")

    @property
    def exact(self) -> bool:
        return all(is_exact_matrix(k) for k in self.kraus)

    def nonzeros(self):
        """Cached per-operator nonzero entry lists."""
        try:
            return object.__getattribute__(self, "_nz")
        except AttributeError:
            nz = [nonzero_entries(k) for k in self.kraus]
            object.__setattr__(self, "_nz", nz)
            return nz


@dataclass
class KrausCheck:
    passed: bool
    residual: float
    residual2: object  # squared Frobenius residual, exact in exact mode


def validate_kraus(e: Superoperator, tol=None, prec: int = 53) -> KrausCheck:
    """Check completeness sum_j E_j^dag E_j = I; report the Frobenius residual.

    The sum is accumulated from nonzero entries only: (K^dag K)[j,l] collects
    conj(K[i,j]) K[i,l] over shared rows i."""
    mode = EXACT if e.exact else None
    if tol is None:
        tol = default_tol(EXACT) if mode == EXACT else default_tol(prec)
    acc = zeros(e.dim, e.dim, EXACT if mode == EXACT else 53)
    for nz in e.nonzeros():
        by_row: dict = {}
        for (i, j, v) in nz:
            by_row.setdefault(i, []).append((j, v))
        for row in by_row.values():
            for (j, a) in row:
                ca = a.conjugate()
                for (l, b) in row:
                    acc[j, l] = acc[j, l] + ca * b
    ident = eye(e.dim, EXACT if mode == EXACT else 53)
    res2 = frobenius_norm2(acc - ident)
    residual = float(res2) ** 0.5
    passed = (res2 == 0) if (mode == EXACT and tol == 0) else (residual <= float(tol))
    return KrausCheck(passed, residual, res2)


def apply_channel(e: Superoperator, rho):
    """Apply a channel to a density matrix (or raw matrix), sparsity-aware."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else rho
    n = e.dim
    mode = EXACT if (isinstance(mat[0, 0], ExactComplex) and e.exact) else None
    out = zeros(n, n, EXACT if mode == EXACT else 53)
    for nz in e.nonzeros():
        for (i, j, a) in nz:
            for (k, l, b) in nz:
                out[i, k] = out[i, k] + a * mat[j, l] * b.conjugate()
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(n, out)
    return out


def apply_adjoint_channel(e: Superoperator, y: Matrix) -> Matrix:
    """Apply the adjoint map Y -> sum_j E_j^dag Y E_j."""
    n = e.dim
    mode = EXACT if (isinstance(y[0, 0], ExactComplex) and e.exact) else None
    out = zeros(n, n, EXACT if mode == EXACT else 53)
    for nz in e.nonzeros():
        for (i, j, a) in nz:
            for (k, l, b) in nz:
                out[j, l] = out[j, l] + a.conjugate() * y[i, k] * b
    return out


def vectorize(rho) -> np.ndarray:
    """Row-major flattening: vec(rho)[i*S+j] = rho[i,j]."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else rho
    return mat.reshape(-1).copy()


def devectorize(vec: np.ndarray, dim: int) -> Matrix:
    if vec.shape[0] != dim * dim:
        raise BadInput("vector length is not dim^2")
    return vec.reshape(dim, dim).copy()


def superop_matrix(e: Superoperator) -> Matrix:
    """Transfer matrix M with M . vec(rho) = vec(E(rho)); equals sum_j E_j (x) conj(E_j)."""
    n = e.dim
    mode = EXACT if e.exact else None
    out = zeros(n * n, n * n, EXACT if mode == EXACT else 53)
    for nz in e.nonzeros():
        for (i, j, a) in nz:
            for (k, l, b) in nz:
                r = i * n + k
                c = j * n + l
                out[r, c] = out[r, c] + a * b.conjugate()
    return out


def compose(after: Superoperator, before: Superoperator) -> Superoperator:
    """Channel composition (after o before), dropping products that vanish.

    Products are formed from nonzero entries only, so single-entry Kraus
    families compose in time proportional to their sparsity."""
    if after.dim != before.dim:
        raise BadInput("channel dimension mismatch")
    n = after.dim
    exact = after.exact and before.exact
    ops = []
    for nza in after.nonzeros():
        for nzb in before.nonzeros():
            rows_b: dict = {}
            for (k, j, b) in nzb:
                rows_b.setdefault(k, []).append((j, b))
            entries: dict = {}
            for (i, k, a) in nza:
                for (j, b) in rows_b.get(k, ()):
                    cur = entries.get((i, j))
                    val = a * b
                    entries[(i, j)] = val if cur is None else cur + val
            entries = {ij: v for ij, v in entries.items() if not _entry_is_zero(v)}
            if entries:
                prod = zeros(n, n, EXACT if exact else 53)
                for (i, j), v in entries.items():
                    prod[i, j] = v
                ops.append(prod)
    if not ops:
        raise BadInput("composition has no nonzero Kraus operator")
    return Superoperator(after.dim, tuple(ops))


# ---------------------------------------------------------------------------
# Exact elimination helpers

def exact_rref(rows):
    """Reduced row echelon form over exact complex scalars.

    Takes and returns a list of row lists; also returns the pivot column list.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not m[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def exact_nullspace(a: Matrix):
    """Basis of the right nullspace of an exact matrix, as a list of object vectors."""
    rows = [[a[i, j] for j in range(a.shape[1])] for i in range(a.shape[0])]
    rref, pivots = exact_rref(rows)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ExactComplex(0)] * ncols
        v[fc] = ExactComplex(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        vec = np.empty(ncols, dtype=object)
        vec[:] = v
        basis.append(vec)
    return basis


def exact_solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve A X = B exactly; B may have several columns."""
    n = a.shape[0]
    if a.shape[1] != n:
        raise BadInput("exact_solve needs a square system")
    bm = b if b.ndim == 2 else b.reshape(-1, 1)
    aug = [[a[i, j] for j in range(n)] + [bm[i, j] for j in range(bm.shape[1])]
           for i in range(n)]
    rref, pivots = exact_rref(aug)
    if pivots[:n] != list(range(n)):
        raise InvariantViolation("exact system is singular")
    out = np.empty((n, bm.shape[1]), dtype=object)
    for i in range(n):
        for j in range(bm.shape[1]):
            out[i, j] = rref[i][n + j]
    return out if b.ndim == 2 else out.reshape(-1)


def exact_inverse(a: Matrix) -> Matrix:
    return exact_solve(a, eye(a.shape[0], EXACT))


def exact_psd(h: Matrix) -> bool:
    """Exact PSD test for an exact Hermitian matrix via pivoted Schur complements."""
    n = h.shape[0]
    m = [[h[i, j] for j in range(n)] for i in range(n)]
    active = list(range(n))
    while active:
        pivot = None
        for i in active:
            d = m[i][i]
            if d.im != 0:
                raise BadInput("matrix is not Hermitian")
            if d.re < 0:
                return False
            if d.re > 0 and pivot is None:
                pivot = i
        if pivot is None:
            # all active diagonal entries are zero: need the whole block zero
            return all(m[i][j].is_zero() for i in active for j in active)
        d = m[pivot][pivot]
        rest = [i for i in active if i != pivot]
        for i in rest:
            fi = m[i][pivot] / d
            for j in rest:
                m[i][j] = m[i][j] - fi * m[pivot][j]
        active = rest
    return True


# ---------------------------------------------------------------------------
# mpmath bridges

def to_mp_matrix(a: Matrix):
    return mp.matrix([[_to_mpc(a[i, j]) for j in range(a.shape[1])]
                      for i in range(a.shape[0])])


def _to_mpc(x):
    if isinstance(x, ExactComplex):
        return mp.mpc(mp.convert(x.re), mp.convert(x.im))
    return mp.mpc(x)


def from_mp_matrix(m) -> Matrix:
    out = np.empty((m.rows, m.cols), dtype=object)
    for i in range(m.rows):
        for j in range(m.cols):
            out[i, j] = mp.mpc(m[i, j])
    return out


def mp_solve(a: Matrix, b: Matrix, prec: int) -> Matrix:
    """Solve A X = B in float mode at the given precision."""
    with mp.workprec(prec):
        am = to_mp_matrix(a)
        bm = to_mp_matrix(b if b.ndim == 2 else b.reshape(-1, 1))
        cols = []
        for j in range(bm.cols):
            rhs = mp.matrix([bm[i, j] for i in range(bm.rows)])
            cols.append(mp.lu_solve(am, rhs))
        out = np.empty((a.shape[0], bm.cols), dtype=object)
        for j, col in enumerate(cols):
            for i in range(a.shape[0]):
                out[i, j] = mp.mpc(col[i])
        return out if b.ndim == 2 else out.reshape(-1)


def mp_eigvals_hermitian(a: Matrix, prec: int = 53):
    with mp.workprec(max(prec, 53)):
        am = to_mp_matrix(a)
        # enforce exact Hermitian symmetry before calling eighe
        n = am.rows
        for i in range(n):
            for j in range(n):
                am[i, j] = (am[i, j] + mp.conj(am[j, i])) / 2
        ev = mp.eighe(am, eigvals_only=True)
        return [ev[i] for i in range(n)]
