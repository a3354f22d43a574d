"""Coin-flipping automata: per-flip channel mixing, evolution, sampling, JSON format.

A machine holds a tails channel e0 and a heads channel e1 (each already
incorporating the accept-measurement step) and evolves under the convex
mixture p*e1 + (1-p)*e0 when driven by a coin of bias p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp

from .errors import BadInput, InvariantViolation
from .linalg import (
    DensityMatrix,
    Matrix,
    Superoperator,
    apply_channel,
    compose,
    convert_matrix,
    eye,
    nonzero_entries,
    superop_matrix,
    to_complex128,
    validate_kraus,
    vectorize,
    zeros,
)
from .numerics import (
    DEFAULT_PRECISION_BITS,
    EXACT,
    ExactComplex,
    as_scalar,
    default_tol,
    frac_str,
    parse_fraction,
    sqrt_fraction_parts,
)

HALTING = "halting"
ONE_SIDED = "one_sided"
LIMIT = "limit"
MODES = (HALTING, ONE_SIDED, LIMIT)


@dataclass(frozen=True, eq=False)
class CoinAutomaton:
    """Finite automaton driven by coin flips.

    Acceptance modes: ``halting`` (absorbing Accept and Reject states),
    ``one_sided`` (absorbing Accept, rejection by never halting) and
    ``limit`` (no halting; time-averaged occupancy of ``accepting_set``).
    The absorbing-accept invariant is enforced for the first two modes.
    """

    dim: int
    e0: Superoperator
    e1: Superoperator
    initial: DensityMatrix
    accept_index: int
    reject_index: int | None = None
    mode: str = HALTING
    accepting_set: frozenset = frozenset()
    precision_bits: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise BadInput(f"unknown acceptance mode {self.mode!r}")
        if self.e0.dim != self.dim or self.e1.dim != self.dim:
            raise BadInput("channel dimension mismatch")
        if self.initial.dim != self.dim:
            raise BadInput("initial state dimension mismatch")
        if not (0 <= self.accept_index < self.dim):
            raise BadInput("accept index out of range")
        if self.reject_index is not None and not (0 <= self.reject_index < self.dim):
            raise BadInput("reject index out of range")
        if self.mode == LIMIT and not self.accepting_set:
            raise BadInput("limit mode needs a nonempty accepting_set")
        object.__setattr__(self, "accepting_set", frozenset(self.accepting_set))
        tol = self._tol()
        prec = self.precision_bits or 53
        with mp.workprec(prec):
            for name, ch in (("e0", self.e0), ("e1", self.e1)):
                chk = validate_kraus(ch, tol)
                if not chk.passed:
                    raise InvariantViolation(
                        f"{name} is not trace preserving (residual {chk.residual:.3g})")
            self.initial.validate(None if self.exact else tol, prec)
            if self.mode != LIMIT:
                for name, ch in (("e0", self.e0), ("e1", self.e1)):
                    if not _is_absorbing(ch, self.accept_index, tol):
                        raise InvariantViolation(
                            f"accept state is not absorbing under {name}")

    def _tol(self):
        if self.exact:
            return Fraction(0)
        return default_tol(self.precision_bits or 53)

    @property
    def exact(self) -> bool:
        return (self.e0.exact and self.e1.exact and self.initial.exact)

    def accept_projector_vector(self) -> np.ndarray:
        """vec(|Acc><Acc|) in the machine's native scalar type."""
        return vectorize(DensityMatrix.basis_state(
            self.dim, self.accept_index, EXACT if self.exact else 53))


def _is_absorbing(ch: Superoperator, idx: int, tol) -> bool:
    rho = DensityMatrix.basis_state(ch.dim, idx, EXACT if ch.exact else 53)
    out = apply_channel(ch, rho)
    kept = out.matrix[idx, idx]
    if isinstance(kept, ExactComplex):
        return kept == ExactComplex(1)
    return abs(kept - 1) <= float(tol) + 1e-12


@dataclass(frozen=True, eq=False)
class TimeDependentAutomaton:
    """Automaton whose channel pair may change with the time step."""

    dim: int
    generator: object  # t -> (e0_t, e1_t)
    initial: DensityMatrix
    accept_index: int
    reject_index: int | None = None
    horizon: int | None = None
    precision_bits: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    @property
    def exact(self) -> bool:
        e0, _ = self.channels_at(0)
        return e0.exact and self.initial.exact

    def channels_at(self, t: int):
        cache = object.__getattribute__(self, "_cache")
        if t not in cache:
            e0, e1 = self.generator(t)
            for ch in (e0, e1):
                chk = validate_kraus(ch)
                if not chk.passed:
                    raise InvariantViolation(
                        f"generated channel at step {t} is not trace preserving")
            cache[t] = (e0, e1)
        return cache[t]


@dataclass(frozen=True)
class RunTrace:
    """Outcome of one sampled run."""

    seed: int
    trial: int
    flips: tuple
    halt_step: int | None
    outcome: str  # accept | reject | unresolved


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    accepted: int
    rejected: int
    unresolved: int
    t_max: int
    seed: int

    @property
    def accept_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def unresolved_rate(self) -> float:
        return self.unresolved / self.trials

    def accept_stderr(self) -> float:
        r = self.accept_rate
        return math.sqrt(max(r * (1 - r), 1e-12) / self.trials)


# ---------------------------------------------------------------------------
# Channel builders

def classical_channel(dim: int, moves: dict, mode=EXACT) -> Superoperator:
    """Channel made of weighted basis moves.

    ``moves`` maps a source basis index to a list of (probability, destination)
    pairs summing to 1.  Sources left out stay put.  Kraus operators are
    single-entry matrices q|dest><src|; a move of probability p whose square
    root is irrational is split into up to four rational-weight operators with
    sum q_k^2 = p, so exact mode stays rational while the channel semantics are
    the plain Markov kernel either way.
    """
    ops = []
    for src in range(dim):
        branches = moves.get(src, [(1, src)])
        total = Fraction(0)
        for prob, dest in branches:
            p = parse_fraction(prob) if not isinstance(prob, Fraction) else prob
            total += p
            if p == 0:
                continue
            for w in _sqrt_weights(p, mode):
                k = zeros(dim, dim, mode)
                k[dest, src] = w
                ops.append(k)
        if total != 1:
            raise BadInput(f"probabilities from state {src} sum to {total}, not 1")
    return Superoperator(dim, tuple(ops))


def _sqrt_weights(p: Fraction, mode):
    if mode == EXACT:
        return [ExactComplex(q) for q in sqrt_fraction_parts(p)]
    with mp.workprec(mode):
        return [mp.mpc(mp.sqrt(mp.convert(p)))]


def _sqrt_scalar(p: Fraction, mode):
    if mode == EXACT:
        num = math.isqrt(p.numerator)
        den = math.isqrt(p.denominator)
        if num * num == p.numerator and den * den == p.denominator:
            return ExactComplex(Fraction(num, den))
        raise BadInput(f"sqrt({p}) is irrational in exact mode")
    with mp.workprec(mode):
        return mp.mpc(mp.sqrt(mp.convert(p)))


def accept_measurement(dim: int, accept_index: int, mode=EXACT) -> Superoperator:
    """The projective accept-check {Gamma, I - Gamma} as a channel."""
    gamma = zeros(dim, dim, mode)
    gamma[accept_index, accept_index] = as_scalar(1, mode)
    rest = eye(dim, mode)
    rest[accept_index, accept_index] = as_scalar(0, mode)
    return Superoperator(dim, (gamma, rest))


def with_accept_measurement(ch: Superoperator, accept_index: int) -> Superoperator:
    """Compose a channel with the accept measurement so callers cannot forget it."""
    mode = EXACT if ch.exact else 53
    return compose(accept_measurement(ch.dim, accept_index, mode), ch)


def coin_superop(m: CoinAutomaton, p, precision_bits: int | None = None) -> Superoperator:
    """The mixed channel with Kraus family {sqrt(p) E1_j} u {sqrt(1-p) E0_j}.

    Exact output requires sqrt(p) and sqrt(1-p) to be rational; otherwise the
    family is built in float mode at the requested precision.
    """
    pf = parse_fraction(p) if not isinstance(p, (float,)) else Fraction(p)
    if not (0 <= pf <= 1):
        raise BadInput(f"bias must lie in [0,1], got {p}")
    want_exact = m.exact and _has_rational_sqrt(pf) and _has_rational_sqrt(1 - pf)
    if want_exact:
        wp = _sqrt_scalar(pf, EXACT)
        wq = _sqrt_scalar(1 - pf, EXACT)
        ops = [wp * k for k in m.e1.kraus] + [wq * k for k in m.e0.kraus]
        ops = [k for k in ops if nonzero_entries(k)]
        return Superoperator(m.dim, tuple(ops))
    prec = precision_bits or m.precision_bits or DEFAULT_PRECISION_BITS
    with mp.workprec(prec):
        wp = mp.sqrt(mp.convert(pf))
        wq = mp.sqrt(1 - mp.convert(pf))
        ops = []
        for k in m.e1.kraus:
            ops.append(_scale_matrix(k, wp, prec))
        for k in m.e0.kraus:
            ops.append(_scale_matrix(k, wq, prec))
        ops = [k for k in ops if nonzero_entries(k)]
        return Superoperator(m.dim, tuple(ops))


def _has_rational_sqrt(p: Fraction) -> bool:
    return (math.isqrt(p.numerator) ** 2 == p.numerator
            and math.isqrt(p.denominator) ** 2 == p.denominator)


def _scale_matrix(k: Matrix, w, prec: int) -> Matrix:
    out = np.empty(k.shape, dtype=object)
    for idx in np.ndindex(*k.shape):
        out[idx] = w * as_scalar(k[idx], prec)
    return out


def mixed_superop_matrix(m: CoinAutomaton, p, mode=EXACT) -> Matrix:
    """Transfer matrix of the bias-p mixture: p*mat(e1) + (1-p)*mat(e0)."""
    if mode == EXACT:
        if not m.exact:
            raise BadInput("exact transfer matrix needs an exact automaton")
        pf = parse_fraction(p)
        a = as_scalar(pf, EXACT)
        b = as_scalar(1 - pf, EXACT)
        return a * superop_matrix(m.e1) + b * superop_matrix(m.e0)
    with mp.workprec(mode):
        pv = mp.convert(parse_fraction(p)) if not isinstance(p, float) else mp.mpf(p)
        m1 = convert_matrix(superop_matrix(m.e1), mode)
        m0 = convert_matrix(superop_matrix(m.e0), mode)
        return mp.mpc(pv) * m1 + mp.mpc(1 - pv) * m0


# ---------------------------------------------------------------------------
# Evolution

def _double_kraus(m) -> tuple:
    """complex128 stacked Kraus arrays for both channels, cached on the automaton."""
    try:
        return object.__getattribute__(m, "_dk")
    except AttributeError:
        pass
    e0, e1 = m.e0, m.e1
    k0 = np.stack([to_complex128(k) for k in e0.kraus])
    k1 = np.stack([to_complex128(k) for k in e1.kraus])
    object.__setattr__(m, "_dk", (k0, k1))
    return k0, k1


def _apply_double(kstack: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("jab,bc,jdc->ad", kstack, rho, kstack.conj(), optimize=True)


def evolve_distribution(m, p, t: int, mode=None) -> DensityMatrix:
    """State after t coin flips.

    ``mode`` is "exact", an int bit count, or None for hardware doubles.
    Accepts a CoinAutomaton or a TimeDependentAutomaton; for the latter the
    configured horizon is enforced.
    """
    time_dep = isinstance(m, TimeDependentAutomaton)
    if time_dep and m.horizon is not None and t > m.horizon:
        raise BadInput(f"step count {t} exceeds the configured horizon {m.horizon}")
    if mode == EXACT or (isinstance(mode, int) and mode > 53):
        return _evolve_object(m, p, t, time_dep, mode)
    return _evolve_double(m, p, t, time_dep)


def _evolve_object(m, p, t, time_dep, mode):
    pf = parse_fraction(p)
    if mode == EXACT:
        if not m.exact:
            raise BadInput("exact evolution needs an exact automaton")
        a = as_scalar(pf, EXACT)
        b = as_scalar(1 - pf, EXACT)
        rho = m.initial.matrix
        for step in range(t):
            e0, e1 = m.channels_at(step) if time_dep else (m.e0, m.e1)
            rho = a * apply_channel(e1, rho) + b * apply_channel(e0, rho)
        return DensityMatrix(m.dim, rho)
    with mp.workprec(mode):
        a = as_scalar(pf, mode)
        b = as_scalar(1 - pf, mode)
        rho = convert_matrix(m.initial.matrix, mode)
        for step in range(t):
            e0, e1 = m.channels_at(step) if time_dep else (m.e0, m.e1)
            e0f = Superoperator(m.dim, tuple(convert_matrix(k, mode) for k in e0.kraus))
            e1f = Superoperator(m.dim, tuple(convert_matrix(k, mode) for k in e1.kraus))
            rho = a * apply_channel(e1f, rho) + b * apply_channel(e0f, rho)
        return DensityMatrix(m.dim, rho)


def _double_steps(m, p, t, time_dep):
    """Yield rho after each step (0..t) as complex128 arrays."""
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p
    rho = to_complex128(m.initial.matrix)
    yield rho
    if time_dep:
        for step in range(t):
            e0, e1 = m.channels_at(step)
            k0 = np.stack([to_complex128(k) for k in e0.kraus])
            k1 = np.stack([to_complex128(k) for k in e1.kraus])
            rho = pv * _apply_double(k1, rho) + (1 - pv) * _apply_double(k0, rho)
            yield rho
    else:
        k0, k1 = _double_kraus(m)
        for _ in range(t):
            rho = pv * _apply_double(k1, rho) + (1 - pv) * _apply_double(k0, rho)
            yield rho


def _evolve_double(m, p, t, time_dep):
    for rho in _double_steps(m, p, t, time_dep):
        pass
    out = np.empty(rho.shape, dtype=object)
    for idx in np.ndindex(*rho.shape):
        out[idx] = mp.mpc(rho[idx])
    return DensityMatrix(m.dim, out)


def accept_prob_at(m, p, t: int, mode=None):
    """t-step acceptance probability <Acc| rho_t |Acc>.

    Returns a Fraction in exact mode, a float otherwise.
    """
    if t < 0:
        raise BadInput("step count must be nonnegative")
    rho = evolve_distribution(m, p, t, mode)
    v = rho.matrix[m.accept_index, m.accept_index]
    if isinstance(v, ExactComplex):
        return v.real_fraction
    return float(mp.re(v))


def accept_prob_curve(m, p, t_max: int, mode=None):
    """Acceptance probabilities a_0..a_{t_max} from a single evolution sweep."""
    time_dep = isinstance(m, TimeDependentAutomaton)
    if time_dep and m.horizon is not None and t_max > m.horizon:
        raise BadInput(f"step count {t_max} exceeds the configured horizon {m.horizon}")
    idx = m.accept_index
    if mode == EXACT:
        pf = parse_fraction(p)
        a = as_scalar(pf, EXACT)
        b = as_scalar(1 - pf, EXACT)
        rho = m.initial.matrix
        out = [rho[idx, idx].real_fraction]
        for step in range(t_max):
            e0, e1 = m.channels_at(step) if time_dep else (m.e0, m.e1)
            rho = a * apply_channel(e1, rho) + b * apply_channel(e0, rho)
            out.append(rho[idx, idx].real_fraction)
        return out
    return [float(r[idx, idx].real) for r in _double_steps(m, p, t_max, time_dep)]


# ---------------------------------------------------------------------------
# Sampling

_BATCH_SALT = 0x5EEDC01


def _classical_tables(m, t: int | None = None):
    """Per-(coin, state) outcome tables when every Kraus op is single-entry.

    Returns None when the machine is not classically table-driven.
    """
    time_dep = isinstance(m, TimeDependentAutomaton)
    channels = m.channels_at(t) if time_dep else (m.e0, m.e1)
    tables = []
    for ch in channels:
        gathered: list = [{} for _ in range(m.dim)]
        for nz in ch.nonzeros():
            if len(nz) != 1:
                return None
            i, j, a = nz[0]
            w = a.abs2() if isinstance(a, ExactComplex) else abs(a) ** 2
            gathered[j][i] = gathered[j].get(i, 0.0) + float(w)
        tables.append([sorted(((w, dst) for dst, w in d.items()), key=lambda t: t[1])
                       for d in gathered])
    return tables


def _table_cache(m, t=None):
    key = ("_tables", t)
    try:
        cache = object.__getattribute__(m, "_tbl")
    except AttributeError:
        cache = {}
        object.__setattr__(m, "_tbl", cache)
    if key not in cache:
        cache[key] = _classical_tables(m, t)
    return cache[key]


def philox_rng(seed: int, stream: int = 0):
    """Counter-based splittable generator; distinct (seed, stream) keys give
    independent reproducible streams."""
    return np.random.Generator(
        np.random.Philox(key=[seed & (2**64 - 1), stream & (2**64 - 1)]))


_rng_for = philox_rng


def sample_run(m, p, t_max: int = 10**6, seed: int = 0, trial: int = 0,
               keep_flips: bool = True) -> RunTrace:
    """One trajectory with a counter-based per-(seed, trial) random stream.

    Quantum branching is resolved by sampling Kraus outcomes; classical
    machines reduce to an integer walk.  Runs that neither accept nor reject
    by the cutoff are reported as unresolved, never folded into reject.
    """
    if t_max < 1:
        raise BadInput("cutoff must be at least 1")
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p
    rng = _rng_for(seed, trial)
    time_dep = isinstance(m, TimeDependentAutomaton)
    flips: list = []
    # classical fast path
    if _table_cache(m, 0 if time_dep else None) is not None:
        state = _initial_basis_index(m)
        for step in range(1, t_max + 1):
            tables = _table_cache(m, step - 1 if time_dep else None)
            if tables is None:
                raise InvariantViolation("time-dependent channel stopped being classical")
            b = 1 if rng.random() < pv else 0
            if keep_flips:
                flips.append(b)
            branches = tables[b][state]
            u = rng.random()
            acc = 0.0
            for w, dest in branches:
                acc += w
                if u < acc:
                    state = dest
                    break
            else:
                state = branches[-1][1]
            if state == m.accept_index:
                return RunTrace(seed, trial, tuple(flips), step, "accept")
            if m.reject_index is not None and state == m.reject_index:
                return RunTrace(seed, trial, tuple(flips), step, "reject")
        return RunTrace(seed, trial, tuple(flips), None, "unresolved")
    # generic quantum trajectory
    psi = np.zeros(m.dim, dtype=np.complex128)
    psi[_initial_basis_index(m)] = 1.0
    for step in range(1, t_max + 1):
        b = 1 if rng.random() < pv else 0
        if keep_flips:
            flips.append(b)
        e0, e1 = m.channels_at(step - 1) if time_dep else (m.e0, m.e1)
        kstack = [to_complex128(k) for k in (e1 if b else e0).kraus]
        amps = [k @ psi for k in kstack]
        weights = np.array([float(np.vdot(a, a).real) for a in amps])
        weights = np.clip(weights, 0.0, None)
        tot = weights.sum()
        u = rng.random() * tot
        acc = 0.0
        pick = len(weights) - 1
        for idx, w in enumerate(weights):
            acc += w
            if u < acc:
                pick = idx
                break
        psi = amps[pick] / math.sqrt(weights[pick])
        if abs(psi[m.accept_index]) ** 2 > 1 - 1e-9:
            return RunTrace(seed, trial, tuple(flips), step, "accept")
        if m.reject_index is not None and abs(psi[m.reject_index]) ** 2 > 1 - 1e-9:
            return RunTrace(seed, trial, tuple(flips), step, "reject")
    return RunTrace(seed, trial, tuple(flips), None, "unresolved")


def _initial_basis_index(m) -> int:
    nz = nonzero_entries(m.initial.matrix)
    if len(nz) != 1 or nz[0][0] != nz[0][1]:
        raise BadInput("sampling needs a basis-state initial state")
    return nz[0][0]


def monte_carlo(m, p, trials: int, t_max: int = 10**6, seed: int = 0) -> MonteCarloResult:
    """Tally many runs; classical machines are stepped in vectorised batches.

    The batch engine draws from a single Philox stream keyed by the seed, so
    results are deterministic per (m, p, trials, t_max, seed); individual
    trajectories remain reproducible through sample_run.
    """
    pv = float(parse_fraction(p)) if not isinstance(p, float) else p
    time_dep = isinstance(m, TimeDependentAutomaton)
    tables0 = _table_cache(m, 0 if time_dep else None)
    if tables0 is None:
        acc = rej = unr = 0
        for trial in range(trials):
            tr = sample_run(m, p, t_max, seed, trial, keep_flips=False)
            if tr.outcome == "accept":
                acc += 1
            elif tr.outcome == "reject":
                rej += 1
            else:
                unr += 1
        return MonteCarloResult(trials, acc, rej, unr, t_max, seed)
    rng = _rng_for(seed, _BATCH_SALT)
    max_out = 1
    dim = m.dim

    def compiled(tables):
        cum = np.zeros((2, dim, max_out))
        dest = np.zeros((2, dim, max_out), dtype=np.int64)
        for c in (0, 1):
            for s in range(dim):
                branches = tables[c][s]
                run = 0.0
                for k in range(max_out):
                    if k < len(branches):
                        run += branches[k][0]
                        cum[c, s, k] = run
                        dest[c, s, k] = branches[k][1]
                    else:
                        cum[c, s, k] = 1.1
                        dest[c, s, k] = branches[-1][1]
        return cum, dest

    if time_dep:
        horizon = m.horizon if m.horizon is not None else t_max
        steps_tables = [_table_cache(m, t) for t in range(min(t_max, horizon))]
        for tb in steps_tables:
            max_out = max(max_out, max(len(b) for c in tb for b in c))
        compiled_steps = [compiled(tb) for tb in steps_tables]
    else:
        max_out = max(len(b) for c in tables0 for b in c)
        compiled_steps = None
        cum0, dest0 = compiled(tables0)

    states = np.full(trials, _initial_basis_index(m), dtype=np.int64)
    alive = np.ones(trials, dtype=bool)
    accepted = np.zeros(trials, dtype=bool)
    rejected = np.zeros(trials, dtype=bool)
    for step in range(t_max):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        if time_dep:
            if step >= len(compiled_steps):
                break
            cum, dest = compiled_steps[step]
        else:
            cum, dest = cum0, dest0
        coins = (rng.random(idx.size) < pv).astype(np.int64)
        u = rng.random(idx.size)
        rows_cum = cum[coins, states[idx]]
        rows_dest = dest[coins, states[idx]]
        pick = (u[:, None] >= rows_cum).sum(axis=1)
        pick = np.minimum(pick, max_out - 1)
        states[idx] = rows_dest[np.arange(idx.size), pick]
        hit_acc = states[idx] == m.accept_index
        accepted[idx[hit_acc]] = True
        alive[idx[hit_acc]] = False
        if m.reject_index is not None:
            hit_rej = states[idx] == m.reject_index
            rejected[idx[hit_rej]] = True
            alive[idx[hit_rej]] = False
    acc = int(accepted.sum())
    rej = int(rejected.sum())
    return MonteCarloResult(trials, acc, rej, trials - acc - rej, t_max, seed)


# ---------------------------------------------------------------------------
# JSON format

def _encode_scalar(x, dps: int):
    if isinstance(x, ExactComplex):
        return [frac_str(x.re), frac_str(x.im)]
    with mp.workprec(int(dps * 3.33) + 16):
        xc = mp.mpc(x)
        return [mp.nstr(xc.real, dps), mp.nstr(xc.imag, dps)]


def _encode_matrix(a: Matrix, dps: int = 20):
    return [[_encode_scalar(a[i, j], dps) for j in range(a.shape[1])]
            for i in range(a.shape[0])]


def _is_exact_component(v) -> bool:
    if isinstance(v, int):
        return True
    return isinstance(v, str) and ("." not in v and "e" not in v and "E" not in v)


def _decode_scalar(pair, prec: int):
    re, im = pair
    if _is_exact_component(re) and _is_exact_component(im):
        return ExactComplex(parse_fraction(re), parse_fraction(im))
    with mp.workprec(prec):
        def comp(v):
            if _is_exact_component(v):
                return mp.convert(parse_fraction(v))
            return mp.mpf(str(v))
        return mp.mpc(comp(re), comp(im))


def _decode_matrix(rows, prec: int) -> Matrix:
    n = len(rows)
    c = len(rows[0])
    out = np.empty((n, c), dtype=object)
    for i in range(n):
        for j in range(c):
            out[i, j] = _decode_scalar(rows[i][j], prec)
    return out


def to_json_dict(m: CoinAutomaton) -> dict:
    dps = int((m.precision_bits or 64) * 0.30103) + 5
    d = {
        "dim": m.dim,
        "mode": m.mode,
        "accept": m.accept_index,
        "reject": m.reject_index,
        "accepting_set": sorted(m.accepting_set),
        "initial": _encode_matrix(m.initial.matrix, dps),
        "e0": {"kraus": [_encode_matrix(k, dps) for k in m.e0.kraus]},
        "e1": {"kraus": [_encode_matrix(k, dps) for k in m.e1.kraus]},
    }
    if m.precision_bits:
        d["precision_bits"] = m.precision_bits
    if m.meta:
        d["meta"] = m.meta
    return d


def from_json_dict(d: dict) -> CoinAutomaton:
    prec = d.get("precision_bits") or DEFAULT_PRECISION_BITS
    dim = d["dim"]
    return CoinAutomaton(
        dim=dim,
        e0=Superoperator(dim, tuple(_decode_matrix(k, prec) for k in d["e0"]["kraus"])),
        e1=Superoperator(dim, tuple(_decode_matrix(k, prec) for k in d["e1"]["kraus"])),
        initial=DensityMatrix(dim, _decode_matrix(d["initial"], prec)),
        accept_index=d["accept"],
        reject_index=d.get("reject"),
        mode=d.get("mode", HALTING),
        accepting_set=frozenset(d.get("accepting_set") or ()),
        precision_bits=d.get("precision_bits"),
        meta=d.get("meta", {}),
    )


def save_json(m: CoinAutomaton, path):
    with open(path, "w") as fh:
        json.dump(to_json_dict(m), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> CoinAutomaton:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
