"""Gallery of concrete coin-distinguishing machines.

Includes the two-state quantum distinguisher with its analog rotation
counter, the classical +-K random walk, the time-dependent run-of-heads
machine, the 0-vs-eps geometric race, the one-sided first-heads machine, and
sequential majority amplification.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from mpmath import mp

from .automaton import (
    HALTING,
    ONE_SIDED,
    CoinAutomaton,
    TimeDependentAutomaton,
    classical_channel,
)
from .errors import BadInput, InvariantViolation
from .fixed_point import halting_mass
from .linalg import DensityMatrix, Superoperator, compose, eye, zeros
from .numerics import DEFAULT_PRECISION_BITS, EXACT, ExactComplex, parse_fraction


def first_heads_automaton() -> CoinAutomaton:
    """Accepts on the first heads, never rejects (one-sided, dim 2)."""
    heads = classical_channel(2, {0: [(1, 1)], 1: [(1, 1)]})
    tails = classical_channel(2, {0: [(1, 0)], 1: [(1, 1)]})
    return CoinAutomaton(dim=2, e0=tails, e1=heads,
                         initial=DensityMatrix.basis_state(2, 0),
                         accept_index=1, reject_index=None, mode=ONE_SIDED,
                         meta={"gallery": "first-heads"})


def single_flip_automaton() -> CoinAutomaton:
    """One flip decides: heads accepts, tails rejects (dim 3); a(p) = p."""
    heads = classical_channel(3, {0: [(1, 1)], 1: [(1, 1)], 2: [(1, 2)]})
    tails = classical_channel(3, {0: [(1, 2)], 1: [(1, 1)], 2: [(1, 2)]})
    return CoinAutomaton(dim=3, e0=tails, e1=heads,
                         initial=DensityMatrix.basis_state(3, 0),
                         accept_index=1, reject_index=2,
                         meta={"gallery": "single-flip"})


def hc_walk_automaton(p, epsilon, k: int) -> CoinAutomaton:
    """Random walk on {-K..K}: heads moves up w.p. 1-p, tails moves down w.p. p.

    Hitting +K accepts, hitting -K rejects; the walk starts at 0.  At coin
    bias q the acceptance is the gambler's-ruin value 1/(1 + r^K) with odds
    r = (1-q)p / (q(1-p)).  dim = 2K+3 (walk states plus Accept and Reject).
    """
    if k < 1:
        raise BadInput("walk radius K must be at least 1")
    pf = parse_fraction(p)
    ef = parse_fraction(epsilon)
    if not 0 < pf < 1:
        raise BadInput("build bias must lie strictly inside (0,1)")
    dim = 2 * k + 3
    acc = 2 * k + 1
    rej = 2 * k + 2
    idx = lambda s: s + k  # state s in -K..K

    def dest_up(s):
        return acc if s + 1 == k else idx(s + 1)

    def dest_down(s):
        return rej if s - 1 == -k else idx(s - 1)

    heads_moves = {idx(k): [(1, acc)], idx(-k): [(1, rej)],
                   acc: [(1, acc)], rej: [(1, rej)]}
    tails_moves = {idx(k): [(1, acc)], idx(-k): [(1, rej)],
                   acc: [(1, acc)], rej: [(1, rej)]}
    for s in range(-k + 1, k):
        heads_moves[idx(s)] = [(1 - pf, dest_up(s)), (pf, idx(s))]
        tails_moves[idx(s)] = [(pf, dest_down(s)), (1 - pf, idx(s))]
    return CoinAutomaton(
        dim=dim,
        e0=classical_channel(dim, tails_moves),
        e1=classical_channel(dim, heads_moves),
        initial=DensityMatrix.basis_state(dim, idx(0)),
        accept_index=acc, reject_index=rej,
        meta={"gallery": "hc-walk", "p": str(pf), "epsilon": str(ef), "K": k})


def zero_vs_eps_automaton(epsilon) -> CoinAutomaton:
    """Geometric race: each step rejects w.p. eps, otherwise accepts on heads.

    a(q) = (1-eps) q / (eps + (1-eps) q).
    """
    ef = parse_fraction(epsilon)
    if not 0 < ef < 1:
        raise BadInput("epsilon must lie strictly inside (0,1)")
    heads = classical_channel(3, {0: [(1 - ef, 1), (ef, 2)], 1: [(1, 1)], 2: [(1, 2)]})
    tails = classical_channel(3, {0: [(1 - ef, 0), (ef, 2)], 1: [(1, 1)], 2: [(1, 2)]})
    return CoinAutomaton(dim=3, e0=tails, e1=heads,
                         initial=DensityMatrix.basis_state(3, 0),
                         accept_index=1, reject_index=2,
                         meta={"gallery": "zero-vs-eps", "epsilon": str(ef)})


def run_of_heads_automaton(epsilon) -> TimeDependentAutomaton:
    """Time-dependent search for a run of 1/eps consecutive heads.

    Processes 2^(1/eps) disjoint blocks of 1/eps flips; the first all-heads
    block accepts, and once the last block has passed the machine halts and
    rejects.  Acceptance at bias q after the full horizon is
    1 - (1 - q^(1/eps))^(2^(1/eps)).
    """
    ef = parse_fraction(epsilon)
    if ef <= 0 or (1 / ef).denominator != 1:
        raise BadInput("1/epsilon must be a positive integer")
    run = int(1 / ef)
    if run > 6:
        raise BadInput("desk-scale construction needs 1/epsilon <= 6")
    blocks = 2 ** run
    horizon = run * blocks
    w, f, acc, rej = 0, 1, 2, 3
    absorbing = {acc: [(1, acc)], rej: [(1, rej)]}

    def generator(t):
        if t >= horizon:
            halt = {w: [(1, rej)], f: [(1, rej)], **absorbing}
            ch = classical_channel(4, halt)
            return ch, ch
        last = (t % run) == run - 1
        heads = {w: [(1, acc if last else w)],
                 f: [(1, w if last else f)], **absorbing}
        tails = {w: [(1, w if last else f)],
                 f: [(1, w if last else f)], **absorbing}
        return classical_channel(4, tails), classical_channel(4, heads)

    return TimeDependentAutomaton(
        dim=4, generator=generator,
        initial=DensityMatrix.basis_state(4, w),
        accept_index=acc, reject_index=rej, horizon=horizon + 1,
        meta={"gallery": "run-of-heads", "epsilon": str(ef),
              "run_length": run, "blocks": blocks, "flip_horizon": horizon})


def recommended_precision(epsilon, b: int) -> int:
    """Auto-escalated precision floor for rotation machines: the spectral gap
    scales like eps^2/B, so the significand needs ~3 log2(B/eps^2) bits."""
    ef = parse_fraction(epsilon)
    if ef == 0:
        return DEFAULT_PRECISION_BITS
    ratio = float(Fraction(b) / (ef * ef))
    return max(DEFAULT_PRECISION_BITS, math.ceil(3 * math.log2(ratio)) + 64)


def quantum_distinguisher(p, epsilon, a: int, b: int,
                          precision_bits: int | None = None) -> CoinAutomaton:
    """Two-state analog counter: rotate by eps(1-p)/A on heads and -eps p/A on
    tails, then measure with probability alpha = eps^2/B (|0> mass rejects,
    |1> mass accepts).  dim 4: |0>, |1>, |Accept>, |Reject>."""
    pf = parse_fraction(p)
    ef = parse_fraction(epsilon)
    if a < 1 or b < 1:
        raise BadInput("A and B must be positive integers")
    if not (0 <= pf <= 1) or ef < 0 or pf + ef > 1:
        raise BadInput("need 0 <= p and 0 <= eps with p + eps <= 1")
    prec = max(precision_bits or 0, recommended_precision(ef, b))
    alpha = ef * ef / b
    theta_h = ef * (1 - pf) / a
    theta_t = -ef * pf / a
    with mp.workprec(prec):
        e1 = _rotate_measure_channel(theta_h, alpha, prec)
        e0 = _rotate_measure_channel(theta_t, alpha, prec)
        return CoinAutomaton(
            dim=4, e0=e0, e1=e1,
            initial=DensityMatrix.basis_state(4, 0, prec),
            accept_index=2, reject_index=3, precision_bits=prec,
            meta={"gallery": "quantum-distinguisher", "p": str(pf),
                  "epsilon": str(ef), "A": a, "B": b,
                  "alpha": str(alpha), "theta_heads": str(theta_h),
                  "theta_tails": str(theta_t)})


def _rotate_measure_channel(theta: Fraction, alpha: Fraction, prec: int) -> Superoperator:
    """Measurement-after-rotation step with the five-operator Kraus family
    {sqrt(a)|Rej><0|, sqrt(a)|Acc><1|, sqrt(1-a) P01, |Acc><Acc|, |Rej><Rej|}
    composed after U(theta) on the counter subspace."""
    c = mp.cos(mp.convert(theta))
    s = mp.sin(mp.convert(theta))
    rot = eye(4, prec)
    rot[0, 0] = mp.mpc(c)
    rot[0, 1] = mp.mpc(-s)
    rot[1, 0] = mp.mpc(s)
    rot[1, 1] = mp.mpc(c)
    rot_ch = Superoperator(4, (rot,))
    sa = mp.sqrt(mp.convert(alpha))
    sna = mp.sqrt(1 - mp.convert(alpha))
    k_rej = zeros(4, 4, prec)
    k_rej[3, 0] = mp.mpc(sa)
    k_acc = zeros(4, 4, prec)
    k_acc[2, 1] = mp.mpc(sa)
    k_keep = zeros(4, 4, prec)
    k_keep[0, 0] = mp.mpc(sna)
    k_keep[1, 1] = mp.mpc(sna)
    k_accself = zeros(4, 4, prec)
    k_accself[2, 2] = mp.mpc(1)
    k_rejself = zeros(4, 4, prec)
    k_rejself[3, 3] = mp.mpc(1)
    measure = Superoperator(4, (k_rej, k_acc, k_keep, k_accself, k_rejself))
    return compose(measure, rot_ch)


def amplified(m: CoinAutomaton, copies: int) -> CoinAutomaton:
    """Sequential restart-and-majority amplification of a halting machine.

    Runs ``copies`` independent logical trials of the base machine one after
    another, counting acceptances in extra counter states, and accepts iff a
    majority of trials accepted.  Dimension: copies^2 * base_dim + 2.
    """
    if copies < 1 or copies % 2 == 0:
        raise BadInput("copies must be a positive odd integer")
    if m.mode != HALTING:
        raise BadInput("amplification needs a halting base machine")
    mass = halting_mass(m, "1/2")
    halts = (mass == 1) if isinstance(mass, Fraction) else (float(mass) > 1 - 1e-9)
    if not halts:
        raise InvariantViolation(
            f"base machine halts with probability {float(mass):.6g} < 1")
    nb = m.dim
    c = copies
    init_b = _basis_index(m.initial)
    dim = c * c * nb + 2
    amp_acc = c * c * nb
    amp_rej = amp_acc + 1

    def cell(i, acount, s):
        return (i * c + acount) * nb + s

    redirect = {}
    for i in range(c):
        for acount in range(c):
            src_a = cell(i, acount, m.accept_index)
            src_r = cell(i, acount, m.reject_index)
            wins = acount + 1
            if i == c - 1:
                redirect[src_a] = amp_acc if wins > c / 2 else amp_rej
                redirect[src_r] = amp_acc if acount > c / 2 else amp_rej
            else:
                redirect[src_a] = cell(i + 1, min(wins, c - 1), init_b)
                redirect[src_r] = cell(i + 1, acount, init_b)

    mode = EXACT if m.exact else (m.precision_bits or 53)
    ident_part = eye(dim, mode)
    for src in redirect:
        ident_part[src, src] = _zero_like(mode)
    redir_ops = [ident_part]
    for src, dst in redirect.items():
        op = zeros(dim, dim, mode)
        op[dst, src] = _one_like(mode)
        redir_ops.append(op)
    redirect_ch = Superoperator(dim, tuple(redir_ops))

    def lift(ch: Superoperator) -> Superoperator:
        ops = []
        for k in ch.kraus:
            big = zeros(dim, dim, mode)
            for i in range(c):
                for acount in range(c):
                    base = (i * c + acount) * nb
                    for r in range(nb):
                        for col in range(nb):
                            x = k[r, col]
                            if not (x.is_zero() if isinstance(x, ExactComplex) else x == 0):
                                big[base + r, base + col] = x
            ops.append(big)
        guard = zeros(dim, dim, mode)
        guard[amp_acc, amp_acc] = _one_like(mode)
        guard[amp_rej, amp_rej] = _one_like(mode)
        ops.append(guard)
        return compose(redirect_ch, Superoperator(dim, tuple(ops)))

    return CoinAutomaton(
        dim=dim, e0=lift(m.e0), e1=lift(m.e1),
        initial=DensityMatrix.basis_state(dim, cell(0, 0, init_b), mode),
        accept_index=amp_acc, reject_index=amp_rej,
        precision_bits=m.precision_bits,
        meta={"gallery": "amplified", "copies": c, "base_dim": nb,
              "dim": dim, "base": m.meta.get("gallery", "custom")})


def _basis_index(rho: DensityMatrix) -> int:
    from .linalg import nonzero_entries
    nz = nonzero_entries(rho.matrix)
    if len(nz) != 1 or nz[0][0] != nz[0][1]:
        raise BadInput("amplification needs a basis-state initial state")
    return nz[0][0]


def _zero_like(mode):
    return ExactComplex(0) if mode == EXACT else mp.mpc(0)


def _one_like(mode):
    return ExactComplex(1) if mode == EXACT else mp.mpc(1)


# ---------------------------------------------------------------------------
# Registry for the CLI

GALLERY = {
    "first-heads": (first_heads_automaton, ()),
    "single-flip": (single_flip_automaton, ()),
    "hc-walk": (hc_walk_automaton, ("p", "epsilon", "K")),
    "zero-vs-eps": (zero_vs_eps_automaton, ("epsilon",)),
    "run-of-heads": (run_of_heads_automaton, ("epsilon",)),
    "quantum-distinguisher": (quantum_distinguisher, ("p", "epsilon", "A", "B")),
}

ALIASES = {"quantum": "quantum-distinguisher", "hc_walk": "hc-walk"}


def build_gallery(name: str, **params):
    """Build a gallery machine by registry name with string-friendly params."""
    key = ALIASES.get(name, name)
    if key not in GALLERY:
        raise BadInput(f"unknown gallery machine {name!r}; "
                       f"known: {', '.join(sorted(GALLERY))}")
    builder, spec_params = GALLERY[key]
    kwargs = {}
    for pname in spec_params:
        if pname not in params:
            raise BadInput(f"gallery {key!r} needs parameter {pname}")
        val = params.pop(pname)
        if pname in ("K", "A", "B"):
            kwargs[pname.lower() if pname != "K" else "k"] = int(val)
        else:
            kwargs[pname] = val
    if "precision_bits" in params and key == "quantum-distinguisher":
        kwargs["precision_bits"] = int(params.pop("precision_bits"))
    if params:
        raise BadInput(f"unused gallery parameters: {sorted(params)}")
    return builder(**kwargs)
