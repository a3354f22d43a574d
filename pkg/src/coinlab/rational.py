"""Exact polynomial and rational-function machinery.

Fits the limiting acceptance a(p) of a rational-entry machine as an exact
ratio of polynomials, derives the threshold polynomial whose zeros are the
potential transition values, isolates real roots with Sturm sequences and
bisection, certifies a computable minimum root separation, and builds the
counting advice (w, r) that pins down a safe rounded bias.

All arithmetic here is exact; floats appear only in convenience evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadInput, InvariantViolation
from .fixed_point import limiting_accept
from .numerics import (
    bits_to_cover,
    frac_bit,
    frac_sqrt_lower,
    frac_str,
    parse_fraction,
    simplest_between,
    trunc_bits,
)


class Polynomial:
    """Univariate polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [c if isinstance(c, Fraction) else parse_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def tau(self) -> int:
        """Max coefficient bitlength of the primitive integer form."""
        prim = self.primitive()
        if prim.is_zero:
            return 0
        return max(abs(c.numerator).bit_length() for c in prim.coeffs)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Polynomial([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.is_zero or other.is_zero:
            return Polynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial([x * c for x in self.coeffs])

    def eval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def sign_at(self, x: Fraction) -> int:
        """Sign of P(x) via homogeneous integer evaluation (no rounding)."""
        if self.is_zero:
            return 0
        num, den = x.numerator, x.denominator
        prim = self.primitive()
        d = prim.degree
        acc = 0
        npow = 1
        dpow = den ** d
        for c in prim.coeffs:
            acc += c.numerator * npow * dpow
            npow *= num
            if dpow != 1:
                dpow //= den
        return (acc > 0) - (acc < 0)

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other) -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        den = other.coeffs
        dd = other.degree
        q = [Fraction(0)] * max(len(rem) - dd, 0)
        while len(rem) - 1 >= dd and any(rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            shift = len(rem) - 1 - dd
            factor = rem[-1] / den[-1]
            q[shift] = factor
            for i, c in enumerate(den):
                rem[shift + i] -= factor * c
            rem.pop()
        return Polynomial(q), Polynomial(rem)

    def gcd(self, other) -> "Polynomial":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        if a.is_zero:
            return a
        return a.scale(1 / a.coeffs[-1])  # monic

    def square_free(self) -> "Polynomial":
        if self.degree < 1:
            return self.primitive()
        g = self.gcd(self.derivative())
        if g.degree < 1:
            return self.primitive()
        return self.divmod(g)[0].primitive()

    def primitive(self) -> "Polynomial":
        """Integer coefficients with content 1, sign of leading coeff kept."""
        if self.is_zero:
            return self
        lcm = 1
        for c in self.coeffs:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [c.numerator * (lcm // c.denominator) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, abs(v))
        return Polynomial([Fraction(v // g) for v in ints])

    def norm2_sq(self) -> Fraction:
        return sum((c * c for c in self.coeffs), Fraction(0))

    def cauchy_root_bound(self) -> Fraction:
        """All complex roots have magnitude below this bound."""
        if self.degree < 1:
            return Fraction(1)
        lead = abs(self.coeffs[-1])
        return 1 + max(abs(c) for c in self.coeffs[:-1]) / lead


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Ratio of exact polynomials; reduced means gcd(Q, R) = 1 and R monic."""

    numerator: Polynomial
    denominator: Polynomial
    reduced: bool = False

    def __post_init__(self):
        if self.denominator.is_zero:
            raise BadInput("denominator is identically zero")

    def reduce(self) -> "RationalFunction":
        g = self.numerator.gcd(self.denominator)
        q, r = self.numerator, self.denominator
        if g.degree >= 1:
            q = q.divmod(g)[0]
            r = r.divmod(g)[0]
        lead = r.coeffs[-1]
        return RationalFunction(q.scale(1 / lead), r.scale(1 / lead), reduced=True)

    def eval(self, x) -> Fraction:
        xf = parse_fraction(x)
        den = self.denominator.eval(xf)
        if den == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.numerator.eval(xf) / den

    def eval_float(self, x: float) -> float:
        return self.numerator.eval_float(x) / self.denominator.eval_float(x)


# ---------------------------------------------------------------------------
# Rational interpolation of a(p)

def _nullspace_vector(rows):
    """One rational kernel vector of a row-list matrix via fraction-free
    Bareiss elimination, or None when the kernel is trivial."""
    m = []
    for row in rows:
        lcm = 1
        for c in row:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        m.append([c.numerator * (lcm // c.denominator) for c in row])
    nrows = len(m)
    ncols = len(m[0])
    piv_rows = []
    piv_cols = []
    prev = 1
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        piv_rows.append(r)
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in piv_cols]
    if not free:
        return None
    target = free[-1]
    sol = [Fraction(0)] * ncols
    sol[target] = Fraction(1)
    for k in range(len(piv_cols) - 1, -1, -1):
        row = m[piv_rows[k]]
        c = piv_cols[k]
        acc = Fraction(0)
        for j in range(c + 1, ncols):
            if sol[j] != 0 and row[j] != 0:
                acc += row[j] * sol[j]
        sol[c] = -acc / row[c]
    return sol


def fit_rational(m, max_degree: int | None = None) -> RationalFunction:
    """Exact rational interpolation of the limiting acceptance a(p).

    Samples a(p) at 2*max_degree+3 uniform interior rationals, solves the
    homogeneous Cauchy interpolation system exactly, reduces the result, and
    verifies it against 20 fresh sample points (exact equality).
    """
    if not m.exact:
        raise BadInput("rational fitting needs rational-entry channels")
    deg = max_degree if max_degree is not None else m.dim * m.dim
    fit = _fit_at_points(m, deg, _sample_points(deg, 0))
    if fit is None:
        fit = _fit_at_points(m, deg, _sample_points(deg, 1))
    if fit is None:
        raise InvariantViolation("rational interpolation found no kernel vector")
    _validate_fit(m, fit, deg)
    return fit


def _sample_points(deg: int, attempt: int):
    den = 2 * deg + 4 + attempt
    return [Fraction(i, den) for i in range(1, 2 * deg + 4)]


def _fit_at_points(m, deg, points):
    rows = []
    for p in points:
        a = limiting_accept(m, p, mode="exact")
        prow = [Fraction(1)]
        for _ in range(deg):
            prow.append(prow[-1] * p)
        rows.append(prow + [-a * pk for pk in prow])
    sol = _nullspace_vector(rows)
    if sol is None:
        return None
    q = Polynomial(sol[: deg + 1])
    r = Polynomial(sol[deg + 1:])
    if r.is_zero:
        return None
    return RationalFunction(q, r).reduce()


def _validate_fit(m, fit: RationalFunction, deg: int):
    if fit.numerator.degree > deg or fit.denominator.degree > deg:
        raise InvariantViolation("fit degree exceeds the requested bound")
    den = 2 * (2 * deg + 4) + 1  # coprime to the fit-point denominator
    checked = 0
    j = 1
    while checked < 20:
        x = Fraction(j, den)
        j += 1
        if x >= 1:
            raise InvariantViolation("ran out of validation points")
        if fit.denominator.eval(x) == 0:
            continue
        if fit.eval(x) != limiting_accept(m, x, mode="exact"):
            raise InvariantViolation(f"fit mismatch at validation point {x}")
        checked += 1


def threshold_poly(a: RationalFunction) -> tuple[Polynomial, Polynomial]:
    """U and V with U/V = (a - 3/5)(a - 2/5), both primitive integer.

    U = (5Q - 3R)(5Q - 2R), V = 25 R^2; the zeros of U in (0,1) are the
    potential transition values of the machine behind the fit.
    """
    if not a.reduced:
        a = a.reduce()
    q, r = a.numerator, a.denominator
    f1 = q.scale(5) - r.scale(3)
    f2 = q.scale(5) - r.scale(2)
    u = (f1 * f2).primitive()
    v = (r * r).scale(25).primitive()
    return u, v


# ---------------------------------------------------------------------------
# Root isolation

@dataclass(frozen=True, eq=False)
class RootInterval:
    """Open interval holding exactly one real root; endpoints are not roots."""

    lo: Fraction
    hi: Fraction
    multiplicity_free: bool = True
    exact: Fraction | None = None
    sqf: Polynomial = field(default=None, repr=False)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    def refine(self, width_target: Fraction) -> "RootInterval":
        """Shrink by sign bisection until width <= width_target."""
        lo, hi, exact = self.lo, self.hi, self.exact
        if exact is not None:
            while hi - lo > width_target:
                lo, hi = _shrink_around(self.sqf, exact, lo, hi)
            return RootInterval(lo, hi, self.multiplicity_free, exact, self.sqf)
        slo = self.sqf.sign_at(lo)
        while hi - lo > width_target:
            mid = (lo + hi) / 2
            sm = self.sqf.sign_at(mid)
            if sm == 0:
                exact = mid
                lo, hi = _shrink_around(self.sqf, mid, lo, hi)
                return RootInterval(lo, hi, self.multiplicity_free, exact,
                                    self.sqf).refine(width_target)
            if sm == slo:
                lo = mid
            else:
                hi = mid
        cand = simplest_between(lo, hi)
        if self.sqf.eval(cand) == 0:
            exact = cand
        return RootInterval(lo, hi, self.multiplicity_free, exact, self.sqf)

    def bit(self, i: int) -> int:
        """i-th binary fraction bit of the root (root must lie in [0,1))."""
        if self.exact is not None:
            return frac_bit(self.exact, i)
        iv = self
        for _ in range(64 + i * 4):
            scale = 1 << i
            flo = math.floor(iv.lo * scale)
            fhi = math.floor(iv.hi * scale)
            if flo == fhi:
                return flo & 1
            iv = iv.refine(iv.width / 8)
            if iv.exact is not None:
                return frac_bit(iv.exact, i)
        raise InvariantViolation("bit refinement did not settle")


def _shrink_around(poly: Polynomial, root: Fraction, lo: Fraction, hi: Fraction):
    """Halve an interval around a known exact root, keeping endpoints non-roots."""
    nlo = (lo + root) / 2
    nhi = (root + hi) / 2
    while poly.eval(nlo) == 0:
        nlo = (nlo + root) / 2
    while poly.eval(nhi) == 0:
        nhi = (root + nhi) / 2
    return nlo, nhi


def _sturm_chain(p: Polynomial):
    chain = [p.primitive(), p.derivative().primitive()]
    while chain[-1].degree >= 1:
        rem = chain[-2].divmod(chain[-1])[1]
        if rem.is_zero:
            break
        chain.append(rem.scale(-1).primitive())
    if chain[-1].is_zero:
        chain.pop()
    return chain


def _variations(chain, x: Fraction) -> int:
    signs = [q.sign_at(x) for q in chain]
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def isolate_roots(p: Polynomial, lo=0, hi=1, precision_bits: int = 64):
    """Disjoint isolating intervals for the distinct real roots in (lo, hi).

    Sturm counts isolate; bisection refines each interval to width
    <= 2^-precision_bits.  The square-free part is taken automatically and
    rational roots found along the way are recorded exactly.
    """
    if p.is_zero:
        raise BadInput("cannot isolate roots of the zero polynomial")
    lof, hif = parse_fraction(lo), parse_fraction(hi)
    if not lof < hif:
        raise BadInput("need lo < hi")
    sqf = p.square_free()
    if sqf.degree < 1:
        return []
    gcd_part = p.primitive().gcd(p.derivative().primitive())
    chain = _sturm_chain(sqf)
    # nudge endpoints off roots (endpoint roots are excluded by contract)
    width = hif - lof
    while sqf.eval(lof) == 0:
        lof += width / (1 << 20)
    while sqf.eval(hif) == 0:
        hif -= width / (1 << 20)
    target = Fraction(1, 1 << precision_bits)
    found = []
    stack = [(lof, hif, _variations(chain, lof), _variations(chain, hif))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count <= 0:
            continue
        if count == 1:
            iv = RootInterval(a, b, True, None, sqf).refine(target)
            found.append(iv)
            continue
        mid = (a + b) / 2
        if sqf.eval(mid) == 0:
            span = (b - a) / 4
            while True:
                mlo, mhi = mid - span, mid + span
                if (sqf.eval(mlo) != 0 and sqf.eval(mhi) != 0
                        and _variations(chain, mlo) - _variations(chain, mhi) == 1):
                    break
                span /= 2
            iv = RootInterval(mlo, mhi, True, mid, sqf).refine(target)
            found.append(iv)
            stack.append((a, mlo, va, _variations(chain, mlo)))
            stack.append((mhi, b, _variations(chain, mhi), vb))
        else:
            vm = _variations(chain, mid)
            stack.append((a, mid, va, vm))
            stack.append((mid, b, vm, vb))
    found.sort(key=lambda iv: iv.midpoint)
    if gcd_part.degree >= 1:
        gsqf = gcd_part.square_free()
        gchain = _sturm_chain(gsqf)
        out = []
        for iv in found:
            mult_free = _variations(gchain, iv.lo) - _variations(gchain, iv.hi) == 0 \
                if gsqf.eval(iv.lo) != 0 and gsqf.eval(iv.hi) != 0 else \
                gsqf.eval(iv.midpoint) != 0
            out.append(RootInterval(iv.lo, iv.hi, mult_free, iv.exact, iv.sqf))
        return out
    return found


def root_bit(p: Polynomial, j: int, i: int, lo=0, hi=1,
             precision_bits: int = 64) -> int:
    """i-th binary expansion bit of the j-th (ascending) real root in (lo, hi)."""
    roots = isolate_roots(p, lo, hi, precision_bits)
    if not 0 <= j < len(roots):
        raise BadInput(f"root index {j} out of range ({len(roots)} roots)")
    return roots[j].bit(i)


# ---------------------------------------------------------------------------
# Separation bounds

@dataclass(frozen=True)
class SeparationReport:
    observed: Fraction | None   # min midpoint distance of adjacent real roots
    certified: Fraction | None  # min certified gap (interval-to-interval)
    bound: Fraction             # computable Mahler-type lower bound
    bound_sq: Fraction
    degree: int

    @property
    def ok(self) -> bool:
        if self.observed is None:
            return True
        return self.observed >= self.bound and self.certified > 0


def mahler_bound_sq(p: Polynomial) -> Fraction:
    """Square of the separation bound sqrt(3) d^-((d+2)/2) ||P||_2^-(d-1) for
    the primitive square-free part."""
    sqf = p.square_free().primitive()
    d = sqf.degree
    if d < 2:
        return Fraction(1)
    n2 = sqf.norm2_sq()
    return Fraction(3) / (Fraction(d) ** (d + 2) * n2 ** (d - 1))


def min_separation(p: Polynomial, precision_bits: int = 64) -> SeparationReport:
    """Observed minimum distance between real roots plus the certified bound.

    Asserts observed >= bound; the bound applies to all distinct complex
    roots, so real pairs can only sit farther apart.
    """
    if p.is_zero:
        raise BadInput("zero polynomial has no separation")
    sqf = p.square_free().primitive()
    d = sqf.degree
    bsq = mahler_bound_sq(p)
    bound = frac_sqrt_lower(bsq, 80)
    if d < 2:
        return SeparationReport(None, None, bound, bsq, d)
    m = sqf.cauchy_root_bound()
    roots = isolate_roots(sqf, -m, m, precision_bits)
    width_cap = bound / 8
    roots = [iv.refine(min(width_cap, iv.width)) for iv in roots]
    if len(roots) < 2:
        return SeparationReport(None, None, bound, bsq, d)
    observed = None
    certified = None
    for a, b in zip(roots, roots[1:]):
        dist = b.midpoint - a.midpoint
        gap = b.lo - a.hi
        observed = dist if observed is None else min(observed, dist)
        certified = gap if certified is None else min(certified, gap)
    report = SeparationReport(observed, certified, bound, bsq, d)
    if not report.ok:
        raise InvariantViolation(
            f"observed separation {observed} fell below the bound {bound}")
    return report


# ---------------------------------------------------------------------------
# Transition atlas and counting advice

@dataclass(frozen=True, eq=False)
class TransitionAtlas:
    """Sorted potential transition values of a labelled machine family."""

    labels: tuple
    fits: dict                      # label -> RationalFunction
    thresholds: dict                # label -> (U, V)
    potential_values: tuple         # sorted Fractions, 0 always present
    separation: Fraction            # min gap, including the distance to 1
    separation_report: SeparationReport
    roots: dict                     # label -> list of RootInterval

    def count_upto(self, p_star: Fraction) -> int:
        return sum(1 for v in self.potential_values if v <= p_star)


@dataclass(frozen=True)
class AdviceRecord:
    """Counting advice: w potential values lie at or below the true bias; the
    rounded bias r sits safely above the w-th value with a finite expansion."""

    w: int
    r: Fraction
    h: int
    epsilon_used: Fraction
    p0: Fraction

    def bit(self, i: int) -> int:
        return frac_bit(self.r, i)


def build_atlas(family) -> TransitionAtlas:
    """Fit every family member, collect the zeros of all threshold polynomials
    (plus 0) and certify their pairwise separation, including the gap to 1."""
    members = []
    for item in family:
        if isinstance(item, tuple):
            members.append(item)
        else:
            members.append((item.meta.get("gallery", f"m{len(members)}"), item))
    if len({lbl for lbl, _ in members}) != len(members):
        raise BadInput("family labels must be distinct")
    fits = {}
    thresholds = {}
    for label, machine in members:
        try:
            fits[label] = fit_rational(machine)
        except Exception as exc:
            raise InvariantViolation(f"fit failed for member {label!r}: {exc}") from exc
        thresholds[label] = threshold_poly(fits[label])
    product = Polynomial([0, 1]) * Polynomial([1, -1])  # p(1-p)
    any_roots = False
    for label in fits:
        u = thresholds[label][0]
        if u.degree >= 1:
            product = product * u
            any_roots = True
    sep_report = min_separation(product, 64)
    width_cap = sep_report.bound / 8
    roots = {}
    placed = []
    for label, _ in members:
        u = thresholds[label][0]
        ivs = isolate_roots(u, 0, 1, 64) if u.degree >= 1 and any_roots else []
        ivs = [iv.refine(min(width_cap, iv.width)) for iv in ivs]
        roots[label] = ivs
        placed.extend(ivs)
    placed.sort(key=lambda iv: iv.midpoint)
    values = [Fraction(0)]
    for iv in placed:
        rep = iv.midpoint
        if values and rep - values[-1] < sep_report.bound / 2:
            continue  # duplicate root shared across members
        values.append(rep)
    if values != sorted(set(values)):
        raise InvariantViolation("potential values are not strictly sorted")
    gaps = [b - a for a, b in zip(values, values[1:])]
    gaps.append(1 - values[-1])
    separation = min(gaps)
    if separation <= 0:
        raise InvariantViolation("atlas separation must be positive")
    return TransitionAtlas(tuple(lbl for lbl, _ in members), fits, thresholds,
                           tuple(values), separation, sep_report, roots)


def build_advice(atlas: TransitionAtlas, p_star) -> AdviceRecord:
    """Counting advice for a true bias: w values lie at or below p_star (ties
    count), and r = trunc_h(p0 + min(separation, 1-p0)/4) rounds the bias to a
    finite expansion with no potential value inside (p0, r]."""
    ps = parse_fraction(p_star)
    if not 0 < ps < 1:
        raise BadInput("p_star must lie strictly inside (0,1)")
    w = atlas.count_upto(ps)
    record = replay_advice(atlas, w)
    below = [v for v in atlas.potential_values if v <= ps]
    if record.p0 != max(below):
        raise InvariantViolation("advice replay disagrees with direct count")
    return record


def replay_advice(atlas: TransitionAtlas, w: int) -> AdviceRecord:
    """Reconstruct the rounded bias from the count alone (the advice string)."""
    if not 1 <= w <= len(atlas.potential_values):
        raise BadInput(f"count {w} outside atlas range")
    p0 = atlas.potential_values[w - 1]
    eps_raw = min(atlas.separation, 1 - p0) / 4
    h = bits_to_cover(eps_raw) + 8
    r = trunc_bits(p0 + eps_raw, h)
    eps_used = r - p0
    if not (0 < eps_used <= eps_raw):
        raise InvariantViolation("rounded bias escaped the safe window")
    if not 0 < r < 1:
        raise InvariantViolation("rounded bias left (0,1)")
    for v in atlas.potential_values:
        if p0 < v <= r:
            raise InvariantViolation("a potential value invaded (p0, r]")
    if (r * (1 << h)).denominator != 1:
        raise InvariantViolation("rounded bias expansion is not h bits long")
    return AdviceRecord(w, r, h, eps_used, p0)


# ---------------------------------------------------------------------------
# JSON views

def polynomial_to_json(p: Polynomial):
    return [frac_str(c) for c in p.coeffs]


def polynomial_from_json(coeffs) -> Polynomial:
    return Polynomial([parse_fraction(c) for c in coeffs])


def atlas_to_json(atlas: TransitionAtlas) -> dict:
    return {
        "labels": list(atlas.labels),
        "potential_values": [frac_str(v) for v in atlas.potential_values],
        "separation": frac_str(atlas.separation),
        "separation_bound": frac_str(atlas.separation_report.bound),
        "fits": {lbl: {"Q": polynomial_to_json(f.numerator),
                       "R": polynomial_to_json(f.denominator)}
                 for lbl, f in atlas.fits.items()},
        "thresholds": {lbl: {"U": polynomial_to_json(u), "V": polynomial_to_json(v)}
                       for lbl, (u, v) in atlas.thresholds.items()},
    }


def advice_to_json(rec: AdviceRecord) -> dict:
    return {"w": rec.w, "r": frac_str(rec.r), "h": rec.h,
            "epsilon_used": frac_str(rec.epsilon_used), "p0": frac_str(rec.p0)}
