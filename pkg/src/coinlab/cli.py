"""Command-line experiment runner.

Subcommands: gap, fit, atlas, advice, roots, simulate, limit, gallery.
Every run prints a JSON envelope carrying the config hash, seed, precision
and library version; with --out it also writes the envelope, a CSV of any
computed curve, and an SVG rendering of it.

Exit codes: 0 success, 2 invariant violation, 3 precision failure, 4 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from mpmath import mp

from . import __version__, advice, constructions, rational
from . import automaton as am
from . import fixed_point as fp
from .errors import BadInput, CoinLabError, EXIT_BAD_INPUT, EXIT_OK
from .numerics import DEFAULT_PRECISION_BITS, EXACT, parse_fraction


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadInput(message)


def _common(parser):
    parser.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_BITS)
    parser.add_argument("--exact", action="store_true",
                        help="force exact rational arithmetic")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100000)
    parser.add_argument("--t-max", type=int, default=10**6)
    parser.add_argument("--out", default=None,
                        help="directory for result.json, curve.csv, curve.svg")
    parser.add_argument("--gallery", action="append", default=[],
                        help="gallery spec: name or name:key=val,key=val")
    parser.add_argument("--param", action="append", default=[],
                        help="extra gallery parameter key=val")
    parser.add_argument("--automaton", default=None, help="automaton JSON file")


def build_parser() -> _Parser:
    parser = _Parser(prog="coinlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limit", help="limiting acceptance a(p)")
    _common(p)
    p.add_argument("--p", action="append", required=True, help="bias (repeatable)")
    p.add_argument("--grid", type=int, default=0,
                   help="also tabulate a(p) on an n-point grid for the report")

    p = sub.add_parser("gap", help="acceptance gap a(q) - a(p)")
    _common(p)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo cross-check")

    p = sub.add_parser("fit", help="exact rational fit of a(p)")
    _common(p)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--grid", type=int, default=101)

    p = sub.add_parser("roots", help="isolate real roots of a polynomial")
    _common(p)
    p.add_argument("--coeffs", required=True,
                   help="comma-separated exact coefficients, ascending")
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--bits", type=int, default=64)

    p = sub.add_parser("atlas", help="potential transition values of a family")
    _common(p)
    p.add_argument("--p-star", default=None,
                   help="true bias; adds the counting-advice record")

    p = sub.add_parser("advice", help="bias codec: encode, decode, roundtrip")
    _common(p)
    p.add_argument("action", choices=["encode", "decode", "roundtrip"])
    p.add_argument("--bits", default=None, help="bit string to encode")
    p.add_argument("--bias", default=None, help="bias to decode, as num/den")
    p.add_argument("--s", type=int, default=None, help="bits to recover")
    p.add_argument("--budget", type=int, default=None,
                   help="coin flips for decoding (default 64*4^s)")
    p.add_argument("--seeds", type=int, default=5,
                   help="roundtrip repetitions over consecutive seeds")

    p = sub.add_parser("simulate", help="Monte Carlo runs of a machine")
    _common(p)
    p.add_argument("--p", required=True)
    p.add_argument("--compare-exact", action="store_true",
                   help="also compute the exact limiting acceptance")

    p = sub.add_parser("gallery", help="list or build gallery machines")
    _common(p)
    p.add_argument("action", choices=["list", "build"])
    p.add_argument("--save", default=None, help="write automaton JSON here")
    return parser


# ---------------------------------------------------------------------------
# Helpers

def _parse_gallery_spec(spec: str, extra: dict):
    name, _, rest = spec.partition(":")
    params = dict(extra)
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise BadInput(f"bad gallery parameter {item!r}")
            params[key] = val
    return constructions.build_gallery(name.strip(), **params)


def _machine(args, index: int = 0):
    if args.automaton:
        return am.load_json(args.automaton)
    if args.gallery:
        extra = {}
        for item in args.param:
            key, _, val = item.partition("=")
            if not val:
                raise BadInput(f"bad --param {item!r}")
            extra[key] = val
        return _parse_gallery_spec(args.gallery[index], extra)
    raise BadInput("provide --gallery NAME or --automaton FILE")


def _fmt(value, prec: int):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    if isinstance(value, float):
        return value
    return mp.nstr(value, int(prec * 0.30103) + 3)


def _mode_for(args, machine) -> object:
    if args.exact:
        if not machine.exact:
            raise BadInput("--exact requested but the machine has float entries")
        return EXACT
    if machine.exact:
        return EXACT
    return max(args.precision_bits, machine.precision_bits or 0)


def _limit_value(machine, p, mode, prec):
    report = fp.limiting_accept_report(machine, p, mode)
    out = {"a": _fmt(report.value, prec), "provenance": report.provenance}
    if report.achieved is not None:
        out["achieved"] = _fmt(report.achieved, 53)
        out["precision_bits"] = report.precision_bits
    return out, report.value


# ---------------------------------------------------------------------------
# Commands

def cmd_limit(args):
    machine = _machine(args)
    mode = _mode_for(args, machine)
    result = {"a": {}}
    for p in args.p:
        entry, _ = _limit_value(machine, p, mode, args.precision_bits)
        result["a"][p] = entry
    curve = None
    if args.grid > 1:
        xs, ys = [], []
        for i in range(1, args.grid + 1):
            x = Fraction(i, args.grid + 1)
            rep = fp.limiting_accept_report(machine, x, mode)
            xs.append(float(x))
            ys.append(float(rep.value))
        curve = ("bias", "limiting acceptance", list(zip(xs, ys)))
        result["grid_points"] = args.grid
    return result, curve


def cmd_gap(args):
    machine = _machine(args)
    mode = _mode_for(args, machine)
    ep, value_p = _limit_value(machine, args.p, mode, args.precision_bits)
    eq, value_q = _limit_value(machine, args.q, mode, args.precision_bits)
    gap = value_q - value_p
    result = {"a_p": ep, "a_q": eq, "p": args.p, "q": args.q,
              "gap": _fmt(gap, args.precision_bits)}
    if args.mc:
        for tag, bias, exact_val in (("p", args.p, value_p), ("q", args.q, value_q)):
            mc = am.monte_carlo(machine, bias, args.trials, args.t_max, args.seed)
            result[f"mc_{tag}"] = {
                "accept_rate": mc.accept_rate,
                "unresolved_rate": mc.unresolved_rate,
                "stderr": mc.accept_stderr(),
                "exact_minus_mc": float(exact_val) - mc.accept_rate,
                "trials": mc.trials,
            }
    return result, None


def cmd_fit(args):
    machine = _machine(args)
    fit = rational.fit_rational(machine, args.max_degree)
    result = {
        "Q": rational.polynomial_to_json(fit.numerator),
        "R": rational.polynomial_to_json(fit.denominator),
        "degree_bound": args.max_degree or machine.dim ** 2,
        "reduced": fit.reduced,
    }
    curve = None
    if args.grid > 1:
        pts = []
        for i in range(1, args.grid + 1):
            x = i / (args.grid + 1)
            pts.append((x, fit.eval_float(x)))
        curve = ("bias", "fitted acceptance", pts)
    return result, curve


def cmd_roots(args):
    coeffs = [parse_fraction(c) for c in args.coeffs.split(",")]
    poly = rational.Polynomial(coeffs)
    ivs = rational.isolate_roots(poly, args.lo, args.hi, args.bits)
    sep = rational.min_separation(poly, args.bits) if poly.degree >= 2 else None
    result = {
        "count": len(ivs),
        "roots": [{"lo": str(iv.lo), "hi": str(iv.hi),
                   "exact": None if iv.exact is None else str(iv.exact),
                   "multiplicity_free": iv.multiplicity_free}
                  for iv in ivs],
    }
    if sep is not None:
        result["separation"] = {
            "observed": None if sep.observed is None else str(sep.observed),
            "bound": str(sep.bound),
            "ok": sep.ok,
        }
    return result, None


def cmd_atlas(args):
    if not args.gallery:
        raise BadInput("atlas needs at least one --gallery member")
    members = []
    for idx, spec in enumerate(args.gallery):
        machine = _parse_gallery_spec(spec, {})
        members.append((f"{idx}:{spec}", machine))
    atlas = rational.build_atlas(members)
    result = rational.atlas_to_json(atlas)
    if args.p_star is not None:
        record = rational.build_advice(atlas, args.p_star)
        result["advice"] = rational.advice_to_json(record)
        result["advice"]["p_star"] = args.p_star
    return result, None


def cmd_advice(args):
    if args.action == "encode":
        if not args.bits:
            raise BadInput("encode needs --bits")
        enc = advice.encode_bias(args.bits)
        return {"bits": enc.bits, "bias": str(enc.bias), "trials": enc.trials}, None
    if args.action == "decode":
        if args.bias is None or args.s is None:
            raise BadInput("decode needs --bias and --s")
        recovered = advice.decode_bits(advice.bernoulli_source(args.bias),
                                       args.s, args.budget, args.seed)
        return {"bias": args.bias, "s": args.s, "recovered": recovered}, None
    if not args.bits:
        raise BadInput("roundtrip needs --bits")
    runs = []
    for k in range(args.seeds):
        runs.append(advice.roundtrip(args.bits, args.seed + k, args.budget))
    ok = all(r["success"] for r in runs)
    out = dict(runs[-1])
    out["success"] = ok
    out["seeds"] = args.seeds
    return out, None


def cmd_simulate(args):
    machine = _machine(args)
    mc = am.monte_carlo(machine, args.p, args.trials, args.t_max, args.seed)
    result = {
        "p": args.p,
        "trials": mc.trials,
        "accepted": mc.accepted,
        "rejected": mc.rejected,
        "unresolved": mc.unresolved,
        "accept_rate": mc.accept_rate,
        "stderr": mc.accept_stderr(),
        "t_max": mc.t_max,
    }
    if args.compare_exact:
        rep = fp.limiting_accept_report(machine, args.p, _mode_for(args, machine))
        result["exact_a"] = _fmt(rep.value, args.precision_bits)
        result["exact_minus_mc"] = float(rep.value) - mc.accept_rate
    return result, None


def cmd_gallery(args):
    if args.action == "list":
        listing = {name: list(params) for name, (fn, params) in
                   sorted(constructions.GALLERY.items())}
        return {"machines": listing}, None
    machine = _machine(args)
    info = {"dim": machine.dim, "meta": machine.meta,
            "exact": machine.exact, "mode": getattr(machine, "mode", "time-dependent")}
    if args.save:
        if isinstance(machine, am.TimeDependentAutomaton):
            raise BadInput("time-dependent machines have no JSON file format")
        am.save_json(machine, args.save)
        info["saved"] = args.save
    return info, None


COMMANDS = {
    "limit": cmd_limit,
    "gap": cmd_gap,
    "fit": cmd_fit,
    "roots": cmd_roots,
    "atlas": cmd_atlas,
    "advice": cmd_advice,
    "simulate": cmd_simulate,
    "gallery": cmd_gallery,
}


def _config_dict(args) -> dict:
    skip = {"command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    result, curve = COMMANDS[args.command](args)
    config = _config_dict(args)
    blob = json.dumps(config, sort_keys=True, default=str)
    envelope = {
        "command": args.command,
        "version": __version__,
        "seed": args.seed,
        "precision_bits": args.precision_bits,
        "config": config,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16],
        "result": result,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "result.json"), "w") as fh:
            json.dump(envelope, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if curve is not None:
            from . import report
            xlabel, ylabel, rows = curve
            csv_path = os.path.join(args.out, "curve.csv")
            report.write_csv(csv_path, [xlabel, ylabel], rows)
            report.render_curves(os.path.join(args.out, "curve.svg"),
                                 [("", [r[0] for r in rows], [r[1] for r in rows])],
                                 xlabel, ylabel, args.command)
            envelope["result"]["curve_csv"] = csv_path
    return envelope


def main(argv=None) -> int:
    try:
        envelope = run(argv)
    except CoinLabError as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__},
                         indent=2, sort_keys=True))
        return exc.exit_code
    print(json.dumps(envelope, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
