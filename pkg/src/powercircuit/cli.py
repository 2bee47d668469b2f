"""Command line entry point: ``powercircuit <group> <command> ...``.

Exit codes: 0 trivial / equal / success, 1 nontrivial / unequal, 2 input
error, 3 not a power circuit, 4 undefined swap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle
from .circuit import Marking, PowerCircuit, UnknownNode
from .reduce import Order, make_tree
from .words import ParseError, Verdict

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_NOT_PC, EXIT_SWAP = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def read_arg(text: str) -> str:
    """Inline text, or the contents of a file for ``@path``."""
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text()
        except OSError as e:
            raise InputError(str(e)) from None
    return text


def load_circuit(path: str) -> tuple[PowerCircuit, dict[str, Marking]]:
    try:
        return PowerCircuit.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: {e}") from None


def resolve_marking(spec: str, c: PowerCircuit, named: dict[str, Marking]) -> Marking:
    """A marking by name, or written inline as signed node ids like ``+3 -5``."""
    if spec in named:
        return named[spec]
    m = Marking()
    for tok in spec.replace(",", " ").split():
        try:
            p = int(tok)
        except ValueError:
            raise InputError(f"unknown marking {spec!r}") from None
        if abs(p) not in c.succ or tok.lstrip("+-") != str(abs(p)):
            raise InputError(f"no node {tok!r} in circuit")
        m[abs(p)] = -1 if tok.startswith("-") else 1
    return m


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(text)


# -- pc -----------------------------------------------------------------------


def cmd_pc_reduce(args) -> int:
    """Print the reduced circuit (same JSON format) with a "stats" block."""
    c, named = load_circuit(args.circuit)
    before = len(c)
    marks = dict(named)
    tree = make_tree(c, list(marks.values()))
    if tree is None:
        print("NOT A POWER CIRCUIT")
        return EXIT_NOT_PC
    if args.dot:
        Path(args.dot).write_text(c.to_dot(marks))
    cs = tree.chain_stats()
    out = c.to_dict(marks)
    out["stats"] = {"nodes_before": before, "nodes_after": len(c), "chains": cs.chain_count,
                    "potential": cs.potential}
    print(json.dumps(out, indent=None if args.json else 1))
    return EXIT_OK


_ORDER = {Order.LESS: "LT", Order.EQUAL: "EQ", Order.GREATER: "GT"}


def cmd_pc_cmp(args) -> int:
    c, named = load_circuit(args.circuit)
    k = resolve_marking(args.k, c, named)
    m = resolve_marking(args.m, c, named)
    tree = make_tree(c, [k, m])
    if tree is None:
        print("NOT A POWER CIRCUIT")
        return EXIT_NOT_PC
    order, gap = tree.compare(k, m)
    _emit(args, {"order": _ORDER[order], "gap": gap.value}, f"{_ORDER[order]} {gap.value}")
    return EXIT_OK if order == Order.EQUAL else EXIT_NO


# -- sdp ----------------------------------------------------------------------


def _program(text: str):
    from .sdp import MalformedProgram, parse_program

    try:
        return parse_program(read_arg(text))
    except MalformedProgram as e:
        raise InputError(str(e)) from None


def cmd_sdp_eval(args) -> int:
    from .sdp import SdpStats, SwapUndefined, format_pair, wp_sdp

    prog = _program(args.program)
    st = SdpStats()
    try:
        t = wp_sdp(prog, st)
    except SwapUndefined as e:
        print(f"UNDEFINED: {e}")
        return EXIT_SWAP
    shown = format_pair(t, bit_budget=args.bit_budget)
    if shown is None:
        # too large for decimal output: hand out the triple's circuit instead
        shown_json = t.circuit.to_json({"U": t.u, "X": t.x, "K": t.k})
        print(shown_json)
    else:
        _emit(args, {"pair": shown, "nodes": len(t.circuit), **st.__dict__}, shown)
    if args.stats and not args.json:
        print(json.dumps(st.__dict__))
    return EXIT_OK


def cmd_sdp_eq(args) -> int:
    from .sdp import SwapUndefined, sdp_equal

    p1, p2 = _program(args.p1), _program(args.p2)
    try:
        same = sdp_equal(p1, p2)
    except SwapUndefined:
        print("UNDEFINED")
        return EXIT_SWAP
    _emit(args, {"equal": same}, "EQUAL" if same else "UNEQUAL")
    return EXIT_OK if same else EXIT_NO


# -- wp -------------------------------------------------------------------------


def _verdict_exit(v: Verdict) -> int:
    return EXIT_OK if v is Verdict.TRIVIAL else EXIT_NO


def cmd_wp_baumslag(args) -> int:
    from .baumslag import BaumslagStats, wp_baumslag
    from .words import parse_baumslag

    try:
        word = parse_baumslag(read_arg(args.word))
    except ParseError as e:
        raise InputError(str(e)) from None
    st = BaumslagStats()
    v = wp_baumslag(word, st)
    _emit(args, {"verdict": v.value, "stats": st.as_dict()}, v.value)
    if args.stats and not args.json:
        print(json.dumps(st.as_dict()))
    return _verdict_exit(v)


def cmd_wp_higman(args) -> int:
    from .higman import HigmanStats, wp_higman
    from .words import parse_higman

    try:
        word = parse_higman(read_arg(args.word))
    except ParseError as e:
        raise InputError(str(e)) from None
    st = HigmanStats()
    v = wp_higman(word, st)
    _emit(args, {"verdict": v.value, "stats": st.as_dict()}, v.value)
    if args.stats and not args.json:
        print(json.dumps(st.as_dict()))
    return _verdict_exit(v)


# -- oracle ---------------------------------------------------------------------


def _format_value(v, limit_bits: int = 4096) -> str:
    if v.denominator == 1:
        n = v.numerator
        return str(n) if n.bit_length() <= limit_bits else f"<{n.bit_length()}-bit integer>"
    return f"{v.numerator}/{v.denominator}"


def cmd_oracle_eval(args) -> int:
    c, named = load_circuit(args.circuit)
    m = resolve_marking(args.marking, c, named)
    res = oracle.eval_exact(c, m, args.bit_budget)
    if res.ok:
        _emit(args, {"value": str(res.value)}, _format_value(res.value))
        return EXIT_OK
    status = "IRRATIONAL" if res.irrational else "OVERFLOW"
    _emit(args, {"value": None, "status": status}, status)
    return EXIT_NO


def cmd_oracle_gen_trivial(args) -> int:
    from .words import format_word

    try:
        word = oracle.gen_trivial_word(args.group, args.seed, args.length)
    except ValueError as e:
        raise InputError(str(e)) from None
    print(format_word(word))
    return EXIT_OK


def cmd_oracle_wp(args) -> int:
    from .words import parse_baumslag, parse_higman

    parse = parse_baumslag if args.group == "baumslag" else parse_higman
    solve = oracle.wp_baumslag_reference if args.group == "baumslag" else oracle.wp_higman_reference
    try:
        word = parse(read_arg(args.word))
    except ParseError as e:
        raise InputError(str(e)) from None
    v = solve(word, args.exp_cap)
    print(v.value)
    if v is Verdict.CAP_EXCEEDED:
        return EXIT_INPUT
    return _verdict_exit(v)


# -- bench ----------------------------------------------------------------------


def _sizes(text: str | None, family: str) -> list[int]:
    from .bench import DEFAULT_SIZES

    if text is None:
        return DEFAULT_SIZES[family]
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad --bench-sizes {text!r}") from None


def cmd_bench(args) -> int:
    from .bench import bench, input_length, to_csv

    sizes = _sizes(args.bench_sizes, args.family)
    rows = bench(args.family, sizes, seed=args.seed)
    text = to_csv(rows)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.family}.csv").write_text(text)
        if not args.no_plot:
            from .plotting import plot_scaling

            lengths = [input_length(args.family, r.size) for r in rows]
            slope = plot_scaling(lengths, [r.time_ms for r in rows], out / f"{args.family}.png",
                                 title=args.family)
            if slope is not None:
                print(f"# log-log slope {slope:.3f}", file=sys.stderr)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="powercircuit", description="Power circuits and word problems.")
    sub = ap.add_subparsers(dest="group", required=True)

    pc = sub.add_parser("pc", help="power circuit reduction").add_subparsers(dest="cmd", required=True)
    p = pc.add_parser("reduce", help="reduce a circuit given as JSON")
    p.add_argument("circuit")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="PATH")
    p.set_defaults(func=cmd_pc_reduce)
    p = pc.add_parser("cmp", help="compare two markings")
    p.add_argument("circuit")
    p.add_argument("k")
    p.add_argument("m")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pc_cmp)

    sdp = sub.add_parser("sdp", help="Z[1/2] x| Z with swap").add_subparsers(dest="cmd", required=True)
    p = sdp.add_parser("eval", help="evaluate a postfix program (lit r m / mul / swap)")
    p.add_argument("program")
    p.add_argument("--json", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--bit-budget", type=int, default=64)
    p.set_defaults(func=cmd_sdp_eval)
    p = sdp.add_parser("eq", help="decide whether two programs evaluate to the same element")
    p.add_argument("p1")
    p.add_argument("p2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sdp_eq)

    wp = sub.add_parser("wp", help="word problems").add_subparsers(dest="cmd", required=True)
    for name, func in (("baumslag", cmd_wp_baumslag), ("higman", cmd_wp_higman)):
        p = wp.add_parser(name)
        p.add_argument("word", help="inline word or @file")
        p.add_argument("--stats", action="store_true")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    orc = sub.add_parser("oracle", help="reference implementations").add_subparsers(dest="cmd", required=True)
    p = orc.add_parser("eval", help="exact value of a marking")
    p.add_argument("circuit")
    p.add_argument("marking")
    p.add_argument("--bit-budget", type=int, default=oracle.DEFAULT_BIT_BUDGET)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle_eval)
    p = orc.add_parser("gen-trivial", help="word that is trivial by construction")
    p.add_argument("group", choices=["baumslag", "higman"])
    p.add_argument("seed", type=int)
    p.add_argument("length", type=int)
    p.set_defaults(func=cmd_oracle_gen_trivial)
    p = orc.add_parser("wp", help="bignum reference word-problem solver")
    p.add_argument("group", choices=["baumslag", "higman"])
    p.add_argument("word")
    p.add_argument("--exp-cap", type=int, default=oracle.DEFAULT_EXP_CAP)
    p.set_defaults(func=cmd_oracle_wp)

    p = sub.add_parser("bench", help="timing table (CSV) and log-log figure")
    p.add_argument("family", choices=["baumslag-tower-commutator", "higman-tower-identity", "maketree-random"])
    p.add_argument("--bench-sizes", metavar="N,N,...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="bench-results", help="directory for the CSV and PNG")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, UnknownNode) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
