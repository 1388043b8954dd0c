"""Command-line front end.

Every subcommand prints plain ``key=value`` lines.  Exit status: 0 success,
1 a verification failed, 2 bad input, 3 a budget ran out.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import affine, lamplighter, mealy, treeact
from .algebra import NotAUnit, PolySyntaxError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
BUDGET_ENV = "WORKBENCH_BUDGET"


class InputError(Exception):
    pass


def default_cap() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return treeact.DEFAULT_CLOSURE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise InputError(f"{BUDGET_ENV} must be positive")
    return cap


def _bool(b: bool) -> str:
    return "true" if b else "false"


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def load_automaton(args) -> mealy.MealyAutomaton:
    if args.file and args.builtin:
        raise InputError("give either an automaton file or --builtin, not both")
    if args.file:
        try:
            with open(args.file) as fh:
                return mealy.parse_automaton(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        return mealy.builtin(args.builtin or "paper_G")
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


def _word(args, aut):
    return treeact.parse_word(aut, args.word)


def cmd_check(args, out) -> int:
    aut = load_automaton(args)
    inv = mealy.is_invertible(aut)
    out(f"invertible={_bool(inv)} reversible={_bool(mealy.is_reversible(aut))} "
        f"bireversible={_bool(mealy.is_bireversible(aut))}")
    if inv:
        for line in mealy.serialize_automaton(mealy.dual_automaton(aut), shorthand=False).splitlines():
            out(line)
    return EXIT_OK


def cmd_act(args, out) -> int:
    aut = load_automaton(args)
    g = _word(args, aut)
    v = treeact.parse_vertex(args.on, aut.d)
    out(treeact.format_vertex(treeact.act(g, v)))
    return EXIT_OK


def cmd_section(args, out) -> int:
    aut = load_automaton(args)
    g = _word(args, aut)
    v = treeact.parse_vertex(args.at, aut.d)
    out(str(treeact.section(g, v).reduced()))
    return EXIT_OK


def cmd_trivial(args, out) -> int:
    aut = load_automaton(args)
    res = treeact.is_trivial(_word(args, aut), args.cap, method=args.method)
    if res.trivial:
        out("trivial")
    else:
        out(f"nontrivial witness={treeact.format_vertex(res.witness) or 'root'}")
    return EXIT_OK


def cmd_sh(args, out) -> int:
    aut = load_automaton(args)
    out(_bool(treeact.is_spherically_homogeneous(_word(args, aut), args.cap)))
    return EXIT_OK


def cmd_order(args, out) -> int:
    aut = load_automaton(args)
    res = treeact.order_probe(_word(args, aut), args.max_n, args.cap, seed=args.seed)
    out(f"order={res.order}" if res.order is not None else f"order=exceeds {res.bound}")
    out(f"seed={args.seed}")
    return EXIT_OK


def cmd_affine(args, out) -> int:
    aut = load_automaton(args)
    fs, gs, names = args.f or [], args.g or [], args.gen or []
    if not fs and not gs and not names:
        names = list(affine.GENERATOR_TAU_TEXT)
        fs = [affine.GENERATOR_TAU_TEXT[k][0] for k in names]
        gs = [affine.GENERATOR_TAU_TEXT[k][1] for k in names]
    if not (len(fs) == len(gs) == len(names)):
        raise InputError("give one --gen, --f and --g per mapping")
    series_depth = max(args.depth, args.minor or 0, 1)
    status = EXIT_OK
    maps = []
    for name, f, g in zip(names, fs, gs):
        m = affine.TauMap.parse(f, g, series_depth, aut.d)
        maps.append((name, m))
        word = treeact.parse_word(aut, name)
        cmp = affine.compare_tau_to_word(m, word, args.depth)
        if cmp.match:
            out(f"generator={name} match depth={cmp.depth}")
        else:
            out(f"generator={name} mismatch depth={cmp.depth} "
                f"witness={treeact.format_vertex(cmp.prefix)}")
            status = EXIT_FAIL
    if args.minor:
        name, m = maps[0]
        out(affine.format_minor(affine.matrix_minor(affine.tau_to_toeplitz(m), args.minor)))
    return status


def cmd_verify(args, out) -> int:
    rep = lamplighter.verify_lamplighter(args.max_deg, args.depth, seed=args.seed,
                                         n_products=args.products, cap=args.cap)
    for line in rep.lines():
        out(line)
    aut = mealy.builtin("paper_G")
    shift_ok = 0
    shift_failures = []
    for name in ("a", "a^-1"):
        g = treeact.parse_word(aut, name)
        for n in range(6):
            if affine.conj_shift_check(g, n, args.shift_depth):
                shift_ok += 1
            else:
                shift_failures.append(f"conjugate of shift {n} by {name} is not homogeneous")
    out(f"shift_conjugates_checked=12 shift_conjugates_ok={shift_ok} shift_depth={args.shift_depth}")
    for f in shift_failures:
        out(f"failure={f}")
    if args.summary:
        with open(args.summary, "w") as fh:
            for rec in rep.records:
                fh.write(rec.line() + "\n")
    ok = rep.ok and not shift_failures
    out(f"result={'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lampwork",
                                     description="Automaton groups acting on rooted trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("file", nargs="?", help="automaton file (wreath recursion format)")
        p.add_argument("--builtin", choices=mealy.builtin_names(),
                       help="use a builtin automaton (default paper_G)")
        p.add_argument("--cap", type=_positive, default=None,
                       help=f"closure cap (default ${BUDGET_ENV} or {treeact.DEFAULT_CLOSURE_CAP})")
        return p

    def word(p):
        p.add_argument("--word", required=True, help='e.g. "a b^-1 c"')
        return p

    source(sub.add_parser("check", help="invertibility, reversibility, dual automaton"))
    p = word(source(sub.add_parser("act", help="image of a vertex")))
    p.add_argument("--on", required=True, help="vertex, e.g. 0110")
    p = word(source(sub.add_parser("section", help="section at a vertex")))
    p.add_argument("--at", required=True)
    p = word(source(sub.add_parser("trivial", help="word problem")))
    p.add_argument("--method", choices=("auto", "closure", "transducer"), default="auto")
    word(source(sub.add_parser("sh", help="spherical homogeneity")))
    p = word(source(sub.add_parser("order", help="look for a finite order")))
    p.add_argument("--max-n", type=_positive, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = source(sub.add_parser("affine", help="compare generators with affine maps"))
    p.add_argument("--gen", action="append", help="generator name, once per mapping")
    p.add_argument("--f", action="append", help='multiplier, e.g. "(t^2+t+1)/(t^2+1)"')
    p.add_argument("--g", action="append", help='offset, e.g. "1/(t+1)^3"')
    p.add_argument("--depth", type=_nonneg, default=14)
    p.add_argument("--minor", type=_positive, default=None,
                   help="also print the n x n minor of the first mapping")

    p = sub.add_parser("verify", help="lamplighter sweep")
    p.add_argument("--max-deg", type=_nonneg, default=3)
    p.add_argument("--depth", type=_nonneg, default=20, help="deepest witness the tree oracle may report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--products", type=_nonneg, default=500)
    p.add_argument("--shift-depth", type=_positive, default=10)
    p.add_argument("--summary", help="write one record per pair to this file")
    p.add_argument("--cap", type=_positive, default=None)
    return parser


COMMANDS = {
    "check": cmd_check, "act": cmd_act, "section": cmd_section, "trivial": cmd_trivial,
    "sh": cmd_sh, "order": cmd_order, "affine": cmd_affine, "verify": cmd_verify,
}


def main(argv=None, out=None) -> int:
    out = out or print
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.cap is None:
            args.cap = default_cap()
        return COMMANDS[args.command](args, out)
    except treeact.BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, mealy.AutomatonParseError, treeact.WordSyntaxError, PolySyntaxError,
            NotAUnit, mealy.NotInvertible, affine.DepthExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
