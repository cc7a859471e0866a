"""Command-line front end.

Exit codes: 0 success, 1 domain failure (no witness where one was asked for,
false QBF for ``qbf-witness``, violated preconditions), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import acceptance, onevar
from .decide import Budget, Sat, Unsat, sat_bruteforce, sat_decide, valid
from .formula import Formula, FormulaSyntaxError, parse, to_text
from .kripke import FrameClass, ModelFormatError, dump_model, load_model, model_check
from .qbf import QbfError, eval_qbf, ladner_translate, negated_translate, parse_qbf, witness_model


class UsageError(Exception):
    pass


class DomainFailure(Exception):
    pass


def _read_text(inline: str | None, path: str | None, what: str) -> str:
    if inline is not None and path is not None:
        raise UsageError(f"give the {what} inline or with --in, not both")
    if inline is not None:
        return inline
    if path is None:
        raise UsageError(f"no {what} given")
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 1:
        raise UsageError(f"expected exactly one {what} in {path}, found {len(lines)}")
    return lines[0]


def _formula(args: argparse.Namespace) -> Formula:
    return parse(_read_text(args.formula, getattr(args, "infile", None), "formula"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(args: argparse.Namespace) -> Budget:
    try:
        return Budget(max_worlds=args.max_worlds, max_nodes=args.max_nodes, seconds=args.seconds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _frame_class(name: str) -> FrameClass:
    try:
        return FrameClass.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- commands -----------------------------------------------------------------


def cmd_fmt(args: argparse.Namespace) -> int:
    print(to_text(_formula(args)))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    model = load_model(Path(args.model).read_text())
    if not 0 <= args.world < model.world_count:
        raise UsageError(f"world {args.world} out of range")
    print("true" if model_check(model, args.world, _formula(args)) else "false")
    return 0


def _report_sat(res, args: argparse.Namespace) -> int:
    if isinstance(res, Sat):
        print("SAT")
        text = dump_model(res.model, [f"witness world {res.world}"])
        if args.out:
            _emit(text, args.out)
        else:
            sys.stdout.write(text)
        return 0
    if isinstance(res, Unsat):
        print("UNSAT")
        print(f"# {res.method}")
    else:
        print("INCONCLUSIVE")
        print(f"# searched {res.worlds_searched} worlds, complete bound {res.complete_bound}")
    return 1 if args.require_witness else 0


def cmd_sat(args: argparse.Namespace) -> int:
    phi = _formula(args)
    c = args.frame_class
    if args.bruteforce is not None:
        if args.bruteforce < 1:
            raise UsageError("--bruteforce needs a positive world cap")
        res = sat_bruteforce(phi, c, args.bruteforce)
    else:
        res = sat_decide(phi, c, _budget(args))
    return _report_sat(res, args)


def cmd_valid(args: argparse.Namespace) -> int:
    res = valid(_formula(args), args.frame_class, _budget(args))
    if res.status == "valid":
        print("VALID")
        return 0
    if res.status == "invalid":
        print("INVALID")
        assert res.countermodel is not None
        _emit(dump_model(res.countermodel, [f"countermodel world {res.world}"]), args.out)
        return 0
    print("INCONCLUSIVE")
    return 0


def _qbf(args: argparse.Namespace):
    return parse_qbf(_read_text(args.qbf, args.infile, "QBF"))


def cmd_qbf_eval(args: argparse.Namespace) -> int:
    print("true" if eval_qbf(_qbf(args)) else "false")
    return 0


def cmd_qbf_translate(args: argparse.Namespace) -> int:
    theta = _qbf(args)
    phi = negated_translate(theta) if args.negated else ladner_translate(theta)
    _emit(to_text(phi) + "\n", args.out)
    return 0


def cmd_qbf_witness(args: argparse.Namespace) -> int:
    theta = _qbf(args)
    if not eval_qbf(theta):
        raise DomainFailure("the QBF is false; there is no witness model")
    model, root = witness_model(theta)
    _emit(dump_model(model, [f"root world {root}"]), args.out)
    return 0


def cmd_onevar_star(args: argparse.Namespace) -> int:
    _emit(to_text(onevar.star(_formula(args))) + "\n", args.out)
    return 0


def cmd_onevar_embed(args: argparse.Namespace) -> int:
    _emit(to_text(onevar.embed(_formula(args))) + "\n", args.out)
    return 0


def cmd_onevar_chain(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    chain = onevar.build_chain(args.k)
    comments = [f"chain model M_{args.k}", f"root {chain.root}"]
    comments += [f"c_{i} {w}" for i, w in enumerate(chain.c_worlds, start=1)]
    _emit(dump_model(chain.model, comments), args.out)
    return 0


def cmd_onevar_attach(args: argparse.Namespace) -> int:
    model = load_model(Path(args.model).read_text())
    c = args.frame_class
    try:
        if args.formula is not None or args.infile is not None:
            phi = _formula(args)
            if args.world is None:
                raise UsageError("--world is required together with a formula")
            attached, w0 = onevar.star_witness(model, args.world, phi, c)
            ctx = onevar.EmbeddingContext.of(phi)
            comments = [f"world {w0}"]
        else:
            if args.n is None:
                raise UsageError("give --n, or a formula and --world")
            ctx = onevar.EmbeddingContext(args.n)
            attached = onevar.attach(model, ctx, c)
            comments = []
    except ValueError as exc:
        if isinstance(exc, FormulaSyntaxError):
            raise
        raise DomainFailure(str(exc)) from None
    roots = onevar.chain_roots(model.world_count, ctx)
    comments += [f"r_{k} {r}" for k, r in enumerate(roots, start=1)]
    _emit(dump_model(attached, comments), args.out)
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    names = args.suite or list(acceptance.SUITES)
    unknown = [n for n in names if n not in acceptance.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {list(acceptance.SUITES)}")
    ok = True
    for name in names:
        res = acceptance.run_suite(name, args.seed)
        print(res.line(), flush=True)
        ok &= res.passed
    return 0 if ok else 1


# --- parser -------------------------------------------------------------------


def _add_formula(p: argparse.ArgumentParser) -> None:
    p.add_argument("--formula", "-f", help="formula text")
    p.add_argument("--in", dest="infile", help="file holding one formula ('-' for stdin)")


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-worlds", type=int, default=Budget.max_worlds, help="type-elimination world cap")
    p.add_argument("--max-nodes", type=int, default=Budget.max_nodes, help="tableau node cap")
    p.add_argument("--seconds", type=float, default=Budget.seconds, help="wall-clock cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modalred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fmt", help="parse and pretty-print a formula")
    _add_formula(p)
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("check", help="model-check a formula at a world")
    _add_formula(p)
    p.add_argument("--model", required=True)
    p.add_argument("--world", type=int, default=0)
    p.set_defaults(func=cmd_check)

    for name, func, helptext in (
        ("sat", cmd_sat, "decide satisfiability over a frame class"),
        ("valid", cmd_valid, "decide validity over a frame class"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_formula(p)
        p.add_argument("--class", dest="frame_class", type=_frame_class, default=FrameClass.K, help="K, KD, T, KB, KDB or KTB")
        p.add_argument("--out", help="write the witness/countermodel here")
        _add_budget(p)
        if name == "sat":
            p.add_argument("--bruteforce", type=int, metavar="N", help="exhaustive search up to N worlds instead")
            p.add_argument("--require-witness", action="store_true", help="exit 1 unless SAT")
        p.set_defaults(func=func)

    for name, func, helptext in (
        ("qbf-eval", cmd_qbf_eval, "evaluate a prenex QBF"),
        ("qbf-translate", cmd_qbf_translate, "print the modal translation f(theta)"),
        ("qbf-witness", cmd_qbf_witness, "emit the KTB witness model of a true QBF"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--qbf", help="QBF text, e.g. 'A p1 E p2 . p1 -> p2'")
        p.add_argument("--in", dest="infile", help="file holding one QBF ('-' for stdin)")
        if name != "qbf-eval":
            p.add_argument("--out")
        if name == "qbf-translate":
            p.add_argument("--negated", action="store_true", help="print t(theta) = ~f(theta)")
        p.set_defaults(func=func)

    for name, func, helptext in (
        ("onevar-star", cmd_onevar_star, "single-variable image phi*"),
        ("onevar-embed", cmd_onevar_embed, "validity-preserving embedding e(phi)"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_formula(p)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("onevar-chain", help="emit the chain model M_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_onevar_chain)

    p = sub.add_parser("onevar-attach", help="attach M_1..M_{n+1} to a model")
    p.add_argument("--model", required=True)
    p.add_argument("--class", dest="frame_class", type=_frame_class, default=FrameClass.K, help="K, KB or KTB")
    p.add_argument("--n", type=int, help="number of variables (p_{n+1} must hold everywhere)")
    _add_formula(p)
    p.add_argument("--world", type=int, help="with a formula: world where it holds")
    p.add_argument("--out")
    p.set_defaults(func=cmd_onevar_attach)

    p = sub.add_parser("selftest", help="run the verification suites")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(acceptance.SUITES)} (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormulaSyntaxError, QbfError, ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainFailure as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
