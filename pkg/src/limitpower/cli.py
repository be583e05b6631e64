"""Command line entry point: ``limitpower`` (or ``python -m limitpower``).

Exit status: 0 on success, 1 when a checked property fails, 2 on a usage
or input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import kernels
from .algebra import AlgebraError
from .logic import Corpus, FormulaError, SymbolRegistry, eval_formula, generate_corpus, los_check, parse_formula
from .partitions import BlockBooleanAlgebra, PartitionFilter, block_boolean_algebra, filter_lattice_dot, refinement_dot
from .serialize import DescriptorError, load_algebra, load_system, read_json, write_json
from .verify import SUITES, summary, verify_colimit

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _emit(report: dict, args) -> int:
    shown = report if getattr(args, "full", False) else summary(report)
    text = json.dumps(shown, indent=2, sort_keys=True, default=str)
    if getattr(args, "out", None):
        write_json(args.out, report)
    print(text)
    return EXIT_OK if report.get("ok", True) else EXIT_VIOLATION


def _cmd_verify(args) -> int:
    s = args.suite
    if s == "thm1":
        rep = SUITES["thm1"](base=args.base, index=args.index, trials=args.trials, seed=args.seed)
    elif s == "ba":
        rep = SUITES["ba"](max_index=args.index)
    elif s == "thm2":
        rep = SUITES["thm2"](base=args.base, index=args.index)
    elif s == "thm3":
        rep = SUITES["thm3"](base=args.base, index=args.index, depth=args.depth, seed=args.seed)
    elif s == "free":
        gens = tuple(args.gens) if args.gens else (1, 2)
        rep = SUITES["free"](base=args.base, gens=gens, max_size=args.max_size)
    elif s == "functor":
        rep = SUITES["functor"](trials=args.trials, seed=args.seed, base=args.base)
    elif s == "los":
        rep = SUITES["los"](base=args.base, index=args.index, count=args.count, depth=args.depth, seed=args.seed)
    elif s == "colimit":
        if args.spec:
            data = read_json(args.spec)
            items = data if isinstance(data, list) else [data]
            systems = [load_system(d) for d in items]
            rep = verify_colimit(trials=len(systems), systems=systems)
        else:
            rep = verify_colimit(trials=args.trials, seed=args.seed, base=args.base)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(s)
    return _emit(rep, args)


_DEFAULTS = {
    "thm1": {"base": 4, "index": 3, "trials": 200},
    "ba": {"index": 4},
    "thm2": {"base": 3, "index": 3},
    "thm3": {"base": 3, "index": 3},
    "free": {"base": 2},
    "functor": {"base": 3, "trials": 100},
    "los": {"base": 3, "index": 3},
    "colimit": {"base": 3, "trials": 20},
}


def _load_corpus(args, base: int) -> Corpus:
    if args.corpus:
        data = read_json(args.corpus)
        if "registry" not in data:
            data = dict(data, registry=generate_corpus(base, 1, seed=data.get("seed", args.seed)).registry.to_json())
        return Corpus.from_json(data)
    return generate_corpus(base, args.count, args.depth, args.seed)


def _cmd_los(args) -> int:
    lrp = load_algebra(read_json(args.power))
    if not hasattr(lrp, "Z"):
        raise UsageError("--power must describe a limit reduced power")
    corpus = _load_corpus(args, lrp.base)
    try:
        rep = los_check(lrp, corpus)
    except FormulaError as exc:
        raise UsageError(str(exc)) from None
    rep["Z"] = lrp.Z.to_json()
    return _emit(rep, args)


def _cmd_eval(args) -> int:
    alg = load_algebra(read_json(args.algebra))
    if args.registry:
        reg = SymbolRegistry.from_json(read_json(args.registry))
    else:
        reg = generate_corpus(alg.base, 1, seed=args.seed).registry
    phi = parse_formula(args.formula, reg)
    value = eval_formula(alg, phi, reg)
    print(json.dumps({"formula": args.formula, "algebra": alg.to_json(), "size": alg.size, "holds": value}))
    return EXIT_OK


def _cmd_export(args) -> int:
    if args.what == "lattice":
        dot = refinement_dot(args.index)
    else:
        if args.filter:
            text = args.filter
            data = json.loads(text) if text.lstrip().startswith("{") else read_json(text)
            ba = block_boolean_algebra(PartitionFilter.from_json(data))
        else:
            ba = BlockBooleanAlgebra(args.index, [1 << i for i in range(args.index)])
        dot = filter_lattice_dot(ba)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dot)
    else:
        print(dot, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="limitpower", description="Clone powers, limit reduced powers and their correspondences.")
    p.add_argument("--backend", choices=["compiled", "python"], help="kernel backend (default: compiled if built)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--base", type=int)
    v.add_argument("--index", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--depth", type=int, default=2)
    v.add_argument("--count", type=int, default=100, help="corpus size for los")
    v.add_argument("--gens", type=int, action="append", help="generator count (repeatable)")
    v.add_argument("--max-size", type=int, default=16)
    v.add_argument("--spec", help="JSON directed system (or list of them) for colimit")
    v.add_argument("--full", action="store_true", help="print per-case verdicts")
    v.add_argument("--out", help="write the full JSON report here")
    v.set_defaults(func=_cmd_verify)

    los = sub.add_parser("los", help="check transfer for a limit ultrapower")
    los.add_argument("--power", required=True, help="algebra descriptor JSON")
    los.add_argument("--corpus", help="corpus JSON (sentences, optional registry)")
    los.add_argument("--count", type=int, default=100)
    los.add_argument("--depth", type=int, default=2)
    los.add_argument("--seed", type=int, default=0)
    los.add_argument("--full", action="store_true")
    los.add_argument("--out")
    los.set_defaults(func=_cmd_los)

    ev = sub.add_parser("eval", help="evaluate a sentence in an algebra")
    ev.add_argument("--algebra", required=True, help="algebra descriptor JSON")
    ev.add_argument("--formula", required=True)
    ev.add_argument("--registry", help="symbol registry JSON (default: the standard one for --seed)")
    ev.add_argument("--seed", type=int, default=0)
    ev.set_defaults(func=_cmd_eval)

    ex = sub.add_parser("export", help="DOT export of a lattice")
    ex.add_argument("--what", choices=["lattice", "ba"], required=True)
    ex.add_argument("--index", type=int, default=3)
    ex.add_argument("--filter", help="partition filter as JSON text or a file (for --what ba)")
    ex.add_argument("--out")
    ex.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        try:
            kernels.use(args.backend)
        except RuntimeError as exc:
            print(f"limitpower: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.command == "verify":
        for k, v in _DEFAULTS[args.suite].items():
            if getattr(args, k, None) is None:
                setattr(args, k, v)
        if args.suite == "free" and args.max_size == 16 and args.base != 2:
            args.max_size = 27
    try:
        return args.func(args)
    except (UsageError, DescriptorError, FormulaError, OSError) as exc:
        print(f"limitpower: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AlgebraError as exc:
        print(f"limitpower: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
