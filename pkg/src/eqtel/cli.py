"""Command-line front end: ``eqtel verify|equivariant|module|kirwan|bench``."""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from . import __version__
from .equivariant import EquivariantModel, KirwanComparison, ModuleAction, StagePolicy
from .groups import BUILTIN, GroupError
from .io import InputError, dumps, fixture_names, load_input, write_atomic
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _policy(args: argparse.Namespace) -> StagePolicy:
    return StagePolicy(stages=args.stages, morse_reduce=args.morse_reduce)


def _emit(args: argparse.Namespace, payload: dict, table: str | None = None) -> None:
    text = dumps(payload)
    if args.out:
        write_atomic(f"{args.out}.json", text)
        if table is not None:
            write_atomic(f"{args.out}.tsv", table)
    else:
        sys.stdout.write(text)


def _model(args: argparse.Namespace) -> EquivariantModel:
    doc = load_input(args.input, args.group)
    if args.max_degree < 0:
        raise InputError("--max-degree must be non-negative")
    if args.stages is not None and args.stages < 1:
        raise InputError("--stages must be at least 1")
    return EquivariantModel(doc.complex, doc.action, args.max_degree, _policy(args), space_name=doc.name)


def _kirwan_payload(model: EquivariantModel) -> dict:
    comp = KirwanComparison(model)
    results = [comp.at(k) for k in range(model.max_degree + 1)]
    return {
        "degrees": [r.to_dict() for r in results],
        "isomorphism_in_stable_range": all(r.is_iso for r in results if r.stable),
    }


def cmd_equivariant(args: argparse.Namespace) -> int:
    model = _model(args)
    report = model.report()
    payload = report.to_dict()
    if args.kirwan:
        payload["kirwan"] = _kirwan_payload(model)
    _emit(args, payload, report.betti_table())
    return EXIT_OK


def cmd_kirwan(args: argparse.Namespace) -> int:
    model = _model(args)
    payload = {"group": model.act.group.name, "space": model.space_name, "stages": model.K}
    payload.update(_kirwan_payload(model))
    _emit(args, payload)
    return EXIT_OK


def cmd_module(args: argparse.Namespace) -> int:
    if args.action_degree < 0:
        raise InputError("--action-degree must be non-negative")
    model = _model(args)
    table = ModuleAction(model).table(args.action_degree)
    payload = table.to_dict()
    payload["space"] = model.space_name
    payload["morse_reduced"] = model.policy.morse_reduce
    _emit(args, payload)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.count < 0:
        raise InputError("--count must be non-negative")
    results = run_all(args.seed, args.count, args.inject_fault)
    for r in results:
        print(f"{r.name}: {r.passed}/{r.total} passed")
    payload = {"seed": args.seed, "count": args.count, "suites": [r.to_dict() for r in results]}
    if args.out:
        write_atomic(f"{args.out}.json", dumps(payload))
    failures = [f for r in results for f in r.failures]
    if failures:
        sys.stderr.write("counterexample:\n" + dumps(failures[0].to_dict()))
        return EXIT_FAIL
    return EXIT_OK


BENCH_CASES = (
    ("fixture:point", "z2", 4),
    ("fixture:point", "z3", 3),
    ("fixture:point", "z2xz2", 2),
    ("fixture:circle", "z2", 2),
    ("fixture:octahedron", None, 2),
)


def cmd_bench(args: argparse.Namespace) -> int:
    print("input\tgroup\tmax_degree\tmorse_reduce\tstages\tcells\tseconds\tranks")
    for source, group, k in BENCH_CASES:
        for reduce_flag in (False, True):
            doc = load_input(source, group)
            t0 = time.perf_counter()
            model = EquivariantModel(doc.complex, doc.action, k, StagePolicy(morse_reduce=reduce_flag))
            report = model.report()
            dt = time.perf_counter() - t0
            cells = sum(report.stage_sizes)
            print(f"{source}\t{doc.action.group.name}\t{k}\t{reduce_flag}\t{report.K}\t{cells}\t{dt:.3f}\t{report.ranks}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqtel", description="Equivariant homology through finite mapping telescopes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def pipeline(name: str, help_text: str) -> argparse.ArgumentParser:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("input", help=f"input JSON file, or fixture:NAME ({', '.join(fixture_names())})")
        s.add_argument("--group", choices=sorted(BUILTIN), help="use a built-in group instead of a table in the input")
        s.add_argument("--max-degree", type=int, default=2, help="highest homological degree to report")
        s.add_argument("--stages", type=int, default=None, help="use exactly this many increments (default: automatic)")
        s.add_argument("--morse-reduce", action="store_true", help="Morse-reduce every stage before elimination")
        s.add_argument("--out", help="output prefix; writes PREFIX.json (and PREFIX.tsv)")
        return s

    e = pipeline("equivariant", "equivariant betti numbers with stability certificates")
    e.add_argument("--kirwan", action="store_true", help="add the comparison with the quotient (free actions)")
    e.set_defaults(func=cmd_equivariant)

    m = pipeline("module", "action of H*(BG) on equivariant homology")
    m.add_argument("--action-degree", type=int, default=1, help="largest cohomological degree of acting classes")
    m.set_defaults(func=cmd_module)

    k = pipeline("kirwan", "comparison map to the homology of the quotient and its inverse")
    k.set_defaults(func=cmd_kirwan)

    v = sub.add_parser("verify", help="randomized property suites")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--inject-fault", choices=["increment"], default=None, help="corrupt one increment per sequence (self-test)")
    v.add_argument("--out", help="output prefix for the JSON report")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time the packaged fixtures with and without Morse reduction")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except GroupError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
