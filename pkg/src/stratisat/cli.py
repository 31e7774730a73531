"""Command-line interface.

    stratisat check FILE
    stratisat solve FILE [--max-m N] [--budget N] [--jobs N] [--emit-dimacs DIR] [--no-symmetry]
    stratisat encode CONSTRUCT ARGS...      |  stratisat encode --report ucp --n-max N
    stratisat relativize FILE MODEL.json
    stratisat bench [--seed S] [--count N]

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 sat / in
fragment, 1 unsat, 2 resource limit, 3 not in the fragment, 64 usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import encoders
from .corpus import generate
from .errors import NotInFragment, ParseError
from .fragment import check_fragment
from .normalize import normalize
from .parser import parse, render
from .relativize import domain_bound, extend_to_conjunction, relativized_model
from .semantics import Interpretation, evaluate
from .solver import Budget, decide
from .syntax import Sort, Var

EXIT_SAT, EXIT_UNSAT, EXIT_LIMIT, EXIT_NOT_IN_FRAGMENT, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _formula(path: str):
    try:
        return parse(_read(path))
    except ParseError as e:
        raise UsageError(f"{path}: {e}") from e


def _dump(doc) -> None:
    print(json.dumps(doc, separators=(",", ":")))


def _budget(args) -> Budget:
    if args.budget is not None:
        return Budget(conflicts=args.budget)
    try:
        return Budget.from_env()
    except ValueError as e:
        raise UsageError(f"bad STRATISAT_BUDGET: {e}") from e


def cmd_check(args) -> int:
    f = _formula(args.file)
    report = check_fragment(f, conflict_budget=_budget(args).conflicts)
    _dump(report.to_json())
    return {"in-fragment": EXIT_SAT, "not-in-fragment": EXIT_NOT_IN_FRAGMENT}.get(report.verdict, EXIT_LIMIT)


def cmd_solve(args) -> int:
    f = _formula(args.file)
    try:
        r = decide(f, max_m=args.max_m, budget=_budget(args), symmetry=not args.no_symmetry, jobs=args.jobs,
                   emit_dimacs=args.emit_dimacs)
    except NotInFragment as e:
        _dump({"result": "not-in-fragment", "report": e.report.to_json()})
        return EXIT_NOT_IN_FRAGMENT
    _dump(r.to_json())
    return {"sat": EXIT_SAT, "unsat": EXIT_UNSAT}.get(r.status, EXIT_LIMIT)


# construct name -> (builder, argument sorts, takes a trailing integer)
def _constructs():
    S1, S2 = Sort.SET, Sort.COLLECTION
    table = {}
    for kind, arity in (("empty", 0), ("full", 0), ("complement", 1), ("union", 2), ("intersection", 2),
                        ("difference", 2)):
        table[f"{kind}0"] = (lambda *v, k=kind: encoders.build_level0(k, *v), (S1,) * (arity + 1), False)
        table[f"{kind}1"] = (lambda *v, k=kind: encoders.build_level1(k, *v), (S2,) * (arity + 1), False)
    for rel, name in (("<=", "le"), ("<", "lt"), (">=", "ge"), ("=", "eq")):
        table[f"card-{name}"] = (lambda Z, h, r=rel: encoders.build_cardinality(r, Z, h), (S1,), True)
        table[f"pow-{name}"] = (lambda A, X, h, k=f"pow_{name}": encoders.build_level1(k, A, X, h=h), (S2, S1), True)
    table["enum"] = (lambda A, *xs: encoders.build_level1("enum", A, *xs), (S2, S1, "..."), False)
    table["pow"] = (lambda A, X: encoders.build_level1("pow", A, X), (S2, S1), False)
    table["pow-star"] = (encoders.build_pow_star, (S2, S1, "..."), False)
    table["ucp-enum"] = (encoders.build_ucp_enum, (S2, S1, "..."), False)
    table["ucp-disjoint"] = (encoders.build_ucp_disjoint, (S2, S1, "..."), False)
    table["ucp-partition"] = (encoders.build_ucp_partition, (S2, S1, "..."), False)
    table["ucp-same"] = (encoders.build_ucp_same, (S2, S1), True)
    return table


CONSTRUCTS = _constructs()


def cmd_encode(args) -> int:
    if args.report is not None:
        if args.report != "ucp":
            raise UsageError(f"unknown report {args.report!r} (expected 'ucp')")
        try:
            sys.stdout.write(encoders.length_report_csv(args.n_max))
        except ValueError as e:
            raise UsageError(str(e)) from e
        return 0
    if not args.construct:
        raise UsageError("encode needs a construct (or --report ucp)")
    name, *rest = args.construct
    if name not in CONSTRUCTS:
        raise UsageError(f"unknown construct {name!r}; known: {', '.join(sorted(CONSTRUCTS))}")
    build, sorts, takes_int = CONSTRUCTS[name]
    h = None
    if takes_int:
        if not rest:
            raise UsageError(f"{name} needs a trailing integer parameter")
        try:
            h = int(rest.pop())
        except ValueError as e:
            raise UsageError(f"{name}: integer parameter expected") from e
    variadic = sorts and sorts[-1] == "..."
    fixed = sorts[:-1] if variadic else sorts
    if len(rest) < len(fixed) or (not variadic and len(rest) != len(fixed)):
        raise UsageError(f"{name}: wrong number of variable arguments")
    vs = [Var(n, fixed[min(i, len(fixed) - 1)]) for i, n in enumerate(rest)]
    try:
        f = build(*vs, h) if takes_int else build(*vs)
    except ValueError as e:
        raise UsageError(f"{name}: {e}") from e
    sys.stdout.write(render(f, vs))
    return 0


def cmd_relativize(args) -> int:
    f = _formula(args.file)
    try:
        M = Interpretation.from_json(_read(args.model))
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"{args.model}: not a model: {e}") from e
    try:
        holds = evaluate(M, f)
    except LookupError as e:
        raise UsageError(f"model does not assign every free variable: {e}") from e
    if not holds:
        raise UsageError("the model does not satisfy the formula")
    for i, nc in enumerate(normalize(f)):
        full = extend_to_conjunction(M, nc)
        if full is None:
            continue
        rep, star = relativized_model(full, nc)
        _dump({"conjunction": i, "universe": rep.to_json(), "model": star.to_json(),
               "satisfies": evaluate(star, nc.formula())})
        return 0
    raise UsageError("no normalized conjunction is satisfied by an extension of the model")


def cmd_bench(args) -> int:
    print("id,result,m,bound,seconds")
    for i, f in enumerate(generate(args.count, seed=args.seed)):
        conjs = normalize(f)
        bound = max((domain_bound(nc) for nc in conjs), default=0)
        t = time.perf_counter()
        try:
            r = decide(f, max_m=args.max_m, budget=_budget(args), jobs=args.jobs)
            status, m = r.status, r.m
        except NotInFragment:
            status, m = "not-in-fragment", None
        print(f"{i},{status},{'' if m is None else m},{bound},{time.perf_counter() - t:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stratisat", description="Satisfiability for a three-sorted quantified set-theory fragment.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--budget", type=int, default=None, help="DPLL conflict budget (default: $STRATISAT_BUDGET)")
        sp.add_argument("--max-m", type=int, default=None, help="largest domain size to try")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("check", help="check fragment membership")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("solve", help="decide satisfiability")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--emit-dimacs", metavar="DIR", default=None)
    sp.add_argument("--no-symmetry", action="store_true")
    sp.set_defaults(run=cmd_solve)

    sp = sub.add_parser("encode", help="print a set-theoretic construct as a formula")
    sp.add_argument("construct", nargs="*")
    sp.add_argument("--report", default=None)
    sp.add_argument("--n-max", type=int, default=5)
    sp.set_defaults(run=cmd_encode)

    sp = sub.add_parser("relativize", help="shrink a model onto its small universe")
    sp.add_argument("file")
    sp.add_argument("model")
    sp.set_defaults(run=cmd_relativize)

    sp = sub.add_parser("bench", help="time the solver on a generated corpus")
    common(sp)
    sp.add_argument("--count", type=int, default=50)
    sp.set_defaults(run=cmd_bench)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required (check, solve, encode, relativize, bench)")
        if getattr(args, "max_m", None) is not None and args.max_m < 1:
            raise UsageError("--max-m must be positive")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be positive")
        return args.run(args)
    except UsageError as e:
        print(f"stratisat: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
