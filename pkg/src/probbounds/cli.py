"""Command-line front end.

Exit status: 0 success, 1 infeasible (or an invalid inequality for
``verify-ineq``), 2 input error, 3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence, TextIO

from .algebra import clause_matrices_direct, clause_matrices_recursive
from .atoms import default_names
from .engine import (
    BoundResult,
    Consistent,
    bound,
    check_consistency,
    fuzzy_evaluate,
    refine,
    uses_exact,
)
from .errors import ParseError, ResourceLimitError
from .formula import render, variables_of
from .inequalities import is_valid, parse_inequality
from .problem import ProblemFile, load_problem
from .projection import enumerate_facets

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


class InputError(Exception):
    """Invalid command-line input detected after argument parsing."""


def fmt_decimal(x: Fraction) -> str:
    return format(float(x), ".6g")


def rational_json(x: Fraction) -> dict:
    return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}


def measure_json(vec) -> dict:
    return {vec.space.atom_label(m): rational_json(v) for m, v in enumerate(vec.entries) if v}


def interval_text(lo: Fraction, hi: Fraction) -> str:
    return f"[{lo}, {hi}]  (= [{fmt_decimal(lo)}, {fmt_decimal(hi)}])"


def _mode_json(res: BoundResult) -> dict:
    if res.mode == "exact":
        return {"name": "exact"}
    return {"name": "relaxed", "degree": res.degree, "budget": res.budget}


def result_json(res: BoundResult) -> dict:
    out = {"status": res.status, "mode": _mode_json(res), "timed_out": res.timed_out}
    if res.feasible:
        out["interval"] = [rational_json(res.lo), rational_json(res.hi)]
        if res.witnesses:
            out["witnesses"] = [measure_json(w) for w in res.witnesses]
    else:
        out["certificate"] = res.certificate_lines()
    out["stats"] = dict(res.stats)
    return out


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _load(path: str) -> ProblemFile:
    try:
        return load_problem(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_bound(args, out: TextIO) -> int:
    prob = _load(args.file)
    if not prob.queries:
        raise InputError(f"{args.file}: no query lines")
    relaxed_flags = args.degree is not None or args.budget is not None
    if args.exact and relaxed_flags:
        raise InputError("--exact cannot be combined with --degree or --budget")
    mode = "exact" if args.exact else ("relaxed" if relaxed_flags else None)
    cfg = prob.config(
        degree=args.degree, budgets=args.budget, time_limit=args.time_limit, mode=mode
    )
    kb = prob.knowledge_base()
    status = EXIT_OK
    records = []
    for q in prob.queries:
        label = f"P({render(q.expr)})"
        if uses_exact(kb, cfg):
            res, steps = bound(kb, q.expr, cfg), []
        else:
            steps = list(refine(kb, q.expr, cfg))
            res = steps[-1]
        if not res.feasible:
            status = EXIT_INFEASIBLE
        records.append((label, res, steps))
        if args.json:
            continue
        if res.feasible:
            line = f"{label} in {interval_text(res.lo, res.hi)}"
            if res.mode == "relaxed":
                line += f"  relaxed degree={res.degree} budget={res.budget}"
            if res.timed_out:
                line += "  (time limit reached)"
            print(line, file=out)
            for st in steps[:-1]:
                print(f"  budget {st.budget}: [{st.lo}, {st.hi}]", file=out)
        else:
            print(f"{label}: infeasible knowledge base; certificate:", file=out)
            for c in res.certificate_lines():
                print(f"  {c}", file=out)
    if args.json:
        doc = {
            "command": "bound",
            "file": args.file,
            "queries": [
                {"query": label, **result_json(res), "steps": [result_json(s) for s in steps]}
                for label, res, steps in records
            ],
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
    return status


def cmd_check(args, out: TextIO) -> int:
    prob = _load(args.file)
    verdict = check_consistency(prob.knowledge_base())
    if isinstance(verdict, Consistent):
        if args.json:
            doc = {"command": "check", "status": "consistent", "witness": measure_json(verdict.witness)}
            json.dump(doc, out, indent=2)
            out.write("\n")
        else:
            print("consistent; witness measure:", file=out)
            w = verdict.witness
            for m, v in enumerate(w.entries):
                if v:
                    print(f"  P({w.space.atom_label(m)}) = {v}", file=out)
        return EXIT_OK
    if args.json:
        doc = {"command": "check", "status": "inconsistent", "certificate": verdict.certificate_lines()}
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        print("inconsistent; certificate (row multipliers summing to 0 >= positive):", file=out)
        for c in verdict.certificate_lines():
            print(f"  {c}", file=out)
    return EXIT_INFEASIBLE


def cmd_fuzzy(args, out: TextIO) -> int:
    prob = _load(args.file)
    if not prob.queries:
        raise InputError(f"{args.file}: no query lines")
    probs = prob.point_probabilities()
    for q in prob.queries:
        missing = [v for v in variables_of(q.expr) if v not in probs]
        if missing:
            raise InputError(
                f"{args.file}:{q.line}: fuzzy evaluation needs 'assume P(X) = p' for {', '.join(missing)}"
            )
        value = fuzzy_evaluate(q.expr, probs)
        print(f"P({render(q.expr)}) ~ {value}  (= {fmt_decimal(value)})", file=out)
    return EXIT_OK


def cmd_facets(args, out: TextIO) -> int:
    facets = enumerate_facets(args.n, args.degree)
    for line in facets.lines():
        print(line, file=out)
    return EXIT_OK


def cmd_matrices(args, out: TextIO) -> int:
    build = clause_matrices_recursive if args.method == "recursive" else clause_matrices_direct
    mats = build(args.n)
    names = " ".join(mats[0].variables) if args.n else "(none)"
    print(f"N={args.n} variables={names} rows={1 << args.n}", file=out)
    for i, mat in enumerate(mats):
        print(f"C[{args.n},{i}] columns={mat.n_columns}", file=out)
        for line in mat.dump_lines():
            print(f"  {line}", file=out)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    try:
        with open(args.file) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    names = default_names(args.n)
    status = EXIT_OK
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            ineq = parse_inequality(text, names)
        except (ParseError, ValueError) as exc:
            raise InputError(f"{args.file}:{lineno}: {exc}") from None
        verdict = is_valid(ineq)
        if verdict:
            print(f"{lineno}: valid ({len(verdict.tight)} tight atoms): {ineq.text()}", file=out)
        else:
            status = EXIT_INFEASIBLE
            atom = ineq.space.atom_label(verdict.witness)
            print(f"{lineno}: INVALID at atom {atom} (value {verdict.value}): {ineq.text()}", file=out)
    return status


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _budgets(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("budgets must be nonnegative integers")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="probbounds", description="Exact and relaxed probability bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="bound each query of a problem file")
    b.add_argument("file")
    b.add_argument("--exact", action="store_true", help="force exact mode")
    b.add_argument("--degree", type=int, help="basis degree for relaxed mode")
    b.add_argument("--budget", type=_budgets, help="budget schedule, e.g. 16,64,256")
    b.add_argument("--time-limit", type=float, dest="time_limit", help="seconds")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("check", help="consistency of the assertions")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("fuzzy", help="min/max baseline estimate per query")
    f.add_argument("file")
    f.set_defaults(func=cmd_fuzzy)

    fa = sub.add_parser("facets", help="facets of the projected simplex")
    fa.add_argument("--n", type=int, required=True)
    fa.add_argument("--degree", type=int, required=True)
    fa.set_defaults(func=cmd_facets)

    m = sub.add_parser("matrices", help="dump the clause matrices")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--method", choices=("direct", "recursive"), default="direct")
    m.set_defaults(func=cmd_matrices)

    v = sub.add_parser("verify-ineq", help="check validity of inequalities, one per line")
    v.add_argument("file")
    v.add_argument("--n", type=int, required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ResourceLimitError as exc:
        print(f"error: resource guard: {exc}", file=err)
        return EXIT_GUARD
    except (InputError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())
