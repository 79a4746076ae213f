"""Reader for line-oriented ``.pkb`` problem files.

Grammar, one statement per line, ``#`` starts a comment::

    vars A B C
    assume P(<expr>) = <rat>
    assume P(<expr>) >= <rat>
    assume P(<expr>) <= <rat>
    assume P(<expr>) in [<rat>, <rat>]
    query P(<expr>)
    option <key> <value>

``<rat>`` is ``p/q``, an integer or a decimal, read exactly (``0.4`` is
``2/5``). Recognized options: ``degree``, ``budgets`` (comma separated),
``mode`` (auto, exact, relaxed) and ``time_limit`` (seconds).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .engine import MODES, RefinementConfig
from .errors import ParseError
from .formula import Expr, Var, parse_expression
from .kb import Assertion, KnowledgeBase

_RATIONAL = re.compile(r"[+-]?(\d+/\d+|\d+(\.\d*)?|\.\d+)")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_RESERVED = {"P"}


class ProblemError(ParseError):
    """A problem file line failed to parse; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<input>"):
        self.line = line
        self.column = column
        self.source = source
        ValueError.__init__(self, f"{source}:{line}:{column}: {message}")
        self.position = None
        self.text = None


def parse_rational(text: str) -> Fraction:
    """Exact value of ``p/q``, an integer or a decimal literal."""
    text = text.strip()
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"not a rational number: {text!r}")
    return Fraction(text)


@dataclass(frozen=True)
class Query:
    text: str
    expr: Expr
    line: int


@dataclass
class ProblemFile:
    path: str
    variables: list[str] = field(default_factory=list)
    assertions: list[tuple[Assertion, int]] = field(default_factory=list)
    queries: list[Query] = field(default_factory=list)
    options: dict = field(default_factory=dict)

    def knowledge_base(self) -> KnowledgeBase:
        return KnowledgeBase(tuple(self.variables), tuple(a for a, _ in self.assertions))

    def config(self, **overrides) -> RefinementConfig:
        """Options from the file, with explicit overrides taking precedence."""
        values = dict(self.options)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RefinementConfig(**values)

    def point_probabilities(self) -> dict[str, Fraction]:
        """``P(X) = p`` assertions on single variables."""
        out = {}
        for a, _ in self.assertions:
            if a.kind == "equal" and isinstance(a.event, Var):
                out[a.event.name] = a.lower
        return out


def _split_probability(body: str, line: int, offset: int, source: str) -> tuple[str, str, int]:
    """Split ``P(<expr>) rest`` into the expression text, the rest, and the
    column where the expression starts."""
    stripped = body.lstrip()
    col = offset + len(body) - len(stripped)
    if not stripped.startswith("P("):
        raise ProblemError("expected P(<expr>)", line, col + 1, source)
    depth = 0
    for i, ch in enumerate(stripped[1:], start=1):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return stripped[2:i], stripped[i + 1 :], col + 2
    raise ProblemError("unbalanced parentheses in P(...)", line, col + 1, source)


def _parse_expr(text: str, variables: list[str], line: int, col: int, source: str) -> Expr:
    try:
        return parse_expression(text, variables)
    except ParseError as exc:
        pos = exc.position or 0
        msg = str(exc).split(" (at position")[0]
        raise ProblemError(msg, line, col + pos + 1, source) from None


def _rat(text: str, line: int, source: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise ProblemError(str(exc), line, 1, source) from None


def _parse_option(key: str, value: str, line: int, source: str):
    try:
        if key == "degree":
            return int(value)
        if key == "budgets":
            return tuple(int(v) for v in value.split(","))
        if key == "mode":
            if value not in MODES:
                raise ValueError(f"mode must be one of {', '.join(MODES)}")
            return value
        if key == "time_limit":
            return float(value)
    except ValueError as exc:
        raise ProblemError(f"bad value for option {key!r}: {exc}", line, 1, source) from None
    raise ProblemError(f"unknown option {key!r}", line, 1, source)


def parse_problem(text: str, source: str = "<input>") -> ProblemFile:
    prob = ProblemFile(source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        keyword, _, rest = line.strip().partition(" ")
        rest_col = indent + len(keyword) + 1
        if keyword == "vars":
            for m in _IDENT.finditer(rest):
                name = m.group()
                if name in _RESERVED:
                    raise ProblemError(f"{name!r} is reserved", lineno, rest_col + m.start() + 1, source)
                if name in prob.variables:
                    raise ProblemError(f"variable {name!r} declared twice", lineno, rest_col + m.start() + 1, source)
                prob.variables.append(name)
            leftover = _IDENT.sub("", rest).replace(",", " ").strip()
            if leftover:
                raise ProblemError(f"bad variable list {rest.strip()!r}", lineno, rest_col + 1, source)
        elif keyword == "assume":
            expr_text, tail, col = _split_probability(rest, lineno, rest_col, source)
            expr = _parse_expr(expr_text, prob.variables, lineno, col, source)
            tail = tail.strip()
            try:
                if tail.startswith(">="):
                    a = Assertion.at_least(expr, _rat(tail[2:], lineno, source))
                elif tail.startswith("<="):
                    a = Assertion.at_most(expr, _rat(tail[2:], lineno, source))
                elif tail.startswith("="):
                    a = Assertion.equal(expr, _rat(tail[1:], lineno, source))
                elif tail.startswith("in"):
                    m = re.fullmatch(r"in\s*\[\s*([^,\]]+?)\s*,\s*([^\]]+?)\s*\]", tail)
                    if not m:
                        raise ProblemError("expected 'in [<rat>, <rat>]'", lineno, 1, source)
                    a = Assertion.interval(expr, _rat(m.group(1), lineno, source), _rat(m.group(2), lineno, source))
                else:
                    raise ProblemError("expected one of '=', '>=', '<=', 'in' after P(...)", lineno, 1, source)
            except ProblemError:
                raise
            except ValueError as exc:
                raise ProblemError(str(exc), lineno, 1, source) from None
            prob.assertions.append((a, lineno))
        elif keyword == "query":
            expr_text, tail, col = _split_probability(rest, lineno, rest_col, source)
            if tail.strip():
                raise ProblemError(f"unexpected text after query: {tail.strip()!r}", lineno, 1, source)
            expr = _parse_expr(expr_text, prob.variables, lineno, col, source)
            prob.queries.append(Query(expr_text.strip(), expr, lineno))
        elif keyword == "option":
            parts = rest.split()
            if len(parts) != 2:
                raise ProblemError("expected 'option <key> <value>'", lineno, 1, source)
            prob.options[parts[0]] = _parse_option(parts[0], parts[1], lineno, source)
        else:
            raise ProblemError(f"unknown statement {keyword!r}", lineno, indent + 1, source)
    return prob


def load_problem(path: str | Path) -> ProblemFile:
    path = Path(path)
    return parse_problem(path.read_text(), str(path))
