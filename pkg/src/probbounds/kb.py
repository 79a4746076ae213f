"""Knowledge bases: probability assertions over boolean events."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ResourceLimitError
from .formula import (
    CnfFormula,
    CnfMode,
    Expr,
    parse_expression,
    render,
    to_cnf,
    variables_of,
)
from .linear import as_fraction


@dataclass(frozen=True)
class Assertion:
    """``lower <= P(event) <= upper``; a missing side is unconstrained.

    Point assertions have ``lower == upper``.
    """

    event: Expr
    lower: Fraction | None = None
    upper: Fraction | None = None

    def __post_init__(self):
        lo = None if self.lower is None else as_fraction(self.lower)
        hi = None if self.upper is None else as_fraction(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo is None and hi is None:
            raise ValueError("assertion needs at least one bound")
        for p in (lo, hi):
            if p is not None and not 0 <= p <= 1:
                raise ValueError(f"probability {p} outside [0, 1]")
        if lo is not None and hi is not None and lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")

    @classmethod
    def equal(cls, event: Expr, p) -> "Assertion":
        return cls(event, p, p)

    @classmethod
    def at_least(cls, event: Expr, p) -> "Assertion":
        return cls(event, p, None)

    @classmethod
    def at_most(cls, event: Expr, p) -> "Assertion":
        return cls(event, None, p)

    @classmethod
    def interval(cls, event: Expr, lo, hi) -> "Assertion":
        return cls(event, lo, hi)

    @property
    def kind(self) -> str:
        if self.lower is not None and self.lower == self.upper:
            return "equal"
        if self.upper is None:
            return "at_least"
        if self.lower is None:
            return "at_most"
        return "interval"

    def __str__(self):
        e = render(self.event)
        if self.kind == "equal":
            return f"P({e}) = {self.lower}"
        if self.kind == "at_least":
            return f"P({e}) >= {self.lower}"
        if self.kind == "at_most":
            return f"P({e}) <= {self.upper}"
        return f"P({e}) in [{self.lower}, {self.upper}]"


@dataclass(frozen=True)
class KnowledgeBase:
    """Declared variables, assertions, and probability-one definitional clauses.

    ``definitional_units`` hold clause expressions over auxiliary variables
    introduced by definitional CNF conversion; they are appended to
    ``variables`` and asserted with probability one so that every auxiliary
    variable is almost surely equal to the subformula it names.
    """

    variables: tuple[str, ...]
    assertions: tuple[Assertion, ...] = ()
    definitional_units: tuple[Expr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "assertions", tuple(self.assertions))
        object.__setattr__(self, "definitional_units", tuple(self.definitional_units))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable declarations")
        for a in self.assertions:
            self.check_declared(a.event)
        for u in self.definitional_units:
            self.check_declared(u)

    def check_declared(self, expr: Expr) -> None:
        missing = [v for v in variables_of(expr) if v not in self.variables]
        if missing:
            raise ValueError(f"undeclared variables {missing}")

    @classmethod
    def from_strings(cls, variables: Sequence[str], assertions: Iterable[tuple]) -> "KnowledgeBase":
        """Convenience builder: ``(text, p)`` or ``(text, lo, hi)`` tuples."""
        built = []
        for item in assertions:
            expr = parse_expression(item[0], variables)
            if len(item) == 2:
                built.append(Assertion.equal(expr, item[1]))
            else:
                built.append(Assertion(expr, item[1], item[2]))
        return cls(tuple(variables), tuple(built))

    @property
    def n(self) -> int:
        return len(self.variables)

    def all_assertions(self) -> tuple[Assertion, ...]:
        """User assertions followed by the probability-one definitional clauses."""
        return self.assertions + tuple(Assertion.equal(u, 1) for u in self.definitional_units)

    def with_assertions(self, *extra: Assertion) -> "KnowledgeBase":
        return KnowledgeBase(self.variables, self.assertions + tuple(extra), self.definitional_units)

    def cnf_of(self, expr: Expr) -> tuple[CnfFormula, "KnowledgeBase"]:
        """CNF of ``expr`` over this base's variables.

        Falls back to definitional conversion when equivalent conversion is
        too large; the returned base then carries the extra auxiliary
        variables and their probability-one clauses.
        """
        try:
            return to_cnf(expr, CnfMode.EQUIVALENT, self.variables), self
        except ResourceLimitError:
            pass
        cnf = to_cnf(expr, CnfMode.DEFINITIONAL, self.variables)
        units = tuple(cnf.clause_expr(c) for c in cnf.definitional_clauses())
        kb = KnowledgeBase(cnf.variables, self.assertions, self.definitional_units + units)
        return cnf, kb
