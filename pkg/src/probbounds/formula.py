"""Boolean event expressions: parsing, rendering, CNF conversion, truth tables.

Grammar (whitespace insignificant, ``#`` starts a line comment)::

    expr  := impl
    impl  := orE ("->" impl)?
    orE   := xorE ("|" xorE)*
    xorE  := andE ("^" andE)*
    andE  := unary ("&" unary)*
    unary := "~" unary | "(" expr ")" | IDENT | "1" | "0"
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .atoms import AtomSpace, AtomVector
from .errors import ParseError, ResourceLimitError, UndeclaredVariableError

MAX_EQUIVALENT_VARIABLES = 16
MAX_TRUTH_TABLE_VARIABLES = 24


# --------------------------------------------------------------------------
# Expression tree
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not:
    child: "Expr"


class _NAry:
    """Flattened n-ary connective with at least two children."""

    __slots__ = ("children",)

    def __init__(self, *children: "Expr"):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        flat: list[Expr] = []
        for c in children:
            if type(c) is type(self):
                flat.extend(c.children)
            else:
                flat.append(c)
        if len(flat) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two children")
        object.__setattr__(self, "children", tuple(flat))

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    def __eq__(self, other):
        return type(other) is type(self) and other.children == self.children

    def __hash__(self):
        return hash((type(self).__name__, self.children))

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self.children))})"


class And(_NAry):
    __slots__ = ()


class Or(_NAry):
    __slots__ = ()


@dataclass(frozen=True)
class Implies:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Xor:
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Var, Const, Not, And, Or, Implies, Xor]


def conj(*children: Expr) -> Expr:
    """And of any number of children (``TRUE`` for none)."""
    if not children:
        return TRUE
    if len(children) == 1:
        return children[0]
    return And(*children)


def disj(*children: Expr) -> Expr:
    """Or of any number of children (``FALSE`` for none)."""
    if not children:
        return FALSE
    if len(children) == 1:
        return children[0]
    return Or(*children)


def variables_of(expr: Expr) -> tuple[str, ...]:
    """Variable names in order of first appearance."""
    seen: dict[str, None] = {}

    def walk(e):
        if isinstance(e, Var):
            seen.setdefault(e.name)
        elif isinstance(e, Not):
            walk(e.child)
        elif isinstance(e, (And, Or)):
            for c in e.children:
                walk(c)
        elif isinstance(e, (Implies, Xor)):
            walk(e.lhs)
            walk(e.rhs)

    walk(expr)
    return tuple(seen)


# --------------------------------------------------------------------------
# Parsing and rendering
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<const>[01](?![0-9A-Za-z_]))
  | (?P<op>[~&|^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, declared: Sequence[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.declared = None if declared is None else set(declared)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, value: str | None = None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.impl()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos, self.text)
        return e

    def impl(self) -> Expr:
        lhs = self.or_()
        if self.peek()[1] == "->":
            self.take()
            return Implies(lhs, self.impl())
        return lhs

    def or_(self) -> Expr:
        items = [self.xor()]
        while self.peek()[1] == "|":
            self.take()
            items.append(self.xor())
        return disj(*items)

    def xor(self) -> Expr:
        e = self.and_()
        while self.peek()[1] == "^":
            self.take()
            e = Xor(e, self.and_())
        return e

    def and_(self) -> Expr:
        items = [self.unary()]
        while self.peek()[1] == "&":
            self.take()
            items.append(self.unary())
        return conj(*items)

    def unary(self) -> Expr:
        kind, value, pos = self.peek()
        if value == "~":
            self.take()
            return Not(self.unary())
        if value == "(":
            self.take()
            e = self.impl()
            self.take(")")
            return e
        if kind == "ident":
            self.take()
            if self.declared is not None and value not in self.declared:
                raise UndeclaredVariableError(
                    f"undeclared variable {value!r}", pos, self.text
                )
            return Var(value)
        if kind == "const":
            self.take()
            return TRUE if value == "1" else FALSE
        found = value or "end of input"
        raise ParseError(f"expected an operand, found {found!r}", pos, self.text)


def parse_expression(text: str, declared_vars: Sequence[str] | None = None) -> Expr:
    """Parse ``text`` into an expression tree.

    Precedence, tightest first: ``~``, ``&``, ``^``, ``|``, ``->`` (right
    associative). When ``declared_vars`` is given, any other identifier raises
    :class:`UndeclaredVariableError`.

    >>> parse_expression("A -> (B | C)")
    Implies(lhs=Var(name='A'), rhs=Or(Var(name='B'), Var(name='C')))
    """
    return _Parser(text, declared_vars).parse()


_PREC = {Implies: 1, Or: 2, Xor: 3, And: 4, Not: 5, Var: 6, Const: 6}


def render(expr: Expr) -> str:
    """Print ``expr`` in the input grammar with minimal parentheses."""

    def wrap(e: Expr, min_prec: int) -> str:
        s = render(e)
        return f"({s})" if _PREC[type(e)] < min_prec else s

    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return "1" if expr.value else "0"
    if isinstance(expr, Not):
        return "~" + wrap(expr.child, _PREC[Not])
    if isinstance(expr, And):
        return " & ".join(wrap(c, _PREC[And] + 1) for c in expr.children)
    if isinstance(expr, Or):
        return " | ".join(wrap(c, _PREC[Or] + 1) for c in expr.children)
    if isinstance(expr, Xor):
        return f"{wrap(expr.lhs, _PREC[Xor])} ^ {wrap(expr.rhs, _PREC[Xor] + 1)}"
    if isinstance(expr, Implies):
        return f"{wrap(expr.lhs, _PREC[Implies] + 1)} -> {wrap(expr.rhs, _PREC[Implies])}"
    raise TypeError(f"not an expression: {expr!r}")


# --------------------------------------------------------------------------
# Normal forms
# --------------------------------------------------------------------------


def desugar(expr: Expr) -> Expr:
    """Rewrite Implies and Xor in terms of Not/And/Or."""
    if isinstance(expr, (Var, Const)):
        return expr
    if isinstance(expr, Not):
        return Not(desugar(expr.child))
    if isinstance(expr, And):
        return And(*(desugar(c) for c in expr.children))
    if isinstance(expr, Or):
        return Or(*(desugar(c) for c in expr.children))
    if isinstance(expr, Implies):
        return disj(Not(desugar(expr.lhs)), desugar(expr.rhs))
    if isinstance(expr, Xor):
        a, b = desugar(expr.lhs), desugar(expr.rhs)
        return Or(And(a, Not(b)), And(Not(a), b))
    raise TypeError(f"not an expression: {expr!r}")


def _nnf(expr: Expr, negate: bool = False) -> Expr:
    """Negation normal form with constants folded; input must be desugared."""
    if isinstance(expr, Const):
        return Const(expr.value != negate)
    if isinstance(expr, Var):
        return Not(expr) if negate else expr
    if isinstance(expr, Not):
        return _nnf(expr.child, not negate)
    is_and = isinstance(expr, And) != negate
    parts: list[Expr] = []
    for c in expr.children:
        sub = _nnf(c, negate)
        if isinstance(sub, Const):
            if sub.value != is_and:  # absorbing element
                return sub
            continue
        if sub not in parts:
            parts.append(sub)
    for p in parts:
        if isinstance(p, Not) and p.child in parts:
            return FALSE if is_and else TRUE
    if not parts:
        return TRUE if is_and else FALSE
    return conj(*parts) if is_and else disj(*parts)


Literal = tuple[int, bool]
Clause = frozenset


def _clause_key(clause: Clause):
    return (len(clause), sorted((i, not pos) for i, pos in clause))


def _is_tautology(clause: Clause) -> bool:
    return any((i, not pos) in clause for i, pos in clause)


class CnfMode(enum.Enum):
    EQUIVALENT = "equivalent"
    DEFINITIONAL = "definitional"


@dataclass(frozen=True)
class CnfFormula:
    """A conjunction of clauses; each clause is a frozenset of ``(index, positive)``.

    ``aux_defs`` lists auxiliary variables introduced by definitional
    conversion, each with the expression (over literals) it stands for.
    """

    variables: tuple[str, ...]
    clauses: tuple[Clause, ...]
    aux_defs: tuple[tuple[str, Expr], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        clauses = tuple(frozenset(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "aux_defs", tuple(self.aux_defs))
        if len(set(clauses)) != len(clauses):
            raise ValueError("duplicate clauses")
        n = len(self.variables)
        for c in clauses:
            if _is_tautology(c):
                raise ValueError(f"clause contains both polarities: {self.clause_text(c)}")
            if any(not 0 <= i < n for i, _ in c):
                raise ValueError("literal index out of range")

    @property
    def aux_variables(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.aux_defs)

    @property
    def original_variables(self) -> tuple[str, ...]:
        aux = set(self.aux_variables)
        return tuple(v for v in self.variables if v not in aux)

    def literal_text(self, lit: Literal) -> str:
        i, pos = lit
        return self.variables[i] if pos else "~" + self.variables[i]

    def clause_text(self, clause: Clause) -> str:
        if not clause:
            return "0"
        lits = sorted(clause, key=lambda l: (l[0], not l[1]))
        return " | ".join(self.literal_text(l) for l in lits)

    def clause_expr(self, clause: Clause) -> Expr:
        lits = sorted(clause, key=lambda l: (l[0], not l[1]))
        return disj(*(Var(self.variables[i]) if p else Not(Var(self.variables[i])) for i, p in lits))

    def to_expr(self) -> Expr:
        return conj(*(self.clause_expr(c) for c in self.clauses))

    def definitional_clauses(self) -> tuple[Clause, ...]:
        """Clauses that only pin auxiliary variables to their definitions."""
        if not self.aux_defs:
            return ()
        index = {v: i for i, v in enumerate(self.variables)}
        out: list[Clause] = []
        for name, definition in self.aux_defs:
            for c in _definition_clauses(index[name], definition, index):
                if c not in out:
                    out.append(c)
        return tuple(out)

    def root_clauses(self) -> tuple[Clause, ...]:
        defs = set(self.definitional_clauses())
        return tuple(c for c in self.clauses if c not in defs)

    def __str__(self):
        return " & ".join(f"({self.clause_text(c)})" for c in self.clauses) or "1"


def _literal_of(e: Expr, index: dict[str, int]) -> Literal:
    if isinstance(e, Var):
        return (index[e.name], True)
    if isinstance(e, Not) and isinstance(e.child, Var):
        return (index[e.child.name], False)
    raise TypeError(f"not a literal: {e!r}")


def _definition_clauses(aux: int, definition: Expr, index: dict[str, int]) -> list[Clause]:
    lits = [_literal_of(c, index) for c in definition.children]
    neg = [(i, not p) for i, p in lits]
    if isinstance(definition, And):
        raw = [frozenset({(aux, False), l}) for l in lits]
        raw.append(frozenset([(aux, True), *neg]))
    else:
        raw = [frozenset([(aux, False), *lits])]
        raw.extend(frozenset({(aux, True), l}) for l in neg)
    return [c for c in raw if not _is_tautology(c)]


def _distribute(e: Expr, index: dict[str, int]) -> set[Clause]:
    if isinstance(e, Const):
        return set() if e.value else {frozenset()}
    if isinstance(e, (Var, Not)):
        return {frozenset({_literal_of(e, index)})}
    if isinstance(e, And):
        out: set[Clause] = set()
        for c in e.children:
            out |= _distribute(c, index)
        return out
    product: set[Clause] = {frozenset()}
    for c in e.children:
        sub = _distribute(c, index)
        product = {a | b for a in product for b in sub}
        product = {c for c in product if not _is_tautology(c)}
    return product


def _is_clause_shaped(e: Expr) -> bool:
    if isinstance(e, (Var, Not, Const)):
        return True
    return isinstance(e, Or) and all(isinstance(c, (Var, Not)) for c in e.children)


def _is_cnf_shaped(e: Expr) -> bool:
    """Already a conjunction of clauses, so distribution cannot blow up."""
    if isinstance(e, And):
        return all(_is_clause_shaped(c) for c in e.children)
    return _is_clause_shaped(e)


def _fresh_names(taken: set[str]) -> Iterator[str]:
    for k in itertools.count(1):
        name = f"aux_{k}"
        if name not in taken:
            yield name


def to_cnf(
    expr: Expr,
    mode: CnfMode | str = CnfMode.EQUIVALENT,
    variables: Sequence[str] | None = None,
) -> CnfFormula:
    """Convert ``expr`` to conjunctive normal form.

    In equivalent mode the result is logically equivalent to ``expr``
    (distribution, guarded at 16 variables unless the input is already a
    conjunction of clauses). Definitional mode introduces one
    auxiliary variable per connective and records its definition; the clauses
    then define the event only together with the definitional clauses holding.
    """
    mode = CnfMode(mode)
    names = tuple(variables) if variables is not None else variables_of(expr)
    missing = [v for v in variables_of(expr) if v not in names]
    if missing:
        raise ValueError(f"variables {missing} not in variable list")
    nnf = _nnf(desugar(expr))

    if mode is CnfMode.EQUIVALENT:
        used = variables_of(nnf)
        if len(used) > MAX_EQUIVALENT_VARIABLES and not _is_cnf_shaped(nnf):
            raise ResourceLimitError(
                f"equivalent CNF over {len(used)} variables exceeds the "
                f"{MAX_EQUIVALENT_VARIABLES}-variable guard"
            )
        index = {v: i for i, v in enumerate(names)}
        clauses = sorted(_distribute(nnf, index), key=_clause_key)
        return CnfFormula(names, tuple(clauses))

    fresh = _fresh_names(set(names))
    all_names = list(names)
    index = {v: i for i, v in enumerate(all_names)}
    defs: list[tuple[str, Expr]] = []
    memo: dict[Expr, Expr] = {}

    def encode(e: Expr) -> Expr:
        if isinstance(e, (Var, Not)):
            return e
        if e in memo:
            return memo[e]
        children = [encode(c) for c in e.children]
        name = next(fresh)
        index[name] = len(all_names)
        all_names.append(name)
        defs.append((name, type(e)(*children)))
        memo[e] = Var(name)
        return memo[e]

    if isinstance(nnf, Const):
        return to_cnf(nnf, CnfMode.EQUIVALENT, names)
    root = encode(nnf)
    clauses: list[Clause] = []
    for name, definition in defs:
        for c in _definition_clauses(index[name], definition, index):
            if c not in clauses:
                clauses.append(c)
    unit = frozenset({_literal_of(root, index)})
    if unit not in clauses:
        clauses.append(unit)
    return CnfFormula(tuple(all_names), tuple(clauses), tuple(defs))


# --------------------------------------------------------------------------
# Truth tables
# --------------------------------------------------------------------------


def _check_tt_size(n: int) -> None:
    if n > MAX_TRUTH_TABLE_VARIABLES:
        raise ResourceLimitError(
            f"truth table over {n} variables exceeds the "
            f"{MAX_TRUTH_TABLE_VARIABLES}-variable guard"
        )


def _bit_columns(n: int) -> list[np.ndarray]:
    idx = np.arange(1 << n, dtype=np.int64)
    return [((idx >> i) & 1).astype(bool) for i in range(n)]


def truth_mask(expr: Expr, var_order: Sequence[str]) -> np.ndarray:
    """Boolean array over atoms: entry ``m`` is the value of ``expr`` at atom ``m``."""
    var_order = tuple(var_order)
    _check_tt_size(len(var_order))
    missing = [v for v in variables_of(expr) if v not in var_order]
    if missing:
        raise ValueError(f"variables {missing} not in variable order {var_order}")
    cols = dict(zip(var_order, _bit_columns(len(var_order))))
    size = 1 << len(var_order)

    def ev(e: Expr) -> np.ndarray:
        if isinstance(e, Var):
            return cols[e.name]
        if isinstance(e, Const):
            return np.full(size, e.value, dtype=bool)
        if isinstance(e, Not):
            return ~ev(e.child)
        if isinstance(e, And):
            return np.logical_and.reduce([ev(c) for c in e.children])
        if isinstance(e, Or):
            return np.logical_or.reduce([ev(c) for c in e.children])
        if isinstance(e, Implies):
            return ~ev(e.lhs) | ev(e.rhs)
        if isinstance(e, Xor):
            return ev(e.lhs) ^ ev(e.rhs)
        raise TypeError(f"not an expression: {e!r}")

    return ev(expr)


def truth_table(expr: Expr, var_order: Sequence[str]) -> AtomVector:
    """0/1 indicator of ``expr`` over the atoms of ``var_order``."""
    mask = truth_mask(expr, var_order)
    return AtomVector(AtomSpace(tuple(var_order)), tuple(int(b) for b in mask))


def cnf_truth_mask(cnf: CnfFormula, var_order: Sequence[str] | None = None) -> np.ndarray:
    """Boolean array of atoms satisfying every clause of ``cnf``."""
    var_order = cnf.variables if var_order is None else tuple(var_order)
    _check_tt_size(len(var_order))
    pos = {v: i for i, v in enumerate(var_order)}
    cols = _bit_columns(len(var_order))
    out = np.ones(1 << len(var_order), dtype=bool)
    for clause in cnf.clauses:
        sat = np.zeros_like(out)
        for i, p in clause:
            col = cols[pos[cnf.variables[i]]]
            sat |= col if p else ~col
        out &= sat
    return out
