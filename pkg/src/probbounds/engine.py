"""Probability bounds for queries against a knowledge base.

Two modes share one interface. Exact mode solves LPs over the full atom
simplex and returns attaining measures. Relaxed mode works in the
degree-``d`` monotone conjunction basis, constrained by a budgeted prefix of
the generated inequality family; its intervals are sound but may be wider.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

from .algebra import Term, subset_moebius
from .atoms import AtomSpace, AtomVector
from .errors import ResourceLimitError
from .formula import (
    And,
    CnfFormula,
    MAX_EQUIVALENT_VARIABLES,
    CnfMode,
    Const,
    Expr,
    Not,
    Or,
    Var,
    conj,
    desugar,
    render,
    to_cnf,
    truth_mask,
    variables_of,
)
from .inequalities import iter_family
from .kb import Assertion, KnowledgeBase
from .linear import EQ, GE, Row, as_fraction
from .lp import Infeasible, LinearProgram, Optimal, Unbounded, solve

EXACT_THRESHOLD = 12
MAX_SUPPORT_FOR_MOEBIUS = 16
ORACLE_AFFORDABLE = 6
MODES = ("auto", "exact", "relaxed")


# --------------------------------------------------------------------------
# Fuzzy baseline
# --------------------------------------------------------------------------


def fuzzy_evaluate(expr: Expr, probs: Mapping[str, object]) -> Fraction:
    """Min/max evaluation: And is min, Or is max, Not is ``1 - p``."""
    missing = [v for v in variables_of(expr) if v not in probs]
    if missing:
        raise ValueError(f"no point probability for {missing}")
    p = {k: as_fraction(v) for k, v in probs.items()}
    for k, v in p.items():
        if not 0 <= v <= 1:
            raise ValueError(f"P({k}) = {v} outside [0, 1]")

    def ev(e: Expr) -> Fraction:
        if isinstance(e, Var):
            return p[e.name]
        if isinstance(e, Const):
            return Fraction(int(e.value))
        if isinstance(e, Not):
            return 1 - ev(e.child)
        if isinstance(e, And):
            return min(ev(c) for c in e.children)
        if isinstance(e, Or):
            return max(ev(c) for c in e.children)
        raise TypeError(f"not an expression: {e!r}")

    return ev(desugar(expr))


# --------------------------------------------------------------------------
# Results and configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementConfig:
    degree: int = 2
    budgets: tuple[int, ...] = (16, 64, 256)
    time_limit: float | None = None
    mode: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "budgets", tuple(int(b) for b in self.budgets))
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if not self.budgets:
            raise ValueError("budget schedule must be nonempty")
        if any(b < 0 for b in self.budgets):
            raise ValueError("budgets must be nonnegative")
        if any(b2 < b1 for b1, b2 in zip(self.budgets, self.budgets[1:])):
            raise ValueError("budget schedule must be nondecreasing")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class BoundResult:
    """Outcome of one bound computation.

    ``certificate`` holds one multiplier per row of ``lp`` and is only set
    for infeasible results; ``lp`` is the program it refers to.
    """

    status: str
    lo: Fraction | None = None
    hi: Fraction | None = None
    mode: str = "exact"
    degree: int | None = None
    budget: int | None = None
    witnesses: tuple[AtomVector, AtomVector] | None = None
    certificate: tuple[Fraction, ...] | None = None
    lp: LinearProgram | None = field(default=None, repr=False, compare=False)
    stats: dict = field(default_factory=dict, compare=False)
    timed_out: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    @property
    def interval(self) -> tuple[Fraction, Fraction] | None:
        return (self.lo, self.hi) if self.feasible else None

    def certificate_lines(self) -> list[str]:
        """Rows with nonzero multipliers, as ``multiplier * [row]``."""
        if self.certificate is None or self.lp is None:
            return []
        return [
            f"{y} * [{r.name or 'row'}]"
            for y, r in zip(self.certificate, self.lp.constraints)
            if y
        ]


# --------------------------------------------------------------------------
# Exact mode
# --------------------------------------------------------------------------


def _bound_rows(ind: Sequence, a: Assertion) -> list[Row]:
    """Assertion rows for the linear form ``ind . x``."""
    label = str(a)
    if a.kind == "equal":
        return [Row(tuple(ind), EQ, -a.lower, label)]
    rows = []
    if a.lower is not None:
        rows.append(Row(tuple(ind), GE, -a.lower, label + " (lower)"))
    if a.upper is not None:
        rows.append(Row(tuple(-v for v in ind), GE, a.upper, label + " (upper)"))
    return rows


def exact_program(kb: KnowledgeBase) -> tuple[AtomSpace, list[str], list[Row]]:
    """Variables and rows of the full-atom feasibility system."""
    space = AtomSpace(kb.variables)
    size = space.atom_count
    names = [f"P({space.atom_label(m)})" for m in range(size)]
    rows = []
    for m in range(size):
        c = [0] * size
        c[m] = 1
        rows.append(Row(tuple(c), GE, 0, f"{names[m]} >= 0"))
    rows.append(Row((1,) * size, EQ, -1, "atoms sum to 1"))
    for a in kb.all_assertions():
        ind = [int(b) for b in truth_mask(a.event, space.variables)]
        rows.extend(_bound_rows(ind, a))
    return space, names, rows


def _check_time(start: float, limit: float | None) -> bool:
    return limit is not None and time.perf_counter() - start > limit


def _bound_exact(kb: KnowledgeBase, query: Expr, limit: float | None) -> BoundResult:
    start = time.perf_counter()
    if kb.n > EXACT_THRESHOLD:
        raise ResourceLimitError(
            f"exact mode over {kb.n} variables exceeds the N<={EXACT_THRESHOLD} guard"
        )
    space, names, rows = exact_program(kb)
    obj = tuple(int(b) for b in truth_mask(query, space.variables))
    stats = {"variables": len(names), "rows": len(rows), "inequalities": 0, "pivots": 0}
    lp_min = LinearProgram(tuple(names), tuple(rows), obj, "min")
    low = solve(lp_min)
    stats["pivots"] += low.pivots
    if isinstance(low, Infeasible):
        stats["elapsed"] = time.perf_counter() - start
        return BoundResult(INFEASIBLE, mode="exact", certificate=low.certificate, lp=lp_min, stats=stats)
    lp_max = LinearProgram(tuple(names), tuple(rows), obj, "max")
    high = solve(lp_max)
    stats["pivots"] += high.pivots
    stats["elapsed"] = time.perf_counter() - start
    assert isinstance(low, Optimal) and isinstance(high, Optimal)
    witnesses = (AtomVector(space, low.witness), AtomVector(space, high.witness))
    return BoundResult(
        FEASIBLE,
        low.value,
        high.value,
        mode="exact",
        witnesses=witnesses,
        stats=stats,
        timed_out=_check_time(start, limit),
    )


# --------------------------------------------------------------------------
# Relaxed mode
# --------------------------------------------------------------------------


class _RelaxedModel:
    """Linear forms of events in the degree-``d`` basis.

    A form is a dict mapping LP column keys to coefficients; the key ``()``
    holds the constant. Basis columns are keyed by their term (a sorted index
    tuple); bracket columns by strings ``q<k>``. Events whose indicator has
    degree above ``d`` are replaced by a bracket column constrained by
    clause-level Boole-Frechet rows.
    """

    def __init__(self, variables: Sequence[str], degree: int):
        self.variables = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.degree = min(degree, len(self.variables))
        self.aux: list[str] = []
        self.aux_rows: list[tuple[dict, str, str]] = []
        self.brackets: dict = {}

    def term_label(self, t: Term) -> str:
        return "&".join(self.variables[i] for i in t)

    def _moebius_form(self, expr: Expr) -> dict | None:
        support = sorted({self.index[v] for v in variables_of(expr)})
        if len(support) > MAX_SUPPORT_FOR_MOEBIUS:
            return None
        names = [self.variables[i] for i in support]
        values = [int(b) for b in truth_mask(expr, names)]
        coeffs = subset_moebius(values)
        form: dict = {}
        for m, c in enumerate(coeffs):
            if not c:
                continue
            t = tuple(support[i] for i in range(len(support)) if (m >> i) & 1)
            if len(t) > self.degree:
                return None
            form[t] = Fraction(c)
        return form

    def _new_aux(self, description: str) -> str:
        name = f"q{len(self.aux) + 1}"
        self.aux.append(name)
        self._row({name: 1}, GE, f"{description} >= 0")
        self._row({name: -1, (): 1}, GE, f"{description} <= 1")
        return name

    def _row(self, form: dict, relation: str, name: str) -> None:
        self.aux_rows.append((form, relation, name))

    def _clause_form(self, lits: Sequence[tuple[int, bool]]) -> dict:
        expr = _clause_expr(lits, self.variables)
        form = self._moebius_form(expr)
        if form is not None:
            return form
        key = ("clause", frozenset(lits))
        if key in self.brackets:
            return {self.brackets[key]: 1}
        text = render(expr)
        q = self._new_aux(f"P({text})")
        d = self.degree
        ordered = sorted(lits)
        # a sub-clause implies the clause
        sub = self._moebius_form(_clause_expr(ordered[:d], self.variables))
        self._row(_sub(q, sub), GE, f"P({text}) >= sub-clause")
        # union bound over chunks of at most d literals
        chunks = [ordered[i : i + d] for i in range(0, len(ordered), d)]
        total: dict = {}
        for ch in chunks:
            _accumulate(total, self._moebius_form(_clause_expr(ch, self.variables)), 1)
        self._row(_sub_from(total, q), GE, f"P({text}) <= union bound")
        self.brackets[key] = q
        return {q: 1}

    def event_form(self, expr: Expr, cnf: CnfFormula | None = None) -> dict:
        form = self._moebius_form(expr)
        if form is not None:
            return form
        key = ("event", expr)
        if key in self.brackets:
            return {self.brackets[key]: 1}
        if cnf is None:
            cnf = to_cnf(expr, CnfMode.EQUIVALENT, self.variables)
        text = render(expr)
        clauses = [sorted(c) for c in cnf.clauses]
        if not clauses:
            return {(): Fraction(1)}
        if any(not c for c in clauses):
            return {}
        q = self._new_aux(f"P({text})")
        forms = [self._clause_form(c) for c in clauses]
        total: dict = {}
        for k, f in enumerate(forms):
            self._row(_sub_from(f, q), GE, f"P({text}) <= clause {k + 1}")
            _accumulate(total, f, 1)
        # P(E) >= sum P(c_i) - (m - 1)
        lower = {q: Fraction(1)}
        _accumulate(lower, total, -1)
        lower[()] = lower.get((), 0) + len(clauses) - 1
        self._row(lower, GE, f"P({text}) >= clause sum - {len(clauses) - 1}")
        self.brackets[key] = q
        return {q: 1}


def _clause_expr(lits: Sequence[tuple[int, bool]], variables: Sequence[str]) -> Expr:
    parts = [Var(variables[i]) if pos else Not(Var(variables[i])) for i, pos in lits]
    return parts[0] if len(parts) == 1 else Or(*parts)


def _accumulate(total: dict, form: dict, scale) -> None:
    for k, v in form.items():
        total[k] = total.get(k, 0) + scale * v
        if not total[k]:
            del total[k]


def _sub(q: str, form: dict) -> dict:
    """``q - form``."""
    out = {q: Fraction(1)}
    _accumulate(out, form, -1)
    return out


def _sub_from(form: dict, q: str) -> dict:
    """``form - q``."""
    out = dict(form)
    _accumulate(out, {q: 1}, -1)
    return out


class _RelaxedProblem:
    """Fixed rows for one (kb, query, degree); family rows are added per budget."""

    def __init__(self, kb: KnowledgeBase, query: Expr, degree: int):
        self.kb = kb
        self.model = _RelaxedModel(kb.variables, degree)
        m = self.model
        self.terms = [
            t
            for k in range(1, m.degree + 1)
            for t in combinations(range(len(m.variables)), k)
        ]
        self.assertion_forms = [(a, m.event_form(a.event)) for a in kb.all_assertions()]
        self.query_form = m.event_form(query)
        self.columns = list(self.terms) + list(m.aux)
        self.col_index = {c: j for j, c in enumerate(self.columns)}
        self.names = [f"P({m.term_label(t)})" for t in self.terms] + list(m.aux)
        self._family = iter_family(len(m.variables), m.degree, m.variables)
        self.family: list = []

    def _dense(self, form: dict) -> tuple[tuple[Fraction, ...], Fraction]:
        c = [Fraction(0)] * len(self.columns)
        for k, v in form.items():
            if k != ():
                c[self.col_index[k]] += v
        return tuple(c), Fraction(form.get((), 0))

    def family_prefix(self, budget: int) -> list:
        while len(self.family) < budget:
            nxt = next(self._family, None)
            if nxt is None:
                break
            self.family.append(nxt)
        return self.family[:budget]

    def rows(self, budget: int) -> list[Row]:
        out = []
        for form, rel, name in self.model.aux_rows:
            c, k = self._dense(form)
            out.append(Row(c, rel, k, name))
        for a, form in self.assertion_forms:
            c, k = self._dense(form)
            if a.kind == "equal":
                out.append(Row(c, EQ, k - a.lower, str(a)))
                continue
            if a.lower is not None:
                out.append(Row(c, GE, k - a.lower, f"{a} (lower)"))
            if a.upper is not None:
                out.append(Row(tuple(-v for v in c), GE, a.upper - k, f"{a} (upper)"))
        for ineq in self.family_prefix(budget):
            form = {t: v for t, v in ineq.items() if t}
            form[()] = ineq.constant
            c, k = self._dense(form)
            out.append(Row(c, GE, k, ineq.text()))
        return out


def _solve_relaxed(problem: _RelaxedProblem, budget: int, start: float, limit) -> BoundResult:
    rows = problem.rows(budget)
    obj, const = problem._dense(problem.query_form)
    stats = {
        "variables": len(problem.columns),
        "rows": len(rows),
        "inequalities": len(problem.family_prefix(budget)),
        "pivots": 0,
    }
    common = dict(mode="relaxed", degree=problem.model.degree, budget=budget)
    ends = []
    for direction in ("min", "max"):
        lp = LinearProgram(tuple(problem.names), tuple(rows), obj, direction)
        out = solve(lp)
        stats["pivots"] += out.pivots
        if isinstance(out, Infeasible):
            stats["elapsed"] = time.perf_counter() - start
            return BoundResult(INFEASIBLE, certificate=out.certificate, lp=lp, stats=stats, **common)
        if isinstance(out, Unbounded):
            ends.append(Fraction(0) if direction == "min" else Fraction(1))
        else:
            ends.append(min(max(out.value + const, Fraction(0)), Fraction(1)))
    stats["elapsed"] = time.perf_counter() - start
    return BoundResult(
        FEASIBLE, ends[0], ends[1], stats=stats, timed_out=_check_time(start, limit), **common
    )


# --------------------------------------------------------------------------
# Public entry points
# --------------------------------------------------------------------------


def uses_exact(kb: KnowledgeBase, cfg: RefinementConfig) -> bool:
    """Whether ``bound`` will run in exact mode for this base and config."""
    if cfg.mode == "exact":
        return True
    if cfg.mode == "relaxed":
        return False
    return kb.n <= EXACT_THRESHOLD


def _encode_wide(kb: KnowledgeBase, query: Expr) -> tuple[KnowledgeBase, Expr]:
    """Replace events too wide for equivalent CNF by definitional encodings.

    Each such event becomes the conjunction of its root clauses over fresh
    auxiliary variables, and the definitional clauses enter the base with
    probability one, so the event's probability is unchanged.
    """

    def encode(base: KnowledgeBase, expr: Expr) -> tuple[KnowledgeBase, Expr]:
        if len(variables_of(expr)) <= MAX_EQUIVALENT_VARIABLES:
            return base, expr
        cnf, wider = base.cnf_of(expr)
        if not cnf.aux_defs:
            return base, expr
        roots = cnf.root_clauses()
        return wider, conj(*(cnf.clause_expr(c) for c in roots))

    assertions = []
    for a in kb.assertions:
        kb, event = encode(kb, a.event)
        assertions.append(Assertion(event, a.lower, a.upper))
    kb, query = encode(kb, query)
    return KnowledgeBase(kb.variables, tuple(assertions), kb.definitional_units), query


def refine(
    kb: KnowledgeBase,
    query: Expr,
    cfg: RefinementConfig | None = None,
    exact: tuple[Fraction, Fraction] | None = None,
    early_stop: bool = True,
) -> Iterator[BoundResult]:
    """Relaxed bounds for each budget in the schedule.

    Intervals never widen along the stream because each budget's family rows
    extend the previous prefix. The stream stops early on infeasibility, on
    reaching the exact interval (passed as ``exact``, or computed when the
    base has at most ``ORACLE_AFFORDABLE`` variables), or when the time
    limit passes; the last result is then flagged ``timed_out``. With
    ``early_stop`` false the whole schedule runs unless infeasible or out of
    time.
    """
    cfg = cfg or RefinementConfig()
    kb.check_declared(query)
    start = time.perf_counter()
    if early_stop and exact is None and kb.n <= ORACLE_AFFORDABLE:
        ref = _bound_exact(kb, query, None)
        exact = ref.interval
    kb, query = _encode_wide(kb, query)
    problem = _RelaxedProblem(kb, query, cfg.degree)
    for budget in cfg.budgets:
        res = _solve_relaxed(problem, budget, start, cfg.time_limit)
        yield res
        if not res.feasible or res.timed_out:
            return
        if early_stop and exact is not None and (res.lo, res.hi) == tuple(exact):
            return


def bound(kb: KnowledgeBase, query: Expr, cfg: RefinementConfig | None = None) -> BoundResult:
    """Sound ``[lo, hi]`` for ``P(query)`` given ``kb``.

    Exact mode returns the tight interval with attaining measures. Relaxed
    mode runs the budget schedule and returns its last (narrowest) result.
    """
    cfg = cfg or RefinementConfig()
    kb.check_declared(query)
    if uses_exact(kb, cfg):
        return _bound_exact(kb, query, cfg.time_limit)
    last = None
    for res in refine(kb, query, cfg):
        last = res
    return last


@dataclass(frozen=True)
class Consistent:
    witness: AtomVector

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Inconsistent:
    certificate: tuple[Fraction, ...]
    lp: LinearProgram = field(repr=False, compare=False)

    def __bool__(self):
        return False

    def certificate_lines(self) -> list[str]:
        return [
            f"{y} * [{r.name or 'row'}]"
            for y, r in zip(self.certificate, self.lp.constraints)
            if y
        ]


def check_consistency(kb: KnowledgeBase) -> Union[Consistent, Inconsistent]:
    """Feasibility of the assertions over the full atom simplex."""
    if kb.n > EXACT_THRESHOLD:
        raise ResourceLimitError(
            f"consistency check over {kb.n} variables exceeds the N<={EXACT_THRESHOLD} guard"
        )
    space, names, rows = exact_program(kb)
    lp = LinearProgram(tuple(names), tuple(rows), (0,) * len(names), "min")
    out = solve(lp)
    if isinstance(out, Infeasible):
        return Inconsistent(out.certificate, lp)
    return Consistent(AtomVector(space, out.witness))
