"""Exact projection of the partition simplex by Fourier-Motzkin elimination.

This is the small-N ground truth: it never calls the simplex solver unless a
system grows past the pruning threshold, so it doubles as an independent
check on the LP-based engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Mapping, Sequence, Union

from .algebra import MonotoneBasis, Term, canonical_terms, term_mask
from .atoms import AtomSpace, AtomVector
from .errors import InfeasibleSystemError, ResourceLimitError
from .formula import CnfFormula, Expr, Var, cnf_truth_mask, conj, truth_mask
from .inequalities import LinearInequality
from .kb import KnowledgeBase
from .linear import EQ, GE, LinearSystem, Row

MAX_ROWS = 50_000
LP_PRUNE_THRESHOLD = 400
MAX_FACET_VARIABLES = 4
MAX_ORACLE_VARIABLES = 10


# --------------------------------------------------------------------------
# Atom systems
# --------------------------------------------------------------------------


def atom_variable(space: AtomSpace, m: int) -> str:
    return f"P({space.atom_label(m)})"


def _event_mask(event, space: AtomSpace):
    if isinstance(event, CnfFormula):
        return cnf_truth_mask(event, space.variables)
    return truth_mask(event, space.variables)


def build_atom_system(space: AtomSpace, targets: Sequence[tuple[object, str]]) -> LinearSystem:
    """Atom nonnegativity, sum-to-one, and one defining equality per target.

    Variables are the 2^N atom probabilities followed by the target names.
    Each target row states ``target - sum of its atoms = 0``.
    """
    size = space.atom_count
    names = [atom_variable(space, m) for m in range(size)] + [name for _, name in targets]
    if len(set(names)) != len(names):
        raise ValueError("target names collide with atom variable names")
    width = len(names)
    rows = []
    for m in range(size):
        c = [0] * width
        c[m] = 1
        rows.append(Row(tuple(c), GE, 0, f"{names[m]} >= 0"))
    rows.append(Row(tuple([1] * size + [0] * len(targets)), EQ, -1, "sum = 1"))
    for k, (event, name) in enumerate(targets):
        mask = _event_mask(event, space)
        c = [-int(b) for b in mask] + [0] * len(targets)
        c[size + k] = 1
        rows.append(Row(tuple(c), EQ, 0, f"{name} defined"))
    return LinearSystem(tuple(names), tuple(rows))


# --------------------------------------------------------------------------
# Fourier-Motzkin with integer rows
# --------------------------------------------------------------------------


@dataclass
class _IRow:
    coeffs: dict  # variable index -> nonzero int
    const: int
    eq: bool
    hist: frozenset = frozenset()

    def key(self):
        return (self.eq, tuple(sorted(self.coeffs.items())))


def _primitive(coeffs: dict, const: int, eq: bool, hist: frozenset) -> _IRow:
    coeffs = {j: c for j, c in coeffs.items() if c}
    g = reduce(math.gcd, (abs(c) for c in coeffs.values()), abs(const))
    if g > 1:
        coeffs = {j: c // g for j, c in coeffs.items()}
        const //= g
    if eq:
        lead = coeffs[min(coeffs)] if coeffs else const
        if lead < 0:
            coeffs = {j: -c for j, c in coeffs.items()}
            const = -const
    return _IRow(coeffs, const, eq, hist)


def _from_row(row: Row, idx: int) -> _IRow:
    lcm = reduce(math.lcm, (c.denominator for c in (*row.coeffs, row.constant)), 1)
    coeffs = {j: int(c * lcm) for j, c in enumerate(row.coeffs) if c}
    hist = frozenset() if row.is_equality else frozenset({idx})
    return _primitive(coeffs, int(row.constant * lcm), row.is_equality, hist)


@dataclass
class _Step:
    var: int
    kind: str  # "eq" or "fm"
    rows: list  # the equality used, or the rows bounding the variable


class _Eliminator:
    def __init__(self, system: LinearSystem):
        self.names = system.variables
        self.rows: list[_IRow] = []
        for i, r in enumerate(system.rows):
            self._add(self.rows, _from_row(r, i))
        self.rows = self._clean(self.rows)
        self.live = set(range(len(self.names)))
        self.fm_steps = 0
        self.chernikov = True
        self.trail: list[_Step] = []

    @staticmethod
    def _add(out: list, row: _IRow) -> None:
        if not row.coeffs:
            if (row.eq and row.const != 0) or row.const < 0:
                raise InfeasibleSystemError("contradictory constant row derived", row)
            return
        out.append(row)

    def _clean(self, rows: list[_IRow]) -> list[_IRow]:
        """Drop duplicates and parallel rows dominated by a tighter one."""
        best: dict = {}
        for r in rows:
            k = r.key()
            cur = best.get(k)
            if cur is None:
                best[k] = r
            elif r.eq:
                if r.const != cur.const:
                    raise InfeasibleSystemError("parallel equalities disagree", r)
            elif r.const < cur.const or (r.const == cur.const and len(r.hist) < len(cur.hist)):
                best[k] = r
        # an equality makes parallel inequalities either redundant or contradictory
        out = []
        for k, r in best.items():
            if not r.eq:
                e = best.get((True, k[1]))
                if e is not None:
                    if r.const < e.const:
                        raise InfeasibleSystemError("inequality contradicts equality", r)
                    continue
                neg = best.get((True, tuple((j, -c) for j, c in k[1])))
                if neg is not None:
                    if r.const < -neg.const:
                        raise InfeasibleSystemError("inequality contradicts equality", r)
                    continue
            out.append(r)
        if len(out) > MAX_ROWS:
            raise ResourceLimitError(f"elimination exceeded {MAX_ROWS} rows")
        return out

    def _substitute(self, v: int, e: _IRow) -> None:
        ev = e.coeffs[v]
        out = []
        for r in self.rows:
            if r is e:
                continue
            rv = r.coeffs.get(v, 0)
            if not rv:
                out.append(r)
                continue
            scale, sub = abs(ev), rv * (1 if ev > 0 else -1)
            coeffs = {j: scale * c for j, c in r.coeffs.items()}
            for j, c in e.coeffs.items():
                coeffs[j] = coeffs.get(j, 0) - sub * c
            self._add(out, _primitive(coeffs, scale * r.const - sub * e.const, r.eq, r.hist))
        self.trail.append(_Step(v, "eq", [e]))
        self.rows = self._clean(out)
        if self.fm_steps:
            self.chernikov = False
        self.live.discard(v)

    def _combine(self, v: int) -> None:
        pos = [r for r in self.rows if r.coeffs.get(v, 0) > 0]
        neg = [r for r in self.rows if r.coeffs.get(v, 0) < 0]
        out = [r for r in self.rows if v not in r.coeffs]
        self.fm_steps += 1
        limit = self.fm_steps + 1
        for p in pos:
            pv = p.coeffs[v]
            for q in neg:
                hist = p.hist | q.hist
                if self.chernikov and len(hist) > limit:
                    continue
                qv = -q.coeffs[v]
                coeffs = {j: qv * c for j, c in p.coeffs.items()}
                for j, c in q.coeffs.items():
                    coeffs[j] = coeffs.get(j, 0) + pv * c
                coeffs.pop(v, None)
                self._add(out, _primitive(coeffs, qv * p.const + pv * q.const, False, hist))
                if len(out) > MAX_ROWS:
                    raise ResourceLimitError(f"elimination exceeded {MAX_ROWS} rows")
        self.trail.append(_Step(v, "fm", pos + neg))
        self.rows = self._clean(out)
        if len(self.rows) > LP_PRUNE_THRESHOLD:
            self.rows = _lp_prune(self.rows, self.names)
        self.live.discard(v)

    def eliminate(self, v: int) -> None:
        eqs = [r for r in self.rows if r.eq and v in r.coeffs]
        if eqs:
            self._substitute(v, min(eqs, key=lambda r: (len(r.coeffs), r.key())))
        else:
            self._combine(v)

    def eliminate_all(self, targets: Sequence[int]) -> None:
        todo = set(targets)
        while todo:
            eq_choices = [
                (len(r.coeffs), v, r)
                for r in self.rows
                if r.eq
                for v in r.coeffs
                if v in todo
            ]
            if eq_choices:
                _, v, r = min(eq_choices, key=lambda t: (t[0], t[1]))
                self._substitute(v, r)
            else:
                def cost(v):
                    p = sum(1 for r in self.rows if r.coeffs.get(v, 0) > 0)
                    n = sum(1 for r in self.rows if r.coeffs.get(v, 0) < 0)
                    return (p * n - p - n, v)

                v = min(todo, key=cost)
                self._combine(v)
            todo.discard(v)

    def system(self) -> LinearSystem:
        keep = sorted(self.live)
        pos = {j: k for k, j in enumerate(keep)}
        rows = []
        for r in self.rows:
            c = [Fraction(0)] * len(keep)
            for j, v in r.coeffs.items():
                c[pos[j]] = Fraction(v)
            rows.append(Row(tuple(c), EQ if r.eq else GE, Fraction(r.const)))
        return LinearSystem(tuple(self.names[j] for j in keep), tuple(rows))


def _lp_prune(rows: list[_IRow], names: Sequence[str]) -> list[_IRow]:
    """Remove inequalities implied by the others (one LP per row)."""
    from .lp import LinearProgram, Optimal, solve

    used = sorted({j for r in rows for j in r.coeffs})
    pos = {j: k for k, j in enumerate(used)}

    def to_row(r: _IRow) -> Row:
        c = [0] * len(used)
        for j, v in r.coeffs.items():
            c[pos[j]] = v
        return Row(tuple(c), EQ if r.eq else GE, r.const)

    kept = list(rows)
    i = 0
    while i < len(kept):
        r = kept[i]
        if r.eq:
            i += 1
            continue
        others = [to_row(o) for k, o in enumerate(kept) if k != i]
        target = to_row(r)
        out = solve(LinearProgram(tuple(names[j] for j in used), others, target.coeffs, "min"))
        if isinstance(out, Optimal) and out.value + target.constant >= 0:
            kept.pop(i)
        else:
            i += 1
    return kept


@dataclass
class Projection:
    """Result of eliminating variables, with the trail needed to lift points."""

    system: LinearSystem
    original: LinearSystem
    trail: list = field(repr=False, default_factory=list)

    def lift(self, values: Mapping[str, object]) -> dict[str, Fraction]:
        """Extend a point of the projected system to a point of the original.

        Eliminated variables are recovered in reverse order; each takes the
        smallest value its bounding rows allow (or the value forced by an
        equality).
        """
        names = self.original.variables
        index = {v: i for i, v in enumerate(names)}
        x: dict[int, Fraction] = {index[k]: Fraction(v) for k, v in values.items()}
        for step in reversed(self.trail):
            v = step.var
            if step.kind == "eq":
                (e,) = step.rows
                rest = sum((c * x[j] for j, c in e.coeffs.items() if j != v), Fraction(e.const))
                x[v] = -rest / e.coeffs[v]
                continue
            lo, hi = None, None
            for r in step.rows:
                rest = sum((c * x[j] for j, c in r.coeffs.items() if j != v), Fraction(r.const))
                bound = -rest / r.coeffs[v]
                if r.coeffs[v] > 0:
                    lo = bound if lo is None else max(lo, bound)
                else:
                    hi = bound if hi is None else min(hi, bound)
            if lo is not None and hi is not None and lo > hi:
                raise ValueError("point is not in the projection")
            x[v] = lo if lo is not None else (hi if hi is not None else Fraction(0))
        return {names[j]: x.get(j, Fraction(0)) for j in range(len(names))}


def fm_eliminate(system: LinearSystem, var: str) -> LinearSystem:
    """Project out one variable: substitution through an equality when one
    contains it, otherwise Fourier-Motzkin pairing of its bounds."""
    elim = _Eliminator(system)
    elim.eliminate(system.index(var))
    return elim.system()


def project(system: LinearSystem, keep: Sequence[str]) -> Projection:
    """Eliminate every variable not in ``keep``.

    Raises :class:`InfeasibleSystemError` if a contradiction is derived.
    """
    keep_set = set(keep)
    elim = _Eliminator(system)
    elim.eliminate_all([j for j, v in enumerate(system.variables) if v not in keep_set])
    return Projection(elim.system(), system, elim.trail)


# --------------------------------------------------------------------------
# Facet enumeration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FacetList:
    basis: MonotoneBasis
    facets: tuple[LinearInequality, ...]

    def __len__(self):
        return len(self.facets)

    def __iter__(self):
        return iter(self.facets)

    def header(self) -> str:
        return f"N={self.basis.space.n} degree={self.basis.max_degree} count={len(self.facets)}"

    def lines(self) -> list[str]:
        return [self.header()] + [f.text() for f in self.facets]


def _rank(vectors: list[list[int]]) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    rank, col = 0, 0
    width = len(rows[0]) if rows else 0
    while rank < len(rows) and col < width:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / p[col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], p)]
        rank += 1
        col += 1
    return rank


def is_facet(ineq: LinearInequality, basis: MonotoneBasis) -> bool:
    """Tight projected vertices span a hyperplane of the projected polytope.

    The projection of the simplex is the convex hull of the projected point
    masses and is full-dimensional in the basis coordinates, so a valid
    inequality is a facet iff its tight points have affine rank ``dim``.
    """
    terms = [t for t in basis.terms if t]
    points = []
    for m in range(basis.space.atom_count):
        if ineq.value_at_atom(m) == 0:
            points.append([1] + [int(term_mask(t) & m == term_mask(t)) for t in terms])
    return bool(points) and _rank(points) == len(terms)


def _canonical_sort_key(ineq: LinearInequality, terms: Sequence[Term]):
    return (ineq.degree, tuple(ineq.coefficient(t) for t in terms))


def enumerate_facets(n: int, degree: int) -> FacetList:
    """All facets of the simplex projected onto the degree-``degree`` basis."""
    if n > MAX_FACET_VARIABLES:
        raise ResourceLimitError(f"facet enumeration for N={n} exceeds the N<={MAX_FACET_VARIABLES} guard")
    if not 1 <= degree <= n:
        raise ValueError("need 1 <= degree <= N")
    space = AtomSpace.of_size(n)
    basis = MonotoneBasis(space, degree)
    terms = [t for t in basis.terms if t]
    targets = [
        (conj(*(Var(space.variables[i]) for i in t)), basis.term_label(t)) for t in terms
    ]
    system = build_atom_system(space, targets)
    proj = project(system, [name for _, name in targets])
    col_term = {name: t for t, (_, name) in zip(terms, targets)}
    found: dict = {}
    for row in proj.system.rows:
        if row.is_equality:
            raise AssertionError("projection unexpectedly lost full dimension")
        coeffs = {(): row.constant}
        for name, c in zip(proj.system.variables, row.coeffs):
            if c:
                coeffs[col_term[name]] = c
        ineq = LinearInequality(space.variables, coeffs).normalized()
        if is_facet(ineq, basis):
            found.setdefault(ineq, None)
    facets = sorted(found, key=lambda f: _canonical_sort_key(f, basis.terms))
    return FacetList(basis, tuple(facets))


# --------------------------------------------------------------------------
# Ground-truth bounds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleInterval:
    lo: Fraction
    hi: Fraction
    witness_lo: AtomVector
    witness_hi: AtomVector


@dataclass(frozen=True)
class OracleInfeasible:
    reason: str


def _assertion_rows(space: AtomSpace, kb: KnowledgeBase, width: int) -> list[Row]:
    rows = []
    size = space.atom_count
    for a in kb.all_assertions():
        mask = truth_mask(a.event, space.variables)
        ind = [int(b) for b in mask] + [0] * (width - size)
        if a.kind == "equal":
            rows.append(Row(tuple(ind), EQ, -a.lower, str(a)))
            continue
        if a.lower is not None:
            rows.append(Row(tuple(ind), GE, -a.lower, f"{a} (lower)"))
        if a.upper is not None:
            rows.append(Row(tuple(-v for v in ind), GE, a.upper, f"{a} (upper)"))
    return rows


def oracle_bounds(kb: KnowledgeBase, query) -> Union[OracleInterval, OracleInfeasible]:
    """Exact ``[min, max]`` of the query probability by elimination.

    ``query`` is an expression or CNF over ``kb.variables``. Endpoint
    witnesses are full atom measures recovered by back-substitution.
    """
    if kb.n > MAX_ORACLE_VARIABLES:
        raise ResourceLimitError(f"oracle over {kb.n} variables exceeds the N<={MAX_ORACLE_VARIABLES} guard")
    space = AtomSpace(kb.variables)
    qname = "Q"
    base = build_atom_system(space, [(query, qname)])
    width = len(base.variables)
    system = LinearSystem(base.variables, base.rows + tuple(_assertion_rows(space, kb, width)))
    try:
        proj = project(system, [qname])
    except InfeasibleSystemError as exc:
        return OracleInfeasible(str(exc))
    lo = hi = None
    for row in proj.system.rows:
        (a,) = row.coeffs
        bound = -row.constant / a
        if row.is_equality or a > 0:
            lo = bound if lo is None else max(lo, bound)
        if row.is_equality or a < 0:
            hi = bound if hi is None else min(hi, bound)
    if lo is None or hi is None:
        raise AssertionError("query probability left unbounded by elimination")
    if lo > hi:
        return OracleInfeasible(f"bounds cross: {lo} > {hi}")

    def witness(q: Fraction) -> AtomVector:
        point = proj.lift({qname: q})
        return AtomVector(space, tuple(point[atom_variable(space, m)] for m in range(space.atom_count)))

    return OracleInterval(lo, hi, witness(lo), witness(hi))
