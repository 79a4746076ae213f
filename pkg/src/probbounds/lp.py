"""Exact rational linear programming.

Two-phase revised simplex with Bland's smallest-index rule. Problems are
given in inequality form (free variables, rows ``a.x + k >= 0`` or ``= 0``);
the solver either works on the primal standard form or, when rows greatly
outnumber variables, on the dual standard form. Every outcome carries a
certificate that :func:`verify_outcome` re-checks with plain arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import ResourceLimitError
from .linear import EQ, GE, Row, as_fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

MAX_LP_VARIABLES = 5000


def _q(x) -> "_Q":
    x = as_fraction(x)
    return _Q(x.numerator, x.denominator)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple[str, ...]
    constraints: tuple[Row, ...]
    objective: tuple[Fraction, ...]
    direction: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective", tuple(as_fraction(c) for c in self.objective))
        if self.direction not in ("min", "max"):
            raise ValueError("direction must be 'min' or 'max'")
        n = len(self.variables)
        if len(self.objective) != n:
            raise ValueError("objective length does not match variable count")
        for r in self.constraints:
            if len(r.coeffs) != n:
                raise ValueError(f"constraint {r.name!r} has wrong length")

    @property
    def sense(self) -> int:
        return 1 if self.direction == "min" else -1

    def objective_value(self, x: Sequence) -> Fraction:
        return sum((c * as_fraction(v) for c, v in zip(self.objective, x) if c), Fraction(0))


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    witness: tuple[Fraction, ...]
    duals: tuple[Fraction, ...] | None = None
    pivots: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Infeasible:
    """Row multipliers (nonnegative on ``>=`` rows) combining to ``0 >= positive``."""

    certificate: tuple[Fraction, ...]
    pivots: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unbounded:
    witness: tuple[Fraction, ...]
    ray: tuple[Fraction, ...]
    pivots: int = field(default=0, compare=False)


LpOutcome = Union[Optimal, Infeasible, Unbounded]


# --------------------------------------------------------------------------
# Standard-form core: min c.x  s.t.  A x = b, x >= 0
# --------------------------------------------------------------------------


@dataclass
class _Core:
    status: str
    x: list = None
    duals: list = None
    farkas: list = None
    ray: list = None
    pivots: int = 0


_INT64_SAFE = 1 << 62


class _Pricer:
    """Exact reduced-cost signs for many columns at once.

    Each column is scaled by the lcm of its denominators so that, with the
    row prices brought to a common denominator, every reduced cost becomes an
    integer expression. numpy int64 is used when magnitudes provably fit,
    otherwise object arrays of Python ints.
    """

    def __init__(self, columns: list[list[tuple[int, "_Q"]]], m: int):
        n = len(columns)
        self.m = m
        scaled = np.zeros((n, m), dtype=object)
        self.scale = []
        for j, col in enumerate(columns):
            lcm = 1
            for _, a in col:
                lcm = math.lcm(lcm, int(a.denominator))
            self.scale.append(lcm)
            for i, a in col:
                scaled[j, i] = int(a * lcm)
        self.obj_matrix = scaled
        self.max_entry = max((abs(v) for v in scaled.flat), default=0)
        self.small = self.max_entry < _INT64_SAFE
        self.int_matrix = scaled.astype(np.int64) if self.small else None

    def costs(self, cost: list) -> tuple[np.ndarray, int]:
        """Scaled costs as integers over one common denominator."""
        scaled = [cost[j] * self.scale[j] for j in range(len(cost))]
        den = 1
        for v in scaled:
            den = math.lcm(den, int(v.denominator))
        ints = np.array([int(v * den) for v in scaled], dtype=object)
        self.cmax = max((abs(int(v)) for v in ints), default=0)
        return ints, den

    def first_negative(self, y: list, cost: tuple[np.ndarray, int], allowed: int) -> int | None:
        if allowed == 0:
            return None
        cint, cden = cost
        den = 1
        for v in y:
            den = math.lcm(den, int(v.denominator))
        Y = [int(v * den) for v in y]
        cmax = self.cmax
        ysum = sum(abs(v) for v in Y)
        fits = (
            self.small
            and cmax * den < _INT64_SAFE
            and self.max_entry * ysum * cden < _INT64_SAFE
        )
        if fits:
            lhs = cint[:allowed].astype(np.int64) * den
            d = lhs - cden * (self.int_matrix[:allowed] @ np.asarray(Y, dtype=np.int64))
        else:
            d = cint[:allowed] * den - cden * self.obj_matrix[:allowed].dot(np.asarray(Y, dtype=object))
        hits = np.flatnonzero(d < 0)
        return int(hits[0]) if len(hits) else None


def _standard_simplex(A: list[list], b: list, c: list) -> _Core:
    """Revised two-phase simplex for ``min c.x, A x = b, x >= 0``.

    The basis inverse is kept explicitly in exact rationals; the entering
    column is the smallest index with negative reduced cost and the leaving
    row breaks ratio ties by smallest basic index.
    """
    m, n = len(A), len(c)
    sign = [1] * m
    rhs = []
    for i in range(m):
        if b[i] < 0:
            sign[i] = -1
        rhs.append(sign[i] * b[i])
    columns: list[list[tuple[int, _Q]]] = [[] for _ in range(n)]
    for i in range(m):
        row = A[i]
        for j in range(n):
            if row[j]:
                columns[j].append((i, sign[i] * row[j]))
    pricer = _Pricer(columns, m)
    zero, one = _Q(0), _Q(1)
    binv = [[one if k == i else zero for k in range(m)] for i in range(m)]
    basis = [n + i for i in range(m)]
    xb = list(rhs)
    pivots = 0

    def column(j: int) -> list:
        if j >= n:
            return [row[j - n] for row in binv]
        u = [zero] * m
        for k, a in columns[j]:
            for i in range(m):
                v = binv[i][k]
                if v:
                    u[i] += v * a
        return u

    def prices(cost_of) -> list:
        y = [zero] * m
        for i in range(m):
            cb = cost_of(basis[i])
            if cb:
                row = binv[i]
                for k in range(m):
                    if row[k]:
                        y[k] += cb * row[k]
        return y

    def pivot(r: int, j: int, u: list) -> None:
        nonlocal pivots
        pivots += 1
        p = u[r]
        prow = [v / p for v in binv[r]]
        binv[r] = prow
        theta = xb[r] / p
        xb[r] = theta
        nz = [k for k in range(m) if prow[k]]
        for i in range(m):
            f = u[i]
            if i != r and f:
                row = binv[i]
                for k in nz:
                    row[k] -= f * prow[k]
                xb[i] -= f * theta
        basis[r] = j

    def run(cost: list, cost_of) -> int | None:
        """Iterate to optimality; return an unbounded column or None."""
        scaled = pricer.costs(cost)
        while True:
            y = prices(cost_of)
            j = pricer.first_negative(y, scaled, n)
            if j is None:
                return None
            u = column(j)
            best = None
            for i in range(m):
                if u[i] > 0:
                    key = (xb[i] / u[i], basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return j
            pivot(best[1], j, u)

    # phase 1: artificial columns n..n+m-1 with unit cost
    zeros = [zero] * n
    run(zeros, lambda k: one if k >= n else zero)
    y1 = prices(lambda k: one if k >= n else zero)
    if sum((yi * bi for yi, bi in zip(y1, rhs)), zero) > 0:
        farkas = [sign[i] * y1[i] for i in range(m)]
        return _Core("infeasible", farkas=farkas, pivots=pivots)
    for i in range(m):
        if basis[i] >= n:
            row = binv[i]
            for j in range(n):
                if sum((row[k] * a for k, a in columns[j]), zero) != 0:
                    pivot(i, j, column(j))
                    break

    # phase 2
    j = run(list(c), lambda k: c[k] if k < n else zero)
    x = [zero] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = xb[i]
    if j is not None:
        u = column(j)
        ray = [zero] * n
        ray[j] = one
        for i in range(m):
            if basis[i] < n:
                ray[basis[i]] = -u[i]
        return _Core("unbounded", x=x, ray=ray, pivots=pivots)
    y = prices(lambda k: c[k] if k < n else zero)
    duals = [sign[i] * y[i] for i in range(m)]
    return _Core("optimal", x=x, duals=duals, pivots=pivots)


# --------------------------------------------------------------------------
# Routes from inequality form to standard form
# --------------------------------------------------------------------------


def _bound_rows(lp: LinearProgram) -> dict[int, int]:
    """Map variable index -> index of a row stating just ``x_j >= 0``."""
    found: dict[int, int] = {}
    for r, row in enumerate(lp.constraints):
        if row.relation != GE or row.constant != 0:
            continue
        nz = row.support
        if len(nz) == 1 and row.coeffs[nz[0]] > 0 and nz[0] not in found:
            found[nz[0]] = r
    return found


def _solve_primal(lp: LinearProgram) -> LpOutcome:
    n = len(lp.variables)
    s = lp.sense
    bounds = _bound_rows(lp)
    bound_row_ids = set(bounds.values())
    general = [r for r in range(len(lp.constraints)) if r not in bound_row_ids]

    # column layout: per variable one (nonneg) or two (free) columns, then slacks
    cols: list[tuple[int, int]] = []  # (variable, +1/-1)
    var_cols: list[list[int]] = []
    for j in range(n):
        here = [len(cols)]
        cols.append((j, 1))
        if j not in bounds:
            here.append(len(cols))
            cols.append((j, -1))
        var_cols.append(here)
    n_struct = len(cols)
    slack_of: dict[int, int] = {}
    for r in general:
        if lp.constraints[r].relation == GE:
            slack_of[r] = n_struct + len(slack_of)
    width = n_struct + len(slack_of)

    A, b = [], []
    for r in general:
        row = lp.constraints[r]
        vec = [_Q(0)] * width
        for k, (j, sg) in enumerate(cols):
            if row.coeffs[j]:
                vec[k] = sg * _q(row.coeffs[j])
        if r in slack_of:
            vec[slack_of[r]] = _Q(-1)
        A.append(vec)
        b.append(-_q(row.constant))
    cost = [_Q(0)] * width
    for k, (j, sg) in enumerate(cols):
        cost[k] = sg * s * _q(lp.objective[j])

    core = _standard_simplex(A, b, cost)

    def to_x(u):
        x = [_Q(0)] * n
        for k, (j, sg) in enumerate(cols):
            if u[k]:
                x[j] += sg * u[k]
        return tuple(_frac(v) for v in x)

    if core.status == "infeasible":
        cert = [Fraction(0)] * len(lp.constraints)
        for i, r in enumerate(general):
            cert[r] = _frac(core.farkas[i])
        for j, r in bounds.items():
            slope = sum((cert[g] * lp.constraints[g].coeffs[j] for g in general), Fraction(0))
            cert[r] = -slope
        return Infeasible(tuple(cert), core.pivots)
    if core.status == "unbounded":
        return Unbounded(to_x(core.x), to_x(core.ray), core.pivots)

    x = to_x(core.x)
    duals = [Fraction(0)] * len(lp.constraints)
    for i, r in enumerate(general):
        duals[r] = _frac(core.duals[i])
    for j, r in bounds.items():
        k = var_cols[j][0]
        reduced = cost[k] - sum((core.duals[i] * A[i][k] for i in range(len(general))), _Q(0))
        duals[r] = _frac(reduced)
    return Optimal(lp.objective_value(x), x, tuple(duals), core.pivots)


def _dual_core(lp: LinearProgram, objective: Sequence) -> tuple[_Core, list[tuple[int, int]]]:
    """Solve ``min sum y_r k_r  s.t.  sum y_r a_r = objective, y >= 0 on >= rows``."""
    n = len(lp.variables)
    cols: list[tuple[int, int]] = []
    for r, row in enumerate(lp.constraints):
        cols.append((r, 1))
        if row.relation == EQ:
            cols.append((r, -1))
    A = [[_Q(0)] * len(cols) for _ in range(n)]
    cost = [_Q(0)] * len(cols)
    for k, (r, sg) in enumerate(cols):
        row = lp.constraints[r]
        for j, a in enumerate(row.coeffs):
            if a:
                A[j][k] = sg * _q(a)
        cost[k] = sg * _q(row.constant)
    b = [_q(v) for v in objective]
    return _standard_simplex(A, b, cost), cols


def _combine(cols, values, size) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * size
    for (r, sg), v in zip(cols, values):
        if v:
            out[r] += sg * _frac(v)
    return tuple(out)


def _solve_dual(lp: LinearProgram) -> LpOutcome:
    n = len(lp.variables)
    m = len(lp.constraints)
    s = lp.sense
    cmin = [s * c for c in lp.objective]
    core, cols = _dual_core(lp, cmin)
    if core.status == "unbounded":
        return Infeasible(_combine(cols, core.ray, m), core.pivots)
    if core.status == "optimal":
        x = tuple(-_frac(w) for w in core.duals)
        duals = _combine(cols, core.x, m)
        return Optimal(lp.objective_value(x), x, duals, core.pivots)
    # dual infeasible: the primal is unbounded or infeasible
    ray = tuple(-_frac(u) for u in core.farkas)
    feas, fcols = _dual_core(lp, [0] * n)
    pivots = core.pivots + feas.pivots
    if feas.status == "unbounded":
        return Infeasible(_combine(fcols, feas.ray, m), pivots)
    witness = tuple(-_frac(w) for w in feas.duals)
    return Unbounded(witness, ray, pivots)


def solve(lp: LinearProgram, method: str = "auto") -> LpOutcome:
    """Exact optimum, infeasibility certificate, or unbounded ray.

    ``method`` picks the tableau: ``"primal"``, ``"dual"`` or ``"auto"``
    (dual when constraint rows outnumber twice the variables).
    """
    if len(lp.variables) > MAX_LP_VARIABLES:
        raise ResourceLimitError(
            f"LP with {len(lp.variables)} variables exceeds the {MAX_LP_VARIABLES}-variable guard"
        )
    if method == "auto":
        general = len(lp.constraints) - len(_bound_rows(lp))
        method = "dual" if general > 2 * len(lp.variables) else "primal"
    if method == "primal":
        out = _solve_primal(lp)
    elif method == "dual":
        out = _solve_dual(lp)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not verify_outcome(lp, out):
        raise AssertionError(f"internal error: {type(out).__name__} failed verification")
    return out


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------


def _feasible(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    return len(x) == len(lp.variables) and all(r.satisfied_by(x) for r in lp.constraints)


def _combination(rows: Sequence[Row], y: Sequence[Fraction], n: int) -> list[Fraction]:
    """``sum_r y_r a_r`` as a dense vector."""
    out = [Fraction(0)] * n
    for v, r in zip(y, rows):
        if v:
            c = r.coeffs
            for j in r.support:
                out[j] += v * c[j]
    return out


def verify_outcome(lp: LinearProgram, out: LpOutcome) -> bool:
    """Re-check an outcome's certificate with exact arithmetic, no pivoting."""
    n = len(lp.variables)
    rows = lp.constraints
    s = lp.sense
    if isinstance(out, Optimal):
        x = tuple(as_fraction(v) for v in out.witness)
        if not _feasible(lp, x) or lp.objective_value(x) != out.value:
            return False
        if out.duals is None:
            return True
        y = tuple(as_fraction(v) for v in out.duals)
        if len(y) != len(rows):
            return False
        if any(v < 0 for v, r in zip(y, rows) if r.relation == GE):
            return False
        if _combination(rows, y, n) != [s * c for c in lp.objective]:
            return False
        return -s * sum((v * r.constant for v, r in zip(y, rows)), Fraction(0)) == out.value
    if isinstance(out, Infeasible):
        y = tuple(as_fraction(v) for v in out.certificate)
        if len(y) != len(rows):
            return False
        if any(v < 0 for v, r in zip(y, rows) if r.relation == GE):
            return False
        if any(_combination(rows, y, n)):
            return False
        return sum((v * r.constant for v, r in zip(y, rows)), Fraction(0)) < 0
    if isinstance(out, Unbounded):
        x = tuple(as_fraction(v) for v in out.witness)
        d = tuple(as_fraction(v) for v in out.ray)
        if not _feasible(lp, x) or len(d) != n:
            return False
        for r in rows:
            slope = sum((c * v for c, v in zip(r.coeffs, d) if c), Fraction(0))
            if slope < 0 or (r.relation == EQ and slope != 0):
                return False
        return s * lp.objective_value(d) < 0
    return False
