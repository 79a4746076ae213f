"""Clause matrices and the monotone-conjunction coordinate system.

A clause matrix has one row per atom and one column per clause; the column is
the 0/1 indicator of the assignments that *falsify* the clause. Under this
reading a union of literal sets (a wider disjunction) is the pointwise product
of columns, and the empty clause is the all-ones column. Columns are stored as
Python ints used as bitsets over atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .atoms import AtomSpace, AtomVector
from .errors import ResourceLimitError

MAX_MATRIX_VARIABLES = 12

# a clause label is a frozenset of (variable name, polarity)
Label = frozenset


def label_text(label: Label, order: Sequence[str] | None = None) -> str:
    if not label:
        return "{}"
    rank = {v: i for i, v in enumerate(order)} if order is not None else {}
    lits = sorted(label, key=lambda l: (rank.get(l[0], l[0]), not l[1]))
    return "|".join(name if pos else "~" + name for name, pos in lits)


@dataclass(frozen=True)
class ClauseMatrix:
    """0/1 matrix: rows are atoms of ``variables``, columns are clause labels."""

    variables: tuple[str, ...]
    labels: tuple[Label, ...]
    columns: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "labels", tuple(frozenset(l) for l in self.labels))
        object.__setattr__(self, "columns", tuple(self.columns))
        if len(self.labels) != len(self.columns):
            raise ValueError("one label per column required")

    @property
    def n_rows(self) -> int:
        return 1 << len(self.variables)

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def grades(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.labels)

    def column(self, label: Label | Iterable) -> tuple[int, ...]:
        j = self.labels.index(frozenset(label))
        return self.bits(self.columns[j])

    def bits(self, mask: int) -> tuple[int, ...]:
        return tuple((mask >> r) & 1 for r in range(self.n_rows))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_columns), dtype=np.uint8)
        for j, mask in enumerate(self.columns):
            out[:, j] = self.bits(mask)
        return out

    def of_grade(self, grade: int) -> "ClauseMatrix":
        keep = [j for j, l in enumerate(self.labels) if len(l) == grade]
        return ClauseMatrix(
            self.variables,
            tuple(self.labels[j] for j in keep),
            tuple(self.columns[j] for j in keep),
        )

    def dump_lines(self) -> list[str]:
        """``grade label bits`` per column, bits in atom order."""
        return [
            f"{len(l)} {label_text(l, self.variables)} "
            + "".join(str(b) for b in self.bits(mask))
            for l, mask in zip(self.labels, self.columns)
        ]


def _full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def empty_matrix(var: str) -> ClauseMatrix:
    """``E_x``: the single all-ones column, grade 0."""
    return ClauseMatrix((var,), (frozenset(),), (0b11,))


def literal_matrix(var: str) -> ClauseMatrix:
    """``L_x``: columns ``x`` (falsified at F) and ``~x`` (falsified at T)."""
    return ClauseMatrix(
        (var,), (frozenset({(var, True)}), frozenset({(var, False)})), (0b01, 0b10)
    )


def direct_sum(*matrices: ClauseMatrix) -> ClauseMatrix:
    """Concatenate the columns of matrices over the same variables."""
    first = matrices[0]
    for m in matrices[1:]:
        if m.variables != first.variables:
            raise ValueError("direct sum needs identical row spaces")
    return ClauseMatrix(
        first.variables,
        sum((m.labels for m in matrices), ()),
        sum((m.columns for m in matrices), ()),
    )


def base_matrix(var: str) -> ClauseMatrix:
    """The 2x3 matrix with columns ``{}``, ``x``, ``~x`` and rows F, T."""
    return direct_sum(empty_matrix(var), literal_matrix(var))


def graded_tensor(m1: ClauseMatrix, m2: ClauseMatrix) -> ClauseMatrix:
    """Tensor product of clause matrices over disjoint variables.

    Row ``r1 + rows1*r2`` is the joint atom; column ``c1 + cols1*c2`` has
    label ``l1 | l2`` and entries ``m1[r1, c1] * m2[r2, c2]``. Grades add.
    """
    overlap = set(m1.variables) & set(m2.variables)
    if overlap:
        raise ValueError(f"tensor operands share variables {sorted(overlap)}")
    shift = m1.n_rows
    labels, columns = [], []
    for l2, c2 in zip(m2.labels, m2.columns):
        rows2 = [r for r in range(m2.n_rows) if (c2 >> r) & 1]
        for l1, c1 in zip(m1.labels, m1.columns):
            mask = 0
            for r2 in rows2:
                mask |= c1 << (r2 * shift)
            labels.append(l1 | l2)
            columns.append(mask)
    return ClauseMatrix(m1.variables + m2.variables, tuple(labels), tuple(columns))


def _matrix_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def _guard(n: int) -> None:
    if n < 0:
        raise ValueError("N must be nonnegative")
    if n > MAX_MATRIX_VARIABLES:
        raise ResourceLimitError(
            f"clause matrices for N={n} exceed the N<={MAX_MATRIX_VARIABLES} guard"
        )


def clause_matrices_direct(n: int, names: Sequence[str] | None = None) -> list[ClauseMatrix]:
    """``C_{N,0} .. C_{N,N}`` by expanding the N-fold product of ``E + L*t``."""
    _guard(n)
    names = tuple(names) if names is not None else _matrix_names(n)
    total = ClauseMatrix((), (frozenset(),), (1,))
    for v in names:
        total = graded_tensor(total, base_matrix(v))
    return [total.of_grade(i) for i in range(n + 1)]


def clause_matrices_recursive(n: int, names: Sequence[str] | None = None) -> list[ClauseMatrix]:
    """``C_{N,i}`` via the binomial recursion

    ``C_{N,i} = C_{N-1,i} (x) E_N  (+)  C_{N-1,i-1} (x) L_N``.
    """
    _guard(n)
    names = tuple(names) if names is not None else _matrix_names(n)
    layer = [ClauseMatrix((), (frozenset(),), (1,))]
    for k, v in enumerate(names):
        nxt = []
        for i in range(k + 2):
            parts = []
            if i <= k:
                parts.append(graded_tensor(layer[i], empty_matrix(v)))
            if i >= 1:
                parts.append(graded_tensor(layer[i - 1], literal_matrix(v)))
            nxt.append(direct_sum(*parts))
        layer = nxt
    return layer


# --------------------------------------------------------------------------
# Monotone conjunction basis and Moebius transforms
# --------------------------------------------------------------------------


def superset_sums(values: Sequence) -> list:
    """``out[S] = sum(values[T] for T superset of S)`` over bitmask indices."""
    out = list(values)
    n = len(out).bit_length() - 1
    for i in range(n):
        bit = 1 << i
        for m in range(len(out)):
            if not m & bit:
                out[m] += out[m | bit]
    return out


def superset_moebius(values: Sequence) -> list:
    """Inverse of :func:`superset_sums`."""
    out = list(values)
    n = len(out).bit_length() - 1
    for i in range(n):
        bit = 1 << i
        for m in range(len(out)):
            if not m & bit:
                out[m] -= out[m | bit]
    return out


def subset_sums(values: Sequence) -> list:
    """``out[S] = sum(values[T] for T subset of S)``."""
    out = list(values)
    n = len(out).bit_length() - 1
    for i in range(n):
        bit = 1 << i
        for m in range(len(out)):
            if m & bit:
                out[m] += out[m ^ bit]
    return out


def subset_moebius(values: Sequence) -> list:
    """Inverse of :func:`subset_sums`."""
    out = list(values)
    n = len(out).bit_length() - 1
    for i in range(n):
        bit = 1 << i
        for m in range(len(out)):
            if m & bit:
                out[m] -= out[m ^ bit]
    return out


Term = tuple  # sorted tuple of variable indices


def term_mask(term: Term) -> int:
    m = 0
    for i in term:
        m |= 1 << i
    return m


def mask_term(mask: int) -> Term:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def canonical_terms(n: int, max_degree: int) -> tuple[Term, ...]:
    """All subsets of ``range(n)`` of size <= max_degree, by (size, lex)."""
    return tuple(
        t for k in range(min(max_degree, n) + 1) for t in combinations(range(n), k)
    )


@dataclass(frozen=True)
class MonotoneBasis:
    """Coordinates ``P(&S)`` for every variable subset ``S`` with ``|S| <= d``.

    The empty term is the universal event (probability 1).
    """

    space: AtomSpace
    max_degree: int

    def __post_init__(self):
        if not 0 <= self.max_degree:
            raise ValueError("max_degree must be nonnegative")
        object.__setattr__(self, "max_degree", min(self.max_degree, self.space.n))

    @property
    def terms(self) -> tuple[Term, ...]:
        return canonical_terms(self.space.n, self.max_degree)

    @property
    def is_full(self) -> bool:
        return self.max_degree == self.space.n

    def term_label(self, term: Term) -> str:
        if not term:
            return "1"
        return "&".join(self.space.variables[i] for i in term)

    def labels(self) -> list[str]:
        return [self.term_label(t) for t in self.terms]

    def point(self, m: int) -> tuple[int, ...]:
        """Coordinates of the point mass on atom ``m``."""
        return tuple(int(term_mask(t) & m == term_mask(t)) for t in self.terms)


def _require_full(basis: MonotoneBasis) -> None:
    if not basis.is_full:
        raise ValueError("full-degree basis (d = N) required")


def atoms_to_basis(v: AtomVector, basis: MonotoneBasis) -> tuple[Fraction, ...]:
    """``P(&S) = sum of v[m] over atoms m containing S``, in basis term order."""
    _require_full(basis)
    if v.space != basis.space:
        raise ValueError("vector and basis live in different atom spaces")
    sums = superset_sums([Fraction(x) for x in v.entries])
    return tuple(sums[term_mask(t)] for t in basis.terms)


def basis_to_atoms(coords: Sequence, basis: MonotoneBasis) -> AtomVector:
    """Inclusion-exclusion inverse of :func:`atoms_to_basis`."""
    _require_full(basis)
    terms = basis.terms
    if len(coords) != len(terms):
        raise ValueError(f"expected {len(terms)} coordinates, got {len(coords)}")
    values = [Fraction(0)] * basis.space.atom_count
    for t, c in zip(terms, coords):
        values[term_mask(t)] = Fraction(c)
    return AtomVector(basis.space, tuple(superset_moebius(values)))


def _signed_subsets(term: Term):
    for k in range(1, len(term) + 1):
        sign = 1 if k % 2 else -1
        for sub in combinations(term, k):
            yield sign, sub


def conjunctions_to_disjunctions(coords: Sequence, basis: MonotoneBasis) -> tuple[Fraction, ...]:
    """Map ``P(&S)`` coordinates to ``P(|S)`` (the empty term stays 1)."""
    lookup = dict(zip(basis.terms, (Fraction(c) for c in coords)))
    return tuple(
        lookup[t] if not t else sum(s * lookup[sub] for s, sub in _signed_subsets(t))
        for t in basis.terms
    )


def disjunctions_to_conjunctions(coords: Sequence, basis: MonotoneBasis) -> tuple[Fraction, ...]:
    """Inverse of :func:`conjunctions_to_disjunctions` (same alternating sum)."""
    return conjunctions_to_disjunctions(coords, basis)
