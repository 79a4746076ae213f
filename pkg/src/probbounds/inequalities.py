"""Valid inequalities over the monotone-conjunction basis.

An inequality ``sum_S c_S * P(&S) >= 0`` (the empty term carries the affine
constant) is valid for the partition simplex iff its value at every vertex,
i.e. at every point-mass measure, is nonnegative. The value at atom ``m`` is
``sum(c_S for S subset of m)``, so vertex values and coefficients are related
by a subset zeta/Moebius transform.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .algebra import (
    Term,
    canonical_terms,
    mask_term,
    subset_moebius,
    subset_sums,
    term_mask,
)
from .atoms import AtomSpace, AtomVector, default_names
from .errors import ParseError, ResourceLimitError

MAX_VALIDITY_VARIABLES = 20


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class LinearInequality:
    """``sum_S coeffs[S] * P(&S) >= 0`` over ``variables``.

    Terms are sorted tuples of variable indices; the empty tuple is the
    constant. Zero coefficients are dropped. Equality and hashing compare by
    variable names, so inequalities built in different variable orders
    compare equal when they state the same thing over the same variables.
    """

    __slots__ = ("variables", "coeffs", "_key")

    def __init__(self, variables: Sequence[str], coeffs: Mapping[Iterable[int], object]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variables in {variables}")
        clean: dict[Term, Fraction] = {}
        n = len(variables)
        for term, c in coeffs.items():
            t = tuple(sorted(set(term)))
            if t and not (0 <= t[0] and t[-1] < n):
                raise ValueError(f"term {term} out of range for {n} variables")
            c = _frac(c)
            if c:
                clean[t] = clean.get(t, Fraction(0)) + c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "coeffs", {t: c for t, c in clean.items() if c})
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("LinearInequality is immutable")

    # construction helpers ------------------------------------------------

    @classmethod
    def from_labels(cls, variables: Sequence[str], coeffs: Mapping[str, object]) -> "LinearInequality":
        """Build from labels like ``"1"``, ``"A"``, ``"A&B"``."""
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        out = {}
        for label, c in coeffs.items():
            label = label.strip()
            if label in ("", "1"):
                term: tuple = ()
            else:
                term = tuple(index[name.strip()] for name in label.split("&"))
            out[term] = c
        return cls(variables, out)

    @classmethod
    def from_vertex_values(cls, variables: Sequence[str], values: Sequence) -> "LinearInequality":
        variables = tuple(variables)
        if len(values) != 1 << len(variables):
            raise ValueError("one value per atom required")
        coeffs = subset_moebius([_frac(v) for v in values])
        return cls(variables, {mask_term(m): c for m, c in enumerate(coeffs) if c})

    # basic properties ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def space(self) -> AtomSpace:
        return AtomSpace(self.variables)

    @property
    def degree(self) -> int:
        return max((len(t) for t in self.coeffs), default=0)

    @property
    def constant(self) -> Fraction:
        return self.coeffs.get((), Fraction(0))

    def coefficient(self, term: Iterable[int]) -> Fraction:
        return self.coeffs.get(tuple(sorted(term)), Fraction(0))

    def items(self) -> list[tuple[Term, Fraction]]:
        """Nonzero terms in canonical (size, lexicographic) order."""
        return sorted(self.coeffs.items(), key=lambda tc: (len(tc[0]), tc[0]))

    def support(self) -> tuple[str, ...]:
        used = set().union(*self.coeffs) if self.coeffs else set()
        return tuple(v for i, v in enumerate(self.variables) if i in used)

    def term_label(self, term: Term) -> str:
        return "&".join(self.variables[i] for i in term)

    # evaluation ----------------------------------------------------------

    def vertex_values(self) -> list[Fraction]:
        """Exact value at the point mass of every atom."""
        _guard_validity(self.n)
        dense = [Fraction(0)] * (1 << self.n)
        for t, c in self.coeffs.items():
            dense[term_mask(t)] = c
        return subset_sums(dense)

    def value_at_atom(self, m: int) -> Fraction:
        return sum(
            (c for t, c in self.coeffs.items() if term_mask(t) & m == term_mask(t)),
            Fraction(0),
        )

    def evaluate(self, point: Mapping[Term, object]) -> Fraction:
        """Value at a point given by basis coordinates (empty term defaults to 1)."""
        total = Fraction(0)
        for t, c in self.coeffs.items():
            total += c * (_frac(point[t]) if t else _frac(point.get((), 1)))
        return total

    def evaluate_measure(self, measure: AtomVector) -> Fraction:
        """Value at an atom measure over the same variables (in the same order)."""
        if measure.space.variables != self.variables:
            raise ValueError("measure lives in a different atom space")
        total = Fraction(0)
        for m, w in enumerate(measure.entries):
            if w:
                total += _frac(w) * self.value_at_atom(m)
        return total

    # transformations -----------------------------------------------------

    def scaled(self, factor) -> "LinearInequality":
        factor = _frac(factor)
        return LinearInequality(self.variables, {t: c * factor for t, c in self.coeffs.items()})

    def normalized(self, orient: bool = True) -> "LinearInequality":
        """Integer coefficients with gcd 1; oriented so vertex values are >= 0.

        Orientation flips the sign only when no vertex value is positive and
        some is negative; it needs all 2^N vertex values and is skipped when
        ``orient`` is false.
        """
        if not self.coeffs:
            return self
        lcm = reduce(math.lcm, (c.denominator for c in self.coeffs.values()), 1)
        ints = {t: int(c * lcm) for t, c in self.coeffs.items()}
        g = reduce(math.gcd, (abs(v) for v in ints.values()))
        sign = 1
        if orient:
            vals = _int_vertex_values(self.variables, ints)
            if vals.max() <= 0 and vals.min() < 0:
                sign = -1
        return LinearInequality(self.variables, {t: sign * v // g for t, v in ints.items()})

    def over(self, variables: Sequence[str]) -> "LinearInequality":
        """The same inequality over a superset of variables, in the given order."""
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        missing = [v for v in self.variables if v not in pos]
        if missing:
            raise ValueError(f"variables {missing} absent from target order")
        remap = [pos[v] for v in self.variables]
        return LinearInequality(
            variables, {tuple(remap[i] for i in t): c for t, c in self.coeffs.items()}
        )

    # identity --------------------------------------------------------------

    def key(self):
        if self._key is None:
            named = sorted(
                (tuple(sorted(self.variables[i] for i in t)), c) for t, c in self.coeffs.items()
            )
            object.__setattr__(self, "_key", (tuple(sorted(self.variables)), tuple(named)))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, LinearInequality):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def text(self) -> str:
        return format_inequality(self)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"LinearInequality({self.text()!r}, variables={self.variables})"


# --------------------------------------------------------------------------
# Text form
# --------------------------------------------------------------------------


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_inequality(ineq: LinearInequality) -> str:
    """``c0 + c1*P(A) + ... >= 0``; unit coefficients print without ``1*``."""
    parts: list[str] = []
    for t, c in ineq.items():
        mag = abs(c)
        if t:
            body = f"P({ineq.term_label(t)})"
            body = body if mag == 1 else f"{_fmt_coeff(mag)}*{body}"
        else:
            body = _fmt_coeff(mag)
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return (" ".join(parts) or "0") + " >= 0"


_INEQ_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d+(?:/\d+|\.\d*)?)\s*\*?\s*)?
        (?:P\(\s*(?P<label>[^)]*)\))?\s*""",
    re.VERBOSE,
)


def parse_inequality(text: str, variables: Sequence[str] | None = None) -> LinearInequality:
    """Parse the text form produced by :func:`format_inequality`.

    Without ``variables`` the variable order is the order of first
    appearance in the text.
    """
    src = text.strip()
    m = re.fullmatch(r"(?P<lhs>.*?)\s*(?:>=|≥)\s*0", src)
    if m is None:
        raise ParseError("inequality must end with '>= 0'", None, text)
    lhs = m.group("lhs")
    pos = 0
    entries: list[tuple[str, Fraction]] = []
    while pos < len(lhs):
        tm = _INEQ_TERM.match(lhs, pos)
        if tm is None or tm.end() == pos or (tm.group("num") is None and tm.group("label") is None):
            raise ParseError("malformed term", pos, text)
        if entries and tm.group("sign") is None:
            raise ParseError("missing '+' or '-' between terms", pos, text)
        coeff = Fraction(tm.group("num")) if tm.group("num") else Fraction(1)
        if tm.group("sign") == "-":
            coeff = -coeff
        label = tm.group("label")
        entries.append(("1" if label is None else label.replace(" ", ""), coeff))
        pos = tm.end()
    if variables is None:
        seen: dict[str, None] = {}
        for label, _ in entries:
            if label != "1":
                for name in label.split("&"):
                    seen.setdefault(name)
        variables = tuple(seen)
    variables = tuple(variables)
    known = set(variables)
    coeffs: dict[str, Fraction] = {}
    for label, c in entries:
        if label != "1":
            for name in label.split("&"):
                if name not in known:
                    raise ParseError(f"unknown variable {name!r}", None, text)
            label = "&".join(sorted(set(label.split("&")), key=variables.index))
        coeffs[label] = coeffs.get(label, Fraction(0)) + c
    return LinearInequality.from_labels(variables, coeffs)


# --------------------------------------------------------------------------
# Validity
# --------------------------------------------------------------------------


def _guard_validity(n: int) -> None:
    if n > MAX_VALIDITY_VARIABLES:
        raise ResourceLimitError(
            f"vertex enumeration over {n} variables exceeds the "
            f"{MAX_VALIDITY_VARIABLES}-variable guard"
        )


def _int_vertex_values(variables: Sequence[str], int_coeffs: Mapping[Term, int]) -> np.ndarray:
    n = len(variables)
    _guard_validity(n)
    bound = sum(abs(v) for v in int_coeffs.values())
    dtype = np.int64 if bound < 2**62 else object
    arr = np.zeros(1 << n, dtype=dtype)
    for t, v in int_coeffs.items():
        arr[term_mask(t)] = v
    for i in range(n):
        view = arr.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return arr


@dataclass(frozen=True)
class Valid:
    tight: frozenset

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Invalid:
    witness: int
    value: Fraction

    def __bool__(self):
        return False


def is_valid(ineq: LinearInequality) -> Union[Valid, Invalid]:
    """Check nonnegativity at all 2^N vertices.

    Returns :class:`Valid` with the tight atoms, or :class:`Invalid` with the
    first atom of negative value.
    """
    _guard_validity(ineq.n)
    lcm = reduce(math.lcm, (c.denominator for c in ineq.coeffs.values()), 1)
    ints = {t: int(c * lcm) for t, c in ineq.coeffs.items()}
    vals = _int_vertex_values(ineq.variables, ints)
    negative = np.flatnonzero(vals < 0)
    if negative.size:
        m = int(negative[0])
        return Invalid(m, Fraction(int(vals[m]), lcm))
    return Valid(frozenset(int(m) for m in np.flatnonzero(vals == 0)))


@dataclass(frozen=True)
class VertexValueFunction:
    variables: tuple[str, ...]
    values: tuple[Fraction, ...]

    @classmethod
    def of(cls, ineq: LinearInequality) -> "VertexValueFunction":
        return cls(ineq.variables, tuple(ineq.vertex_values()))

    @property
    def tight_set(self) -> frozenset:
        return frozenset(m for m, v in enumerate(self.values) if v == 0)

    def to_inequality(self) -> LinearInequality:
        return LinearInequality.from_vertex_values(self.variables, self.values)


# --------------------------------------------------------------------------
# Symmetric functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricSpec:
    """``S_n(a_0, ..., a_p)``: true when the number of true variables is some a_i."""

    n: int
    constants: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(self.constants))
        a = self.constants
        if self.n < 1:
            raise ValueError("n must be positive")
        if not a or len(a) > self.n + 1:
            raise ValueError("need between 1 and n+1 defining constants")
        if any(x < 0 or x > self.n for x in a):
            raise ValueError(f"defining constants must lie in [0, {self.n}]")
        if any(x >= y for x, y in zip(a, a[1:])):
            raise ValueError("defining constants must be strictly increasing")

    def defining_values(self) -> tuple[int, ...]:
        """``f(k) = prod_i (a_i - k)`` for ``k = 0..n``."""
        return tuple(math.prod(a - k for a in self.constants) for k in range(self.n + 1))


@dataclass(frozen=True)
class Parity:
    status: str  # "pass", "fail" or "degenerate"
    values: tuple[int, ...]
    sign: int = 0
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.status == "pass"


def parity_check(spec: SymmetricSpec) -> Parity:
    """Uniform parity: nonzero values of the defining product share one sign.

    Zeros are neutral. ``witness`` on failure is the first pair ``(k0, k1)``
    with opposite signs.
    """
    f = spec.defining_values()
    first = None
    for k, v in enumerate(f):
        if v == 0:
            continue
        if first is None:
            first = k
        elif (v > 0) != (f[first] > 0):
            return Parity("fail", f, witness=(first, k))
    if first is None:
        return Parity("degenerate", f)
    return Parity("pass", f, sign=1 if f[first] > 0 else -1)


def _forward_differences(values: Sequence[int]) -> list[int]:
    """``out[j] = j-th forward difference at 0``, so ``v(k) = sum_j out[j]*C(k, j)``."""
    out, row = [], list(values)
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


def _symmetric_inequality(values: Sequence[int], variables: Sequence[str]) -> LinearInequality:
    diffs = _forward_differences(values)
    coeffs = {
        t: diffs[j] for j in range(len(variables) + 1) if diffs[j] for t in combinations(range(len(variables)), j)
    }
    return LinearInequality(variables, coeffs)


def signed_symmetric_inequality(spec: SymmetricSpec, variables: Sequence[str] | None = None) -> LinearInequality:
    """The form whose value at a weight-k vertex is the signed ``f(k)``."""
    variables = tuple(variables) if variables is not None else default_names(spec.n)
    if len(variables) != spec.n:
        raise ValueError("need exactly n variable names")
    return _symmetric_inequality(spec.defining_values(), variables)


def synthesize(spec: SymmetricSpec, variables: Sequence[str] | None = None) -> LinearInequality:
    """Valid inequality from a parity-passing symmetric function.

    The vertex value at an atom with k true variables is ``|f(k)|`` up to the
    global normalization; the coefficient shared by all terms of size j is the
    j-th forward difference of ``|f|`` at 0. Tight exactly at weights in
    ``spec.constants``.
    """
    parity = parity_check(spec)
    if parity.status != "pass":
        raise ValueError(f"{spec} does not satisfy uniform parity ({parity.status})")
    variables = tuple(variables) if variables is not None else default_names(spec.n)
    if len(variables) != spec.n:
        raise ValueError("need exactly n variable names")
    return _symmetric_inequality([abs(v) for v in parity.values], variables).normalized(orient=False)


# --------------------------------------------------------------------------
# Symmetries and compounding
# --------------------------------------------------------------------------


def negate_variable(ineq: LinearInequality, var: str) -> LinearInequality:
    """Substitute ``x -> not x``: ``P(&S) -> P(&(S-x)) - P(&S)`` for S containing x."""
    i = ineq.variables.index(var)
    out: dict[Term, Fraction] = {}
    for t, c in ineq.coeffs.items():
        if i in t:
            rest = tuple(j for j in t if j != i)
            out[rest] = out.get(rest, Fraction(0)) + c
            out[t] = out.get(t, Fraction(0)) - c
        else:
            out[t] = out.get(t, Fraction(0)) + c
    return LinearInequality(ineq.variables, out)


def negate_variables(ineq: LinearInequality, names: Iterable[str]) -> LinearInequality:
    for v in names:
        ineq = negate_variable(ineq, v)
    return ineq


def permute_variables(ineq: LinearInequality, perm: Mapping[str, str]) -> LinearInequality:
    """Relabel variables by the bijection ``perm`` (unmapped names are fixed)."""
    full = {v: perm.get(v, v) for v in ineq.variables}
    if sorted(full.values()) != sorted(ineq.variables):
        raise ValueError("perm must be a permutation of the inequality's variables")
    index = {v: i for i, v in enumerate(ineq.variables)}
    remap = [index[full[v]] for v in ineq.variables]
    return LinearInequality(
        ineq.variables, {tuple(remap[i] for i in t): c for t, c in ineq.coeffs.items()}
    )


@dataclass(frozen=True)
class OutOfSubspace:
    degree: int


def flip_transform(
    ineq: LinearInequality, atom_perm: Sequence[int], max_degree: int | None = None
) -> Union[LinearInequality, OutOfSubspace]:
    """Move the vertex value of atom ``m`` to atom ``atom_perm[m]``.

    Validity is preserved automatically; when the result needs terms above
    ``max_degree`` an :class:`OutOfSubspace` report is returned instead.
    """
    size = 1 << ineq.n
    if sorted(atom_perm) != list(range(size)):
        raise ValueError("atom_perm must be a permutation of the atoms")
    values = ineq.vertex_values()
    moved = [Fraction(0)] * size
    for m, v in enumerate(values):
        moved[atom_perm[m]] = v
    out = LinearInequality.from_vertex_values(ineq.variables, moved)
    if max_degree is not None and out.degree > max_degree:
        return OutOfSubspace(out.degree)
    return out


def compound(a: LinearInequality, b: LinearInequality) -> LinearInequality:
    """Product of two inequalities over disjoint variables.

    The vertex value at a joint atom is the product of the operands' values;
    for disjoint variables ``[S in m][T in m] = [S|T in m]`` so coefficients
    multiply termwise.
    """
    overlap = set(a.variables) & set(b.variables)
    if overlap:
        raise ValueError(f"compound operands share variables {sorted(overlap)}")
    shift = a.n
    out: dict[Term, Fraction] = {}
    for s, c in a.coeffs.items():
        for t, e in b.coeffs.items():
            out[s + tuple(j + shift for j in t)] = c * e
    return LinearInequality(a.variables + b.variables, out)


def escalator_lift(ineq: LinearInequality, extra_vars: Sequence[str]) -> LinearInequality:
    """Same coefficients over the enlarged variable set ``variables + extra_vars``."""
    extra = tuple(extra_vars)
    clash = set(extra) & set(ineq.variables)
    if clash:
        raise ValueError(f"extra variables {sorted(clash)} already present")
    return LinearInequality(ineq.variables + extra, ineq.coeffs)


# --------------------------------------------------------------------------
# Family generation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Block:
    spec: SymmetricSpec
    degree: int
    values: tuple[int, ...]  # |f(k)|, k = 0..n

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def nonzero_fraction(self) -> Fraction:
        hit = sum(math.comb(self.n, k) for k, v in enumerate(self.values) if v)
        return Fraction(hit, 1 << self.n)

    def sort_key(self):
        return (self.n, self.spec.constants)


def _blocks(n_max: int, d: int) -> list[_Block]:
    out = []
    for n in range(1, n_max + 1):
        for size in range(1, min(d, n) + 1):
            for consts in combinations(range(n + 1), size):
                spec = SymmetricSpec(n, consts)
                parity = parity_check(spec)
                if not parity:
                    continue
                values = tuple(abs(v) for v in parity.values)
                degree = max((j for j, c in enumerate(_forward_differences(values)) if c), default=0)
                if 1 <= degree <= d:
                    out.append(_Block(spec, degree, values))
    out.sort(key=_Block.sort_key)
    return out


@dataclass(frozen=True)
class _Pattern:
    blocks: tuple[_Block, ...]

    @property
    def degree(self) -> int:
        return sum(b.degree for b in self.blocks)

    @property
    def tight_fraction(self) -> Fraction:
        return 1 - math.prod((b.nonzero_fraction for b in self.blocks), start=Fraction(1))

    def sort_key(self):
        return (
            -self.tight_fraction,
            self.degree,
            len(self.blocks),
            tuple(b.sort_key() for b in self.blocks),
        )


def _patterns(n: int, d: int) -> list[_Pattern]:
    blocks = _blocks(n, d)
    out: list[_Pattern] = []

    def extend(start: int, chosen: list[_Block], size: int, degree: int):
        if chosen:
            out.append(_Pattern(tuple(chosen)))
        for j in range(start, len(blocks)):
            b = blocks[j]
            if size + b.n <= n and degree + b.degree <= d:
                chosen.append(b)
                extend(j, chosen, size + b.n, degree + b.degree)
                chosen.pop()

    extend(0, [], 0, 0)
    out.sort(key=_Pattern.sort_key)
    return out


def _block_coeffs(block: _Block, var_idx: Sequence[int], negated: int) -> dict[Term, int]:
    """Multilinear coefficients of ``|f|(weight)`` with local bits in ``negated`` flipped."""
    k = len(var_idx)
    table = [block.values[bin(u ^ negated).count("1")] for u in range(1 << k)]
    coeffs = subset_moebius(table)
    return {tuple(var_idx[i] for i in mask_term(u)): c for u, c in enumerate(coeffs) if c}


def _placements(sizes: Sequence[int], free: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if not sizes:
        yield []
        return
    for chosen in combinations(free, sizes[0]):
        rest = tuple(v for v in free if v not in chosen)
        for tail in _placements(sizes[1:], rest):
            yield [chosen, *tail]


def _pattern_orbit(pattern: _Pattern, n: int) -> list[dict[Term, int]]:
    sizes = [b.n for b in pattern.blocks]
    out = []
    for placement in _placements(sizes, tuple(range(n))):
        for negs in _negation_masks(sizes):
            prod: dict[Term, int] = {(): 1}
            for block, idx, neg in zip(pattern.blocks, placement, negs):
                local = _block_coeffs(block, idx, neg)
                prod = {
                    tuple(sorted(s + t)): c * e for s, c in prod.items() for t, e in local.items()
                }
            g = reduce(math.gcd, (abs(v) for v in prod.values()))
            out.append({t: v // g for t, v in prod.items() if v})
    return out


def _negation_masks(sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not sizes:
        yield ()
        return
    for head in range(1 << sizes[0]):
        for tail in _negation_masks(sizes[1:]):
            yield (head, *tail)


def iter_family(n: int, degree: int, variables: Sequence[str] | None = None) -> Iterator[LinearInequality]:
    """Deterministic stream of valid inequalities over ``n`` variables.

    Members are compounds of parity-passing symmetric functions on disjoint
    variable blocks, closed under negation and permutation of variables, of
    total degree at most ``degree``, deduplicated. Order: patterns by
    decreasing fraction of tight vertices, then degree, number of blocks and
    block constants; within a pattern, lexicographic in the dense coefficient
    vector.
    """
    if degree > n:
        raise ValueError("degree must not exceed the number of variables")
    variables = tuple(variables) if variables is not None else default_names(n)
    if len(variables) != n:
        raise ValueError("need exactly n variable names")
    rank = {t: r for r, t in enumerate(canonical_terms(n, degree))}
    seen: set = set()
    for pattern in _patterns(n, degree):
        orbit = _pattern_orbit(pattern, n)
        keyed = {}
        for coeffs in orbit:
            dense = [0] * len(rank)
            for t, c in coeffs.items():
                dense[rank[t]] = c
            keyed.setdefault(tuple(dense), coeffs)
        for dense in sorted(keyed):
            if dense in seen:
                continue
            seen.add(dense)
            yield LinearInequality(variables, keyed[dense])


def generate_family(
    n: int, degree: int, budget: int, variables: Sequence[str] | None = None
) -> list[LinearInequality]:
    """The first ``budget`` members of :func:`iter_family`."""
    if budget <= 0:
        return []
    out = []
    for ineq in iter_family(n, degree, variables):
        out.append(ineq)
        if len(out) >= budget:
            break
    return out
