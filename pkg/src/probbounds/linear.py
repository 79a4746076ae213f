"""Exact linear rows and systems shared by the LP solver and the eliminator.

A row states ``coeffs . x + constant  (>= | =)  0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Mapping, Sequence

GE = ">="
EQ = "="
LE = "<="


def as_fraction(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if type(x) is int:
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating-point values are not accepted; use Fraction or str")
    return Fraction(x)


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    relation: str = GE
    constant: Fraction = Fraction(0)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rel = self.relation
        coeffs = tuple(as_fraction(c) for c in self.coeffs)
        const = as_fraction(self.constant)
        if rel == LE:
            coeffs = tuple(-c for c in coeffs)
            const = -const
            rel = GE
        if rel not in (GE, EQ):
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "constant", const)
        object.__setattr__(self, "relation", rel)

    @property
    def is_equality(self) -> bool:
        return self.relation == EQ

    @cached_property
    def support(self) -> tuple[int, ...]:
        """Indices of the nonzero coefficients."""
        return tuple(j for j, c in enumerate(self.coeffs) if c)

    def is_constant(self) -> bool:
        return not self.support

    def value(self, x: Sequence) -> Fraction:
        c = self.coeffs
        return sum((c[j] * as_fraction(x[j]) for j in self.support), self.constant)

    def satisfied_by(self, x: Sequence) -> bool:
        v = self.value(x)
        return v == 0 if self.is_equality else v >= 0

    def normalized(self) -> "Row":
        """Scale to integer coefficients with gcd 1 (positive scaling; equalities
        additionally get a positive leading coefficient)."""
        vals = [*self.coeffs, self.constant]
        nz = [v for v in vals if v]
        if not nz:
            return self
        lcm = reduce(math.lcm, (v.denominator for v in nz), 1)
        g = reduce(math.gcd, (abs(int(v * lcm)) for v in nz))
        scale = Fraction(lcm, g)
        if self.is_equality:
            lead = next(c for c in self.coeffs if c) if any(self.coeffs) else self.constant
            if lead < 0:
                scale = -scale
        return Row(tuple(c * scale for c in self.coeffs), self.relation, self.constant * scale, self.name)


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        n = len(self.variables)
        for r in self.rows:
            if len(r.coeffs) != n:
                raise ValueError(f"row {r.name!r} has {len(r.coeffs)} coefficients, expected {n}")

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def satisfied_by(self, x: Sequence) -> bool:
        return all(r.satisfied_by(x) for r in self.rows)

    def assignment(self, x: Sequence) -> dict[str, Fraction]:
        return dict(zip(self.variables, x))

    def vector(self, values: Mapping[str, object]) -> tuple[Fraction, ...]:
        return tuple(as_fraction(values[v]) for v in self.variables)

    def row_text(self, row: Row) -> str:
        parts = []
        for v, c in zip(self.variables, row.coeffs):
            if c:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{v}")
        if row.constant or not parts:
            parts.append(f"{'+' if row.constant >= 0 else '-'} {abs(row.constant)}")
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} {row.relation} 0"
