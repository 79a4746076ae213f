"""The product-partition atom space and vectors indexed by its atoms.

Atom ``m`` is the truth assignment in which variable ``variables[i]`` is true
iff bit ``i`` of ``m`` is set (little-endian in declared order).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ResourceLimitError

MAX_ATOM_VARIABLES = 24


def default_names(n: int) -> tuple[str, ...]:
    """``A, B, C, ...`` for up to 26 variables, else ``x1 .. xn``."""
    if n <= 26:
        return tuple(chr(ord("A") + i) for i in range(n))
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class AtomSpace:
    variables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        if len(self.variables) > MAX_ATOM_VARIABLES:
            raise ResourceLimitError(
                f"atom space over {len(self.variables)} variables exceeds the "
                f"{MAX_ATOM_VARIABLES}-variable guard"
            )

    @classmethod
    def of_size(cls, n: int) -> "AtomSpace":
        return cls(default_names(n))

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def atom_count(self) -> int:
        return 1 << len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in {self.variables}") from None

    def atom_label(self, m: int) -> str:
        """Render atom ``m`` as a full conjunction, e.g. ``A&~B``."""
        if not self.variables:
            return "1"
        return "&".join(
            v if (m >> i) & 1 else "~" + v for i, v in enumerate(self.variables)
        )

    def atom_of(self, true_vars: Iterable[str]) -> int:
        m = 0
        for name in true_vars:
            m |= 1 << self.index(name)
        return m


@dataclass(frozen=True)
class AtomVector:
    """Exact values indexed by the atoms of ``space``."""

    space: AtomSpace
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != self.space.atom_count:
            raise ValueError(
                f"expected {self.space.atom_count} entries, got {len(self.entries)}"
            )

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, m: int):
        return self.entries[m]

    def __iter__(self):
        return iter(self.entries)

    def is_probability(self) -> bool:
        return all(e >= 0 for e in self.entries) and sum(self.entries) == 1

    def dot(self, other: Sequence) -> Fraction:
        return sum((Fraction(a) * b for a, b in zip(self.entries, other)), Fraction(0))

    def support(self) -> tuple[int, ...]:
        return tuple(m for m, e in enumerate(self.entries) if e != 0)
