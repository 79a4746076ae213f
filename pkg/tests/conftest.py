import random
from fractions import Fraction

import pytest

from probbounds.atoms import AtomSpace, AtomVector, default_names
from probbounds.formula import And, Not, Or, Var, truth_mask
from probbounds.kb import Assertion, KnowledgeBase

# the four facets over two events
PAIR_FACETS = [
    "1 - P(A) - P(B) + P(A&B) >= 0",
    "P(A) - P(A&B) >= 0",
    "P(B) - P(A&B) >= 0",
    "P(A&B) >= 0",
]

# the sixteen facets over three events with pairwise coordinates
TRIPLE_FACETS = [
    # pairwise lower Frechet rows
    "1 - P(A) - P(B) + P(A&B) >= 0",
    "1 - P(A) - P(C) + P(A&C) >= 0",
    "1 - P(B) - P(C) + P(B&C) >= 0",
    # upper Frechet rows
    "P(A) - P(A&B) >= 0",
    "P(A) - P(A&C) >= 0",
    "P(B) - P(A&B) >= 0",
    "P(B) - P(B&C) >= 0",
    "P(C) - P(A&C) >= 0",
    "P(C) - P(B&C) >= 0",
    # nonnegativity
    "P(A&B) >= 0",
    "P(A&C) >= 0",
    "P(B&C) >= 0",
    # the group that mixes all three events
    "1 - P(A) - P(B) - P(C) + P(A&B) + P(A&C) + P(B&C) >= 0",
    "P(A) - P(A&B) - P(A&C) + P(B&C) >= 0",
    "P(B) - P(A&B) + P(A&C) - P(B&C) >= 0",
    "P(C) + P(A&B) - P(A&C) - P(B&C) >= 0",
]


def random_expr(rng: random.Random, names, depth: int = 2):
    if depth == 0 or rng.random() < 0.3:
        v = Var(rng.choice(names))
        return Not(v) if rng.random() < 0.3 else v
    a = random_expr(rng, names, depth - 1)
    b = random_expr(rng, names, depth - 1)
    if a == b:
        return a
    return And(a, b) if rng.random() < 0.5 else Or(a, b)


def random_measure(rng: random.Random, space: AtomSpace, zeros: float = 0.3) -> AtomVector:
    w = [0 if rng.random() < zeros else rng.randint(1, 6) for _ in range(space.atom_count)]
    if not any(w):
        w[rng.randrange(space.atom_count)] = 1
    total = sum(w)
    return AtomVector(space, tuple(Fraction(x, total) for x in w))


def event_probability(mu: AtomVector, expr) -> Fraction:
    mask = truth_mask(expr, mu.space.variables)
    return sum((p for p, b in zip(mu.entries, mask) if b), Fraction(0))


def random_kb(rng: random.Random, n: int, k: int, depth: int = 2):
    """A consistent base built around a hidden measure, plus a query.

    Returns ``(kb, query, hidden_measure)``.
    """
    names = default_names(n)
    space = AtomSpace(names)
    mu = random_measure(rng, space)
    assertions = []
    for _ in range(k):
        e = random_expr(rng, names, depth)
        p = event_probability(mu, e)
        r = rng.random()
        if r < 0.5:
            assertions.append(Assertion.equal(e, p))
        elif r < 0.7:
            assertions.append(Assertion.at_least(e, max(Fraction(0), p - Fraction(1, 10))))
        elif r < 0.85:
            assertions.append(Assertion.at_most(e, min(Fraction(1), p + Fraction(1, 8))))
        else:
            assertions.append(
                Assertion.interval(e, max(Fraction(0), p - Fraction(1, 5)), min(Fraction(1), p + Fraction(1, 10)))
            )
    return KnowledgeBase(names, tuple(assertions)), random_expr(rng, names, depth + 1), mu


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(RESULTS, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
