"""Relaxed bounds narrowing along a budget schedule on a random base."""

import random
from fractions import Fraction

from probbounds import KnowledgeBase, RefinementConfig, bound, refine
from probbounds.atoms import AtomSpace, default_names
from probbounds.formula import And, Not, Or, Var, truth_mask
from probbounds.kb import Assertion


def main():
    rng = random.Random(5)
    names = default_names(6)
    space = AtomSpace(names)
    weights = [rng.randint(0, 5) for _ in range(space.atom_count)]
    total = sum(weights)

    def prob(expr):
        mask = truth_mask(expr, names)
        return Fraction(sum(w for w, b in zip(weights, mask) if b), total)

    events = [
        Or(Var("A"), Var("B")),
        And(Var("B"), Not(Var("C"))),
        Or(And(Var("C"), Var("D")), Var("E")),
        And(Var("A"), Var("F")),
    ]
    kb = KnowledgeBase(names, tuple(Assertion.equal(e, prob(e)) for e in events))
    query = And(Var("A"), Var("E"))

    exact = bound(kb, query, RefinementConfig(mode="exact"))
    print(f"exact: [{exact.lo}, {exact.hi}]")
    cfg = RefinementConfig(degree=2, budgets=(0, 8, 32, 128, 512), mode="relaxed")
    for step in refine(kb, query, cfg, early_stop=False):
        print(f"budget {step.budget:4d}: [{step.lo}, {step.hi}]  rows={step.stats.get('rows')}")


if __name__ == "__main__":
    main()
