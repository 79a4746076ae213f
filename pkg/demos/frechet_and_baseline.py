"""Two events, then a chain: exact bounds next to the fuzzy min/max estimate."""

from fractions import Fraction

from probbounds import KnowledgeBase, bound, fuzzy_evaluate, parse_expression
from probbounds.formula import Var, conj
from probbounds.kb import Assertion


def show(label, res):
    print(f"{label}: [{res.lo}, {res.hi}]")


def main():
    kb = KnowledgeBase.from_strings(["A", "B"], [("A", Fraction(2, 5)), ("B", Fraction(4, 5))])
    q = parse_expression("A & B")
    res = bound(kb, q)
    show("P(A & B)", res)
    print("  fuzzy estimate:", fuzzy_evaluate(q, {"A": Fraction(2, 5), "B": Fraction(4, 5)}))
    for name, w in zip(("lower", "upper"), res.witnesses):
        parts = [f"{w.space.atom_label(m)}={p}" for m, p in enumerate(w.entries) if p]
        print(f"  {name} witness: {', '.join(parts)}")

    print()
    print("chains of events with probability 9/10 each")
    for k in range(2, 9):
        names = tuple(f"x{i}" for i in range(1, k + 1))
        kb = KnowledgeBase(names, tuple(Assertion.equal(Var(v), Fraction(9, 10)) for v in names))
        query = conj(*(Var(v) for v in names))
        res = bound(kb, query)
        fuzzy = fuzzy_evaluate(query, {v: Fraction(9, 10) for v in names})
        print(f"  k={k}: exact [{res.lo}, {res.hi}], fuzzy {fuzzy}")


if __name__ == "__main__":
    main()
