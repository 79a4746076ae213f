from fractions import Fraction

import pytest

from probbounds.atoms import AtomSpace, AtomVector, default_names
from probbounds.formula import And, Or, Var, parse_expression, truth_mask
from probbounds.kb import Assertion, KnowledgeBase

F = Fraction


class TestAtoms:
    def test_little_endian(self):
        s = AtomSpace(("A", "B"))
        assert [s.atom_label(m) for m in range(4)] == ["~A&~B", "A&~B", "~A&B", "A&B"]
        assert s.atom_of(["B"]) == 2

    def test_names(self):
        assert default_names(3) == ("A", "B", "C")
        assert default_names(27)[0] == "x1"

    def test_vector(self):
        s = AtomSpace(("A",))
        v = AtomVector(s, (F(1, 3), F(2, 3)))
        assert v.is_probability() and v.support() == (0, 1)
        assert v.dot((0, 3)) == 2
        with pytest.raises(ValueError):
            AtomVector(s, (1,))

    def test_duplicates(self):
        with pytest.raises(ValueError):
            AtomSpace(("A", "A"))


class TestAssertions:
    def test_kinds(self):
        e = Var("A")
        assert Assertion.equal(e, F(1, 2)).kind == "equal"
        assert Assertion.at_least(e, 0).kind == "at_least"
        assert Assertion.at_most(e, 1).kind == "at_most"
        assert Assertion.interval(e, F(1, 4), F(1, 2)).kind == "interval"
        assert str(Assertion.interval(e, F(1, 4), F(1, 2))) == "P(A) in [1/4, 1/2]"

    def test_invalid(self):
        e = Var("A")
        with pytest.raises(ValueError):
            Assertion(e)
        with pytest.raises(ValueError):
            Assertion.equal(e, F(3, 2))
        with pytest.raises(ValueError):
            Assertion.interval(e, F(1, 2), F(1, 4))

    def test_undeclared(self):
        with pytest.raises(ValueError):
            KnowledgeBase(("A",), (Assertion.equal(Var("B"), 0),))

    def test_from_strings(self):
        kb = KnowledgeBase.from_strings(["A", "B"], [("A & B", F(1, 5)), ("A", F(1, 4), F(1, 2))])
        assert kb.n == 2 and [a.kind for a in kb.assertions] == ["equal", "interval"]


class TestDefinitionalBase:
    def test_small_event_stays_equivalent(self):
        kb = KnowledgeBase(("A", "B"))
        cnf, out = kb.cnf_of(parse_expression("A -> B"))
        assert out is kb and not cnf.aux_defs

    def test_wide_event_adds_units(self):
        names = tuple(f"x{i}" for i in range(18))
        kb = KnowledgeBase(names)
        wide = Or(*(And(Var(names[2 * i]), Var(names[2 * i + 1])) for i in range(9)))
        cnf, out = kb.cnf_of(wide)
        assert cnf.aux_defs and len(out.variables) > len(names)
        assert out.definitional_units
        assert all(a.lower == a.upper == 1 for a in out.all_assertions())
