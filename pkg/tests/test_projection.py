import random
from fractions import Fraction

import pytest

from probbounds.algebra import MonotoneBasis
from probbounds.atoms import AtomSpace
from probbounds.errors import InfeasibleSystemError, ResourceLimitError
from probbounds.formula import parse_expression
from probbounds.inequalities import is_valid, parse_inequality
from probbounds.kb import KnowledgeBase
from probbounds.linear import EQ, GE, LinearSystem, Row
from probbounds.lp import Infeasible, LinearProgram, Optimal, solve
from probbounds.projection import (
    OracleInfeasible,
    OracleInterval,
    build_atom_system,
    enumerate_facets,
    fm_eliminate,
    is_facet,
    oracle_bounds,
    project,
)

from conftest import PAIR_FACETS, TRIPLE_FACETS, event_probability, random_kb

F = Fraction


class TestElimination:
    def test_interval_vanishes(self):
        s = LinearSystem(("x",), (Row((1,), GE, 0), Row((-1,), GE, 1)))
        out = fm_eliminate(s, "x")
        assert out.variables == () and out.rows == ()

    def test_pairing(self):
        # x >= y, x <= 2 - y  ->  y <= 1
        s = LinearSystem(("x", "y"), (Row((1, -1), GE, 0), Row((-1, -1), GE, 2)))
        out = fm_eliminate(s, "x")
        assert out.variables == ("y",)
        assert len(out.rows) == 1
        assert out.rows[0].coeffs == (-1,) and out.rows[0].constant == 1

    def test_equality_substitution(self):
        s = LinearSystem(("x", "y"), (Row((1, 1), EQ, -1), Row((1, 0), GE, 0), Row((0, 1), GE, 0)))
        out = fm_eliminate(s, "x")
        texts = sorted((r.coeffs, r.constant) for r in out.rows)
        assert texts == [((-1,), 1), ((1,), 0)]

    def test_infeasible(self):
        s = LinearSystem(("x",), (Row((1,), GE, -2), Row((-1,), GE, 1)))
        with pytest.raises(InfeasibleSystemError):
            project(s, [])

    def test_projection_membership_matches_lp(self):
        rng = random.Random(3)
        names = ("x", "y", "z", "w")
        for _ in range(12):
            rows = [Row(tuple(int(i == j) for j in range(4)), GE, 0) for i in range(4)]
            rows.append(Row((-1, -1, -1, -1), GE, 4))
            for _ in range(4):
                rows.append(Row(tuple(rng.randint(-3, 3) for _ in range(4)), GE, rng.randint(0, 4)))
            system = LinearSystem(names, tuple(rows))
            try:
                proj = project(system, ["x", "y"])
            except InfeasibleSystemError:
                continue
            for _ in range(15):
                px, py = F(rng.randint(0, 12), 4), F(rng.randint(0, 12), 4)
                inside = proj.system.satisfied_by((px, py))
                fixed = rows + [Row((1, 0, 0, 0), EQ, -px), Row((0, 1, 0, 0), EQ, -py)]
                out = solve(LinearProgram(names, tuple(fixed), (0, 0, 0, 0)))
                assert inside == isinstance(out, Optimal)
                if inside:
                    lifted = proj.lift({"x": px, "y": py})
                    assert system.satisfied_by([lifted[v] for v in names])


class TestFacets:
    def test_pair(self):
        fl = enumerate_facets(2, 2)
        names = ("A", "B")
        assert set(fl.facets) == {parse_inequality(t, names) for t in PAIR_FACETS}
        assert fl.header() == "N=2 degree=2 count=4"

    def test_triple(self):
        fl = enumerate_facets(3, 2)
        names = ("A", "B", "C")
        assert set(fl.facets) == {parse_inequality(t, names) for t in TRIPLE_FACETS}
        assert len(fl.facets) == 16

    def test_single(self):
        fl = enumerate_facets(1, 1)
        assert fl.lines() == ["N=1 degree=1 count=2", "P(A) >= 0", "1 - P(A) >= 0"]

    def test_valid_and_facet(self):
        for n, d in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]:
            fl = enumerate_facets(n, d)
            for f in fl:
                assert is_valid(f)
                assert is_facet(f, fl.basis)

    def test_irredundant(self):
        # no facet is implied by the others: dropping it lets the LP go below 0
        fl = enumerate_facets(3, 2)
        terms = [t for t in fl.basis.terms if t]
        names = tuple(fl.basis.term_label(t) for t in terms)
        rows = [
            Row(tuple(f.coefficient(t) for t in terms), GE, f.constant, f.text()) for f in fl.facets
        ]
        for k, f in enumerate(fl.facets):
            others = tuple(r for j, r in enumerate(rows) if j != k)
            objective = tuple(f.coefficient(t) for t in terms)
            out = solve(LinearProgram(names, others, objective, "min"))
            assert not isinstance(out, Optimal) or out.value + f.constant < 0

    def test_non_facet(self):
        basis = MonotoneBasis(AtomSpace.of_size(2), 2)
        assert not is_facet(parse_inequality("1 - P(A&B) >= 0", ("A", "B")), basis)

    def test_deterministic_lines(self):
        assert enumerate_facets(3, 2).lines() == enumerate_facets(3, 2).lines()

    def test_guards(self):
        with pytest.raises(ResourceLimitError):
            enumerate_facets(5, 2)
        with pytest.raises(ValueError):
            enumerate_facets(2, 3)


class TestOracle:
    def test_frechet(self):
        kb = KnowledgeBase.from_strings(["A", "B"], [("A", F(2, 5)), ("B", F(4, 5))])
        out = oracle_bounds(kb, parse_expression("A & B"))
        assert isinstance(out, OracleInterval)
        assert (out.lo, out.hi) == (F(1, 5), F(2, 5))
        q = parse_expression("A & B")
        assert event_probability(out.witness_lo, q) == F(1, 5)
        assert event_probability(out.witness_hi, q) == F(2, 5)

    def test_triple(self):
        kb = KnowledgeBase.from_strings(
            ["A", "B", "C"],
            [("A", F(1, 2)), ("B", F(1, 2)), ("C", F(1, 2)), ("A&B", F(1, 4)), ("A&C", F(1, 4)), ("B&C", F(1, 4))],
        )
        out = oracle_bounds(kb, parse_expression("A & B & C"))
        assert (out.lo, out.hi) == (0, F(1, 4))

    def test_disjoint_infeasible(self):
        kb = KnowledgeBase.from_strings(
            ["A", "B", "C"],
            [("A", F(1, 2)), ("B", F(1, 2)), ("C", F(1, 2)), ("A&B", 0), ("A&C", 0), ("B&C", 0)],
        )
        assert isinstance(oracle_bounds(kb, parse_expression("A")), OracleInfeasible)

    def test_witnesses_satisfy_kb(self, rng):
        for _ in range(20):
            kb, query, _ = random_kb(rng, 3, 3)
            out = oracle_bounds(kb, query)
            assert isinstance(out, OracleInterval)
            for w, target in [(out.witness_lo, out.lo), (out.witness_hi, out.hi)]:
                assert w.is_probability()
                assert event_probability(w, query) == target
                for a in kb.assertions:
                    p = event_probability(w, a.event)
                    assert a.lower is None or p >= a.lower
                    assert a.upper is None or p <= a.upper

    def test_name_collision(self):
        space = AtomSpace(("A",))
        with pytest.raises(ValueError):
            build_atom_system(space, [(parse_expression("A"), "P(A)")])
