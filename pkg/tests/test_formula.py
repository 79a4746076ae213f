import pytest
from hypothesis import given, settings, strategies as st

from probbounds.errors import ParseError, ResourceLimitError, UndeclaredVariableError
from probbounds.formula import (
    FALSE,
    TRUE,
    And,
    CnfFormula,
    CnfMode,
    Implies,
    Not,
    Or,
    Var,
    Xor,
    cnf_truth_mask,
    parse_expression,
    render,
    to_cnf,
    truth_mask,
    truth_table,
    variables_of,
)

A, B, C, D = Var("A"), Var("B"), Var("C"), Var("D")
NAMES = ["A", "B", "C", "D", "E", "F"]


def exprs(max_leaves=8):
    leaf = st.one_of(st.sampled_from([Var(n) for n in NAMES]), st.sampled_from([TRUE, FALSE]))

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(lambda p: And(*p)),
            st.tuples(children, children).map(lambda p: Or(*p)),
            st.tuples(children, children).map(lambda p: Implies(*p)),
            st.tuples(children, children).map(lambda p: Xor(*p)),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


class TestParse:
    def test_conjunction(self):
        assert parse_expression("A & B") == And(A, B)

    def test_negation(self):
        assert parse_expression("~A") == Not(A)

    def test_implication_grouping(self):
        assert parse_expression("A -> (B | C)") == Implies(A, Or(B, C))

    def test_precedence(self):
        assert parse_expression("A | B & C") == Or(A, And(B, C))
        assert parse_expression("~A & B") == And(Not(A), B)
        assert parse_expression("A -> B -> C") == Implies(A, Implies(B, C))
        assert parse_expression("A ^ B & C | D") == Or(Xor(A, And(B, C)), D)

    def test_nary_flattening(self):
        e = parse_expression("A & (B & C)")
        assert e == And(A, B, C)
        assert len(e.children) == 3

    def test_constants_and_comments(self):
        assert parse_expression("1 | A  # trailing") == Or(TRUE, A)
        assert parse_expression("0") == FALSE

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as info:
            parse_expression("A & & B")
        assert info.value.position == 4

    def test_unbalanced(self):
        with pytest.raises(ParseError):
            parse_expression("(A | B")

    def test_undeclared(self):
        with pytest.raises(UndeclaredVariableError) as info:
            parse_expression("A & Q", ["A", "B"])
        assert info.value.position == 4

    def test_nary_needs_two_children(self):
        with pytest.raises(ValueError):
            And(A)

    @settings(max_examples=150, deadline=None)
    @given(exprs())
    def test_render_round_trip(self, e):
        assert parse_expression(render(e)) == e


class TestCnf:
    def test_conjunction_splits(self):
        cnf = to_cnf(And(A, B))
        assert sorted(map(sorted, cnf.clauses)) == [[(0, True)], [(1, True)]]

    def test_xor(self):
        cnf = to_cnf(Xor(A, B))
        assert set(cnf.clauses) == {
            frozenset({(0, True), (1, True)}),
            frozenset({(0, False), (1, False)}),
        }

    def test_distribution(self):
        cnf = to_cnf(Or(And(A, B), And(C, D)), CnfMode.EQUIVALENT)
        assert str(cnf) == "(A | C) & (A | D) & (B | C) & (B | D)"
        order = ["A", "B", "C", "D"]
        assert (cnf_truth_mask(cnf, order) == truth_mask(Or(And(A, B), And(C, D)), order)).all()

    def test_tautology_and_contradiction(self):
        assert to_cnf(Or(A, Not(A))).clauses == ()
        assert to_cnf(And(A, Not(A))).clauses == (frozenset(),)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            CnfFormula(("A",), (frozenset({(0, True), (0, False)}),))
        with pytest.raises(ValueError):
            CnfFormula(("A",), (frozenset({(0, True)}), frozenset({(0, True)})))

    def test_equivalent_guard(self):
        big = Or(*(And(Var(f"x{i}"), Var(f"y{i}")) for i in range(9)))
        with pytest.raises(ResourceLimitError):
            to_cnf(big, CnfMode.EQUIVALENT)

    def test_wide_clause_passes_guard(self):
        wide = Or(*(Var(f"x{i}") for i in range(20)))
        assert len(to_cnf(wide, CnfMode.EQUIVALENT).clauses) == 1

    @settings(max_examples=150, deadline=None)
    @given(exprs(10))
    def test_equivalent_round_trip(self, e):
        cnf = to_cnf(e, CnfMode.EQUIVALENT, NAMES)
        assert (cnf_truth_mask(cnf, NAMES) == truth_mask(e, NAMES)).all()

    @settings(max_examples=100, deadline=None)
    @given(exprs(10))
    def test_definitional_unique_extension(self, e):
        cnf = to_cnf(e, CnfMode.DEFINITIONAL, NAMES)
        defs = CnfFormula(cnf.variables, cnf.definitional_clauses())
        root_only = CnfFormula(cnf.variables, cnf.root_clauses())
        n0, n = len(NAMES), len(cnf.variables)
        defs_mask = cnf_truth_mask(defs)
        root_mask = cnf_truth_mask(root_only)
        source = truth_mask(e, NAMES)
        for m in range(1 << n0):
            ext = [m | (k << n0) for k in range(1 << (n - n0))]
            good = [x for x in ext if defs_mask[x]]
            assert len(good) == 1
            # under the definitions the root clauses define the source event
            assert bool(root_mask[good[0]]) == bool(source[m])


class TestTruthTable:
    def test_conjunction(self):
        assert truth_table(And(A, B), ["A", "B"]).entries == (0, 0, 0, 1)

    def test_true(self):
        assert truth_table(TRUE, ["A"]).entries == (1, 1)

    def test_disjunction_three(self):
        assert truth_table(Or(A, B), ["A", "B", "C"]).entries == (0, 1, 1, 1, 0, 1, 1, 1)

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            truth_mask(A, [f"v{i}" for i in range(25)] + ["A"])

    def test_missing_variable(self):
        with pytest.raises(ValueError):
            truth_mask(And(A, B), ["A"])

    def test_variables_in_order(self):
        assert variables_of(parse_expression("C | A & ~B | C")) == ("C", "A", "B")

    def test_exhaustive_small(self):
        e = parse_expression("(A -> B) ^ C")
        mask = truth_mask(e, ["A", "B", "C"])
        for m in range(8):
            a, b, c = m & 1, (m >> 1) & 1, (m >> 2) & 1
            assert bool(mask[m]) == (((not a) or b) != bool(c))
