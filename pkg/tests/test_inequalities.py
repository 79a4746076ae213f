import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from probbounds.errors import ParseError, ResourceLimitError
from probbounds.inequalities import (
    Invalid,
    LinearInequality,
    OutOfSubspace,
    SymmetricSpec,
    Valid,
    compound,
    escalator_lift,
    flip_transform,
    generate_family,
    is_valid,
    iter_family,
    negate_variable,
    negate_variables,
    parity_check,
    parse_inequality,
    permute_variables,
    signed_symmetric_inequality,
    synthesize,
)

from conftest import PAIR_FACETS, TRIPLE_FACETS

AB = ("A", "B")
ABC = ("A", "B", "C")


def ineq(text, names=AB):
    return parse_inequality(text, names)


def atoms_with_weight(n, ks):
    return frozenset(m for m in range(1 << n) if bin(m).count("1") in ks)


class TestText:
    def test_round_trip(self):
        for t in PAIR_FACETS:
            assert ineq(t).text() == t
        for t in TRIPLE_FACETS:
            assert parse_inequality(t, ABC).text() == t

    def test_fractions_and_multiples(self):
        i = parse_inequality("1/2 - 3*P(A) + 2/3*P(A&B) >= 0", AB)
        assert i.coefficient(()) == Fraction(1, 2)
        assert i.coefficient((0, 1)) == Fraction(2, 3)
        assert i.text() == "1/2 - 3*P(A) + 2/3*P(A&B) >= 0"

    def test_order_free_labels(self):
        assert ineq("P(B&A) >= 0") == ineq("P(A&B) >= 0")

    def test_errors(self):
        with pytest.raises(ParseError):
            parse_inequality("P(A) <= 1")
        with pytest.raises(ParseError):
            parse_inequality("P(A) P(B) >= 0")
        with pytest.raises(ParseError):
            parse_inequality("P(Z) >= 0", AB)

    def test_equality_ignores_variable_order(self):
        assert ineq("P(A) - P(A&B) >= 0") == parse_inequality("P(A) - P(A&B) >= 0", ("B", "A"))


class TestValidity:
    def test_frechet_lower(self):
        v = is_valid(ineq("1 - P(A) - P(B) + P(A&B) >= 0"))
        assert isinstance(v, Valid)
        assert v.tight == frozenset({1, 2, 3})

    def test_invalid(self):
        v = is_valid(ineq("1 - P(A) - P(B) >= 0"))
        assert isinstance(v, Invalid)
        assert v.witness == 3 and v.value == -1

    def test_trivial(self):
        v = is_valid(LinearInequality(AB, {(): 1}))
        assert v and v.tight == frozenset()

    def test_guard(self):
        names = tuple(f"v{i}" for i in range(21))
        with pytest.raises(ResourceLimitError):
            is_valid(LinearInequality(names, {(): 1}))

    def test_vertex_values_match_atoms(self):
        i = parse_inequality("P(A) - P(A&B) - P(A&C) + P(B&C) >= 0", ABC)
        assert i.vertex_values() == [i.value_at_atom(m) for m in range(8)]


class TestSymmetric:
    def test_parity_pass(self):
        p = parity_check(SymmetricSpec(2, (1, 2)))
        assert p.status == "pass" and p.values == (2, 0, 0) and p.sign == 1

    def test_parity_fail(self):
        p = parity_check(SymmetricSpec(3, (1, 3)))
        assert p.status == "fail"
        assert p.values[0] == 3 and p.values[2] == -1

    def test_parity_negative(self):
        p = parity_check(SymmetricSpec(1, (0,)))
        assert p.status == "pass" and p.values == (0, -1) and p.sign == -1

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SymmetricSpec(2, (2, 1))
        with pytest.raises(ValueError):
            SymmetricSpec(2, (3,))

    def test_synthesize_pair(self):
        assert synthesize(SymmetricSpec(2, (1, 2))) == ineq(PAIR_FACETS[0])

    def test_synthesize_triple(self):
        assert synthesize(SymmetricSpec(3, (1, 2))) == parse_inequality(TRIPLE_FACETS[12], ABC)

    def test_synthesize_single(self):
        assert synthesize(SymmetricSpec(1, (1,))).text() == "1 - P(A) >= 0"

    def test_synthesize_rejects_failure(self):
        with pytest.raises(ValueError):
            synthesize(SymmetricSpec(3, (1, 3)))

    def test_tightness(self):
        for n in range(1, 9):
            for size in range(1, n + 2):
                for consts in itertools.combinations(range(n + 1), size):
                    spec = SymmetricSpec(n, consts)
                    if parity_check(spec).status != "pass":
                        continue
                    v = is_valid(synthesize(spec))
                    assert v, spec
                    assert v.tight == atoms_with_weight(n, consts), spec

    def test_parity_necessity(self):
        failures = 0
        for n in range(1, 7):
            for size in range(1, n + 2):
                for consts in itertools.combinations(range(n + 1), size):
                    spec = SymmetricSpec(n, consts)
                    if parity_check(spec).status == "fail":
                        failures += 1
                        assert not is_valid(signed_symmetric_inequality(spec)), spec
        assert failures > 0


class TestSymmetries:
    def test_negate(self):
        base = ineq(PAIR_FACETS[0])
        assert negate_variable(base, "A") == ineq("P(A) - P(A&B) >= 0")
        assert negate_variables(base, ["A", "B"]) == ineq("P(A&B) >= 0")
        assert negate_variable(negate_variable(base, "A"), "A") == base

    def test_negation_orbit(self):
        base = synthesize(SymmetricSpec(2, (1, 2)))
        orbit = {negate_variables(base, s) for s in [(), ("A",), ("B",), ("A", "B")]}
        assert orbit == {ineq(t) for t in PAIR_FACETS}

    def test_permute(self):
        assert permute_variables(ineq("P(A) - P(A&B) >= 0"), {"A": "B", "B": "A"}) == ineq("P(B) - P(A&B) >= 0")
        i = ineq(PAIR_FACETS[1])
        assert permute_variables(i, {}) == i
        with pytest.raises(ValueError):
            permute_variables(i, {"A": "B"})

    def test_cyclic_family(self):
        eq8 = {parse_inequality(t, ABC) for t in ["P(A) - P(A&B) >= 0", "P(B) - P(B&C) >= 0", "P(C) - P(A&C) >= 0"]}
        eq9 = {parse_inequality(t, ABC) for t in ["P(B) - P(A&B) >= 0", "P(C) - P(B&C) >= 0", "P(A) - P(A&C) >= 0"]}
        cyc = {"A": "B", "B": "C", "C": "A"}
        assert {permute_variables(i, cyc) for i in eq8} == eq8
        swap = {"A": "B", "B": "A"}
        assert {permute_variables(i, swap) for i in eq8} == eq9

    def test_flip(self):
        out = flip_transform(ineq("P(A) - P(A&B) >= 0"), [0, 2, 1, 3])
        assert out == ineq("P(B) - P(A&B) >= 0")
        i = ineq(PAIR_FACETS[0])
        assert flip_transform(i, [0, 1, 2, 3]) == i

    def test_flip_group_on_facets(self):
        facets = {ineq(t) for t in PAIR_FACETS}
        for perm in itertools.permutations(range(4)):
            assert {flip_transform(f, perm) for f in facets} == facets

    def test_flip_out_of_subspace(self):
        i = parse_inequality("1 - P(A) >= 0", ABC)
        perm = list(range(8))
        perm[0], perm[7] = perm[7], perm[0]
        moved = flip_transform(i, perm)
        assert is_valid(moved)
        assert flip_transform(i, perm, max_degree=1) == OutOfSubspace(moved.degree)

    def test_compound(self):
        a = LinearInequality(("A",), {(0,): 1})
        b = LinearInequality(("B",), {(): 1, (0,): -1})
        assert compound(a, b) == ineq("P(A) - P(A&B) >= 0")
        s1 = synthesize(SymmetricSpec(1, (1,)), ["A"])
        s2 = synthesize(SymmetricSpec(1, (1,)), ["B"])
        assert compound(s1, s2) == ineq(PAIR_FACETS[0])

    def test_compound_identity_is_lift(self):
        i = ineq(PAIR_FACETS[0])
        one = LinearInequality(("C",), {(): 1})
        assert compound(i, one) == escalator_lift(i, ["C"])

    def test_compound_commutes(self):
        a = parse_inequality("P(A) - P(A&B) >= 0", AB)
        b = parse_inequality("1 - P(C) >= 0", ("C",))
        assert compound(a, b) == compound(b, a)

    def test_compound_overlap(self):
        with pytest.raises(ValueError):
            compound(ineq(PAIR_FACETS[0]), ineq(PAIR_FACETS[1]))

    def test_lift(self):
        i = ineq(PAIR_FACETS[3])
        lifted = escalator_lift(i, ["C"])
        assert lifted.variables == ABC and is_valid(lifted)
        assert escalator_lift(i, []) == i
        assert escalator_lift(ineq(PAIR_FACETS[0]), ["C"]) == parse_inequality(TRIPLE_FACETS[0], ABC)
        with pytest.raises(ValueError):
            escalator_lift(i, ["A"])


def random_valid(n, draw_coeffs):
    """Shift an arbitrary form by its minimum vertex value to make it valid."""
    names = tuple("ABCDEF"[:n])
    terms = [t for k in range(n + 1) for t in itertools.combinations(range(n), k)]
    i = LinearInequality(names, dict(zip(terms, draw_coeffs)))
    low = min(i.vertex_values(), default=0)
    return LinearInequality(names, {**i.coeffs, (): i.constant - min(low, 0)})


coeff_lists = st.lists(st.integers(-4, 4), min_size=8, max_size=8)


class TestSoundnessProperties:
    @settings(max_examples=60, deadline=None)
    @given(coeff_lists, st.permutations(["A", "B", "C"]), st.sets(st.sampled_from("ABC")))
    def test_symmetries_preserve_validity(self, coeffs, perm, negs):
        i = random_valid(3, coeffs)
        assert is_valid(i)
        assert is_valid(permute_variables(i, dict(zip(ABC, perm))))
        assert is_valid(negate_variables(i, sorted(negs)))
        assert is_valid(escalator_lift(i, ["D", "E"]))
        other = LinearInequality(("D",), {(): 1, (0,): -1})
        assert is_valid(compound(i, other))

    @settings(max_examples=40, deadline=None)
    @given(coeff_lists, st.permutations(range(8)))
    def test_flip_preserves_validity(self, coeffs, perm):
        i = random_valid(3, coeffs)
        out = flip_transform(i, perm)
        assert is_valid(out)
        assert sorted(out.vertex_values()) == sorted(i.vertex_values())


class TestFamily:
    def test_pair(self):
        fam = generate_family(2, 2, 4)
        assert set(fam) == {ineq(t) for t in PAIR_FACETS}

    def test_triple_prefix(self):
        fam = generate_family(3, 2, 16)
        assert set(fam) == {parse_inequality(t, ABC) for t in TRIPLE_FACETS}

    def test_prefix_deterministic(self):
        a = generate_family(4, 2, 50)
        b = generate_family(4, 2, 80)
        assert b[:50] == a
        assert [x.text() for x in a] == [x.text() for x in generate_family(4, 2, 50)]

    def test_no_duplicates(self):
        fam = generate_family(4, 3, 500)
        assert len(set(fam)) == len(fam)

    def test_degree_bound(self):
        assert all(i.degree <= 2 for i in generate_family(5, 2, 200))

    def test_degree_too_large(self):
        with pytest.raises(ValueError):
            generate_family(2, 3, 10)

    def test_names(self):
        fam = generate_family(2, 2, 4, variables=["x", "y"])
        assert all(i.variables == ("x", "y") for i in fam)

    def test_stream_is_lazy(self):
        first = next(iter_family(6, 3))
        assert is_valid(first)

    @pytest.mark.parametrize("n,d,count", [(3, 1, 6), (3, 3, 8), (4, 2, 56), (4, 3, 64), (4, 4, 16)])
    def test_small_facets_covered(self, n, d, count):
        from probbounds.projection import enumerate_facets

        facets = enumerate_facets(n, d).facets
        assert len(facets) == count
        fam = set(generate_family(n, d, 10_000))
        assert set(facets) <= fam
