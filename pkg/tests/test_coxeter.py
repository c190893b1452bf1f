import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import PROPERTY_SETTINGS
from systolizer.pipeline.errors import EligibilityError, InputError, ResourceLimitError
from systolizer.tools.coxeter import (
    CoxeterBall, CoxeterSystem, build_coxeter_ball, check_rank3_eligible, check_rank4_eligible,
    coset_id, min_coset_rep, parse_exponent, parse_word, rank3_roles, special_subgroup_longest,
    tits_reduce, vertex_depth, word_length, word_to_str,
)


def bfs_ball_size(system, radius):
    """Count elements of length <= radius by breadth-first search over reduced words."""
    seen = {()}
    frontier = [()]
    for _ in range(radius):
        layer = []
        for word in frontier:
            for g in range(system.rank):
                reduced = tits_reduce(word + (g,), system)
                if len(reduced) == len(word) + 1 and reduced not in seen:
                    seen.add(reduced)
                    layer.append(reduced)
        frontier = layer
    return len(seen)


@st.composite
def rank3_words(draw, max_size=6):
    letters = draw(st.lists(st.sampled_from(["r", "s", "t"]), max_size=max_size))
    return "".join(letters)


class TestCoxeterSystem:
    def test_triangle_exponent_positions(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        # m(s,t)=l, m(r,t)=k, m(r,s)=m
        assert system.m(1, 2) == 2
        assert system.m(0, 2) == 3
        assert system.m(0, 1) == 6
        assert [system.type_order(t) for t in "2km"] == [2, 3, 6]

    def test_tetrahedral_edge_labels(self):
        system = CoxeterSystem.tetrahedral(2, 6, 3, 3, 6, 4)
        assert system.edge_label("a", "b") == 2
        assert system.edge_label("c", "d") == 4
        assert system.input_values() == (2, 6, 3, 3, 6, 4)

    def test_from_exponents_wrong_count(self):
        with pytest.raises(InputError):
            CoxeterSystem.from_exponents([2, 3])

    def test_rejects_exponent_below_two(self):
        with pytest.raises(InputError):
            CoxeterSystem.triangle(1, 3, 6)

    def test_dict_round_trip(self):
        system = CoxeterSystem.tetrahedral(2, 6, 3, 3, 6, "inf")
        assert CoxeterSystem.from_dict(system.to_dict()) == system
        assert not system.is_finite_type

    def test_parse_exponent(self):
        assert parse_exponent("inf") == math.inf
        assert parse_exponent("7") == 7
        assert parse_exponent(4.0) == 4
        with pytest.raises(InputError):
            parse_exponent("seven")
        with pytest.raises(InputError):
            parse_exponent(2.5)

    def test_describe(self):
        assert CoxeterSystem.triangle(2, 3, 6).describe() == "2,3,6"


class TestWords:
    def test_commuting_generators_cancel(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert tits_reduce("sts", system) == (2,)

    def test_braid_relation_gives_identity(self):
        system = CoxeterSystem.triangle(3, 3, 3)
        assert tits_reduce("ststst", system) == ()
        assert word_to_str(tits_reduce("ststst", system), system) == "e"

    def test_shortlex_picks_least_word(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert tits_reduce("ts", system) == (1, 2)
        assert word_to_str((1, 2), system) == "s.t"

    def test_dotted_and_index_words(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert parse_word("r.s.t", system) == parse_word("rst", system) == parse_word([0, 1, 2], system)
        assert parse_word("e", system) == ()

    def test_invalid_generator(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        with pytest.raises(InputError):
            parse_word("rx", system)
        with pytest.raises(InputError):
            parse_word([5], system)

    def test_min_coset_rep(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert min_coset_rep("ts", [1], system) == (2,)
        assert coset_id("ts", [1], system).min_rep == (2,)

    def test_min_coset_rep_rejects_whole_group(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        with pytest.raises(InputError):
            min_coset_rep("r", [0, 1, 2], system)

    def test_word_length(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert word_length("rr", system) == 0
        assert word_length("rsrsrs", system) == 6

    @PROPERTY_SETTINGS
    @given(word=rank3_words())
    def test_word_times_inverse_is_identity(self, word):
        system = CoxeterSystem.triangle(2, 3, 7)
        assert tits_reduce(word + word[::-1], system) == ()

    @PROPERTY_SETTINGS
    @given(word=rank3_words())
    def test_reduction_is_idempotent_and_keeps_parity(self, word):
        system = CoxeterSystem.triangle(2, 4, 6)
        reduced = tits_reduce(word, system)
        assert tits_reduce(reduced, system) == reduced
        assert len(reduced) <= len(word)
        assert len(reduced) % 2 == len(word) % 2

    @PROPERTY_SETTINGS
    @given(word=rank3_words(max_size=8), generator=st.integers(min_value=0, max_value=2))
    def test_length_changes_by_one(self, word, generator):
        system = CoxeterSystem.triangle(2, 3, 7)
        reduced = tits_reduce(word, system)
        assert abs(len(tits_reduce(reduced + (generator,), system)) - len(reduced)) == 1

    @pytest.mark.parametrize("pair, order", [((0, 2), 6), ((1, 2), 4)])
    def test_dihedral_subgroup_order(self, pair, order):
        system = CoxeterSystem.triangle(2, 3, 6)
        elements = {()}
        for size in range(1, order + 1):
            for word in product(pair, repeat=size):
                elements.add(tits_reduce(word, system))
        assert len(elements) == order

    def test_same_coset_iff_same_rep(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        # ts = t·s lies in tW_{s}, rs does not
        assert min_coset_rep("t", [1], system) == min_coset_rep("ts", [1], system)
        assert min_coset_rep("t", [1], system) != min_coset_rep("rs", [1], system)


class TestSpecialSubgroups:
    def test_dihedral(self):
        system = CoxeterSystem.triangle(2, 3, 6)
        assert special_subgroup_longest(system, frozenset({0, 1})) == 6
        assert special_subgroup_longest(system, frozenset({1, 2})) == 2
        assert special_subgroup_longest(system, frozenset({0})) == 1

    def test_euclidean_triangle_is_infinite(self):
        assert special_subgroup_longest(CoxeterSystem.triangle(2, 3, 6), frozenset({0, 1, 2})) is None

    def test_finite_triangle(self):
        # H3 has order 120, longest element of length 15
        assert special_subgroup_longest(CoxeterSystem.triangle(2, 3, 5), frozenset({0, 1, 2})) == 15


class TestEligibility:
    def test_rank3_roles(self):
        assert rank3_roles(CoxeterSystem.triangle(2, 3, 6)) == {"2": "2", "k": "k", "m": "m"}
        assert rank3_roles(CoxeterSystem.triangle(6, 2, 3)) == {"2": "2", "k": "k", "m": "m"}

    @pytest.mark.parametrize("exponents, names", [
        ((2, 3, 6), ("2", "k", "m")),
        ((3, 2, 6), ("k", "2", "m")),
        ((6, 2, 3), ("m", "2", "k")),
        ((2, 6, 6), ("2", "k", "m")),
        ((4, 3, 3), ("m", "2", "k")),
    ])
    def test_rank3_types_are_named_by_role(self, exponents, names):
        system = CoxeterSystem.from_exponents(exponents)
        assert system.type_names == names
        assert system.input_values() == exponents

    def test_type_two_vertex_has_order_two(self):
        ball = build_coxeter_ball(CoxeterSystem.from_exponents((3, 2, 6)), 0)
        assert ball.metadata["type_orders"] == {"k": 3, "2": 2, "m": 6}
        assert ball.metadata["roles"] == {"2": "2", "k": "k", "m": "m"}
        assert ball.type_of("2:e") == "2"

    def test_matrix_input_gets_role_names(self):
        system = CoxeterSystem.from_dict({"exponents": [[1, 6, 2], [6, 1, 3], [2, 3, 1]]})
        assert system.type_names == ("k", "2", "m")
        assert CoxeterSystem.from_dict(system.to_dict()) == system

    def test_rank3_kinds(self):
        assert check_rank3_eligible(CoxeterSystem.triangle(2, 3, 6)) == "two"
        assert check_rank3_eligible(CoxeterSystem.triangle(3, 3, 4)) == "all_geq_3"

    @pytest.mark.parametrize("exponents", [(2, 4, 4), (2, 4, 5), (2, 5, 5), (2, 2, 7), (2, 3, 5), (2, 3, "inf")])
    def test_rank3_rejected(self, exponents):
        with pytest.raises(EligibilityError):
            check_rank3_eligible(CoxeterSystem.from_exponents(exponents))

    def test_rank4_accepts_cases(self):
        check_rank4_eligible(CoxeterSystem.from_exponents((2, 6, 3, 3, 6, 3)))
        check_rank4_eligible(CoxeterSystem.from_exponents((3, 3, 3, 3, 3, 3)))

    @pytest.mark.parametrize("exponents", [
        (2, 2, 3, 3, 6, 6),      # two exponents 2
        (2, 3, 3, 3, 3, 3),      # finite vertex stabilizer (2,3,3)
        (2, 4, 4, 3, 6, 3),      # vertex a has excluded type (2,4,4)
    ])
    def test_rank4_rejected(self, exponents):
        with pytest.raises(EligibilityError):
            check_rank4_eligible(CoxeterSystem.from_exponents(exponents))


class TestCoxeterBall:
    def test_radius_zero(self, system_236):
        ball = build_coxeter_ball(system_236, 0)
        assert len(ball.metadata["chambers"]) == 1
        assert sorted(ball.vertices) == ["2:e", "k:e", "m:e"]
        assert len(ball.edges) == 3

    def test_radius_zero_vertices_are_on_the_boundary(self, system_236):
        ball = build_coxeter_ball(system_236, 0)
        assert all(vertex_depth(ball, v) == 0 for v in ball.vertices)

    def test_radius_one(self, system_236):
        ball = build_coxeter_ball(system_236, 1)
        assert len(ball.metadata["chambers"]) == 4
        assert sorted(ball.vertices) == ["2:e", "2:r", "k:e", "k:s", "m:e", "m:t"]
        assert len(ball.edges) == 9

    @pytest.mark.parametrize("exponents, radius", [
        ((2, 3, 6), 5), ((3, 3, 4), 5), ((2, 4, 6), 4), ((2, 6, 3, 3, 6, 3), 4),
    ])
    def test_size_matches_breadth_first_search(self, exponents, radius):
        system = CoxeterSystem.from_exponents(exponents)
        assert len(CoxeterBall(system, radius)) == bfs_ball_size(system, radius)

    def test_words_are_normal_forms(self, system_236):
        ball = CoxeterBall(system_236, 6)
        assert len(set(ball.words)) == len(ball.words)
        for word, length in zip(ball.words, ball.lengths):
            assert tits_reduce(word, system_236) == word
            assert len(word) == length

    @PROPERTY_SETTINGS
    @given(word=rank3_words())
    def test_element_lookup_matches_reduction(self, word):
        system = CoxeterSystem.triangle(2, 3, 6)
        ball = CoxeterBall(system, 6)
        assert ball.words[ball.element(word)] == tits_reduce(word, system)

    def test_node_budget(self, system_236):
        with pytest.raises(ResourceLimitError):
            build_coxeter_ball(system_236, 20, node_budget=10)

    def test_negative_radius(self, system_236):
        with pytest.raises(InputError):
            build_coxeter_ball(system_236, -1)

    def test_infinite_exponent_rejected(self):
        with pytest.raises(EligibilityError):
            CoxeterBall(CoxeterSystem.triangle(2, 3, "inf"), 2)

    def test_depth_tables(self, ball_236):
        assert ball_236.metadata["depth"]["2:e"] == 7
        assert ball_236.metadata["depth"]["k:e"] == 6
        assert ball_236.metadata["depth"]["m:e"] == 3
        assert ball_236.metadata["roles"] == {"2": "2", "k": "k", "m": "m"}
        assert ball_236.metadata["infinite_types"] == []
        assert vertex_depth(ball_236, "m:e") == 3

    def test_rank4_vertices_have_infinite_stabilizers(self, case_one_ball):
        assert case_one_ball.metadata["infinite_types"] == ["a", "b", "c", "d"]
        assert case_one_ball.metadata["depth"]["c:e"] == 8
        assert case_one_ball.metadata["edge_labels"]["ab"] == 2

    def test_build_is_deterministic(self, system_236):
        assert build_coxeter_ball(system_236, 4).to_dict() == build_coxeter_ball(system_236, 4).to_dict()

    def test_ball_is_a_valid_flag_complex(self, ball_236):
        ball_236.validate()
        assert ball_236.dimension() == 2
