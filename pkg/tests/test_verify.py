import logging

import pytest

from conftest import CASE_ONE_WIDE
from systolizer.pipeline.config import RANK4_MARGIN, SIX_CYCLE_MARGIN
from systolizer.pipeline.errors import InputError, PreconditionError
from systolizer.tools.complex import CycleWitness, edge_depth, flag_span, original_subcomplex, vertex_depth
from systolizer.tools.coxeter import CoxeterSystem, build_coxeter_ball
from systolizer.tools.systolize import systolize_rank3, systolize_rank4
from systolizer.tools.verify import (
    VerificationReport, certified_pair, check_edge_links, check_full_six_cycles, check_new_edge_triangles,
    check_relation_lists, check_structural_rank3, check_structural_rank4, check_vertex_links,
    check_vertex_retraction, revalidate_witness,
)


class TestVertexLinks:
    def test_unsystolized_ball_fails_at_type_two_vertices(self, ball_236):
        report = check_vertex_links(ball_236, 6, 3)
        assert not report.passed
        centers = {v["center"][0] for v in report.violations}
        expected = {v for v in ball_236.vertices_of_type("2") if vertex_depth(ball_236, v) >= 3}
        assert centers == expected
        for violation in report.violations:
            assert violation["type"] == "2"
            assert violation["witness"]["length"] == 4
            assert revalidate_witness(ball_236, violation["witness"])

    def test_systolized_ball_passes(self, systolized_236):
        report = check_vertex_links(systolized_236, 6, 3)
        assert report.passed
        assert report.scanned > 0
        assert report.margin_used == 3

    def test_workers_do_not_change_the_result(self, ball_236):
        single = check_vertex_links(ball_236, 6, 3, workers=1)
        threaded = check_vertex_links(ball_236, 6, 3, workers=4)
        assert single.violations == threaded.violations
        assert single.scanned == threaded.scanned

    @pytest.mark.parametrize("exponents", [
        (2, 3, 6), (2, 3, 7), (2, 4, 6), (2, 5, 6), (2, 6, 6), (3, 3, 4), (3, 3, 3),
    ])
    def test_eligible_types_are_six_large(self, exponents):
        ball = build_coxeter_ball(CoxeterSystem.from_exponents(exponents), 7)
        assert check_vertex_links(systolize_rank3(ball), 6, 3).passed

    def test_forced_excluded_type_fails(self):
        ball = build_coxeter_ball(CoxeterSystem.triangle(2, 4, 4), 8)
        report = check_vertex_links(systolize_rank3(ball, force=True), 6, 2)
        assert not report.passed
        assert any(v["type"] == "m" for v in report.violations)

    def test_margin_must_be_positive(self, ball_236):
        with pytest.raises(PreconditionError):
            check_vertex_links(ball_236, 6, 0)


class TestWitnesses:
    def test_revalidate_rejects_chords_and_short_cycles(self, ball_236):
        assert not revalidate_witness(ball_236, CycleWitness(("2:e", "k:e", "m:e"), 3))
        assert not revalidate_witness(ball_236, {"vertices": ["k:e", "2:e", "m:e", "2:e"], "length": 4})
        assert not revalidate_witness(ball_236, {"vertices": ["x", "y", "z", "w"], "length": 4})

    def test_pairs_of_unjoined_types_are_certified(self, systolized_236):
        assert certified_pair(systolized_236, "2:e", "m:e")

    def test_boundary_pairs_are_not_certified(self, systolized_236):
        boundary = [v for v in systolized_236.vertices_of_type("k") if vertex_depth(systolized_236, v) < 1]
        assert len(boundary) >= 2
        assert not certified_pair(systolized_236, boundary[0], boundary[1])


class TestStructuralRank3:
    def test_ball_passes(self, ball_236):
        report = check_structural_rank3(ball_236, 3)
        assert report.passed
        assert report.scanned > 0

    def test_systolization_checks(self, ball_236, systolized_236):
        assert check_new_edge_triangles(ball_236, systolized_236).passed
        assert check_vertex_retraction(ball_236, systolized_236, 3).passed

    def test_full_six_cycles_on_a_deep_ball(self, system_236):
        deep = systolize_rank3(build_coxeter_ball(system_236, 13))
        report = check_full_six_cycles(deep, SIX_CYCLE_MARGIN)
        assert report.passed
        assert report.scanned > 0
        assert check_structural_rank3(original_subcomplex(deep), SIX_CYCLE_MARGIN).scanned > 0

    def test_empty_scan_is_logged(self, systolized_236, caplog):
        caplog.set_level(logging.WARNING, logger="systolizer.tools.verify")
        report = check_full_six_cycles(systolized_236, SIX_CYCLE_MARGIN)
        assert report.scanned == 0
        assert "nothing deep enough to scan" in caplog.text

    def test_duplicate_type_two_vertex_is_reported(self, ball_236):
        graph = ball_236.graph.copy()
        graph.add_node("2:dup", type="2", origin="original")
        graph.add_edges_from(("2:dup", n, {"origin": "original"}) for n in ball_236.neighbors("2:e"))
        metadata = dict(ball_236.metadata)
        metadata["depth"] = {**ball_236.metadata["depth"], "2:dup": ball_236.metadata["depth"]["2:e"]}
        report = check_structural_rank3(flag_span(graph, metadata), 3)
        assert not report.passed
        duplicates = [v for v in report.violations if v["check"] == "unique_type2_vertex"]
        assert duplicates
        assert all(v["type2_vertices"] == ["2:dup", "2:e"] for v in duplicates)

    def test_original_recovered_from_systolization(self, systolized_236):
        original = original_subcomplex(systolized_236)
        assert check_structural_rank3(original, 3).passed
        assert check_vertex_retraction(original, systolized_236, 3).passed

    def test_new_edge_triangles_detects_removed_edges(self, ball_236):
        smaller = ball_236.full_subcomplex([v for v in ball_236.vertices if v != "2:e"])
        report = check_new_edge_triangles(ball_236, smaller)
        assert not report.passed
        assert report.violations[0]["check"] == "removed"

    def test_needs_roles(self, case_one_ball):
        with pytest.raises(InputError):
            check_structural_rank3(case_one_ball, 3)


class TestRank4:
    def test_edge_links(self, case_one_systolized):
        report = check_edge_links(case_one_systolized, 6, 6)
        assert report.passed
        assert report.scanned >= 1

    def test_structural(self, case_one_ball):
        report = check_structural_rank4(case_one_ball, margin=6)
        assert report.passed
        assert report.scanned >= 1

    def test_relation_lists(self, case_one_ball):
        report = check_relation_lists(case_one_ball, 6)
        assert report.passed
        assert report.scanned >= 1

    def test_case_override_must_match(self, case_one_ball):
        with pytest.raises(InputError):
            check_structural_rank4(case_one_ball, "II", 6)

    def test_edge_links_need_rank_four(self, systolized_236):
        with pytest.raises(InputError):
            check_edge_links(systolized_236, 6, 3)

    def test_margin_must_be_positive(self, case_one_ball):
        with pytest.raises(PreconditionError):
            check_structural_rank4(case_one_ball, margin=0)


class TestReport:
    def test_to_dict(self):
        report = VerificationReport("vertex_links", scanned=3, margin_used=2, elapsed=1.23456)
        data = report.to_dict()
        assert set(data) == {"check_name", "scanned", "skipped_boundary", "violations", "margin_used", "passed"}
        assert data["passed"]
        assert report.to_dict(timing=True)["elapsed"] == 1.235

    def test_summary(self):
        report = VerificationReport("edge_links", violations=[{"check": "edge_link"}])
        assert not report.passed
        assert "1 violations" in report.summary()


class TestCaseTwo:
    @pytest.fixture(scope="class")
    def systolized(self, case_two_ball):
        return systolize_rank4(case_two_ball)

    def test_structural(self, case_two_ball):
        report = check_structural_rank4(case_two_ball, margin=6)
        assert report.passed
        assert report.scanned > 0

    def test_edge_links(self, systolized):
        assert systolized.metadata["case"] == "II"
        assert check_edge_links(systolized, 6, 6).passed


class TestAcquaintances:
    @pytest.fixture(scope="class")
    def ball(self):
        return build_coxeter_ball(CoxeterSystem.from_exponents(CASE_ONE_WIDE), 10)

    @pytest.fixture(scope="class")
    def systolized(self, ball):
        return systolize_rank4(ball)

    @pytest.fixture(scope="class")
    def deep_acquaintances(self, systolized):
        edges = (tuple(sorted(e)) for e, origin in systolized.edges.items() if origin == "acquaintance")
        return [e for e in edges if edge_depth(systolized, *e) >= RANK4_MARGIN]

    def test_acquaintance_edges_reach_the_margin(self, systolized, deep_acquaintances):
        assert systolized.metadata["added_edges"]["acquaintance"] > 0
        assert deep_acquaintances

    def test_acquaintance_edge_links_are_simplices(self, systolized, deep_acquaintances):
        report = check_edge_links(systolized, 6, RANK4_MARGIN)
        assert report.passed
        assert report.scanned > len(deep_acquaintances)

    def test_structural(self, ball, deep_acquaintances):
        # each deep acquaintance edge has a witness of the same depth, so its pair is scanned
        report = check_structural_rank4(ball, margin=RANK4_MARGIN)
        assert report.passed
        assert report.scanned >= len(deep_acquaintances)

    def test_relation_lists(self, ball, deep_acquaintances):
        report = check_relation_lists(ball, RANK4_MARGIN)
        assert report.passed
        assert report.scanned >= len(deep_acquaintances)
