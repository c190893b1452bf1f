"""
Exhaustive local checks on finite balls.

Every check scans only objects deep enough inside the ball (the margin) and
reports a witness only when each of its non-adjacencies is certified, i.e.
could not be an artifact of truncation. Uncertified witnesses are counted in
skipped_boundary.
"""

import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from systolizer.pipeline.config import DEFAULT_K, DEFAULT_WORKERS, RANK3_MARGIN, RANK4_MARGIN, SIX_CYCLE_MARGIN
from systolizer.pipeline.errors import InputError, PreconditionError
from systolizer.tools.complex import (
    INFINITE_K, CycleWitness, TypedComplex, edge_depth, edge_star_complete, full_cycles, link,
    star_complete, vertex_depth,
)
from systolizer.tools.systolize import (
    CaseLabel, check_collapse_hypothesis, classify_case, explicit_new_edges, find_relations, system_of,
)

logger = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    check_name: str
    scanned: int = 0
    skipped_boundary: int = 0
    violations: List[dict] = field(default_factory=list)
    margin_used: int = 0
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, timing: bool = False) -> dict:
        """Canonical form; wall-clock time is only included when asked for."""
        data = {
            "check_name": self.check_name,
            "scanned": self.scanned,
            "skipped_boundary": self.skipped_boundary,
            "violations": self.violations,
            "margin_used": self.margin_used,
            "passed": self.passed,
        }
        if timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data

    def summary(self) -> str:
        status = "passed" if self.passed else f"{len(self.violations)} violations"
        return (f"[{self.check_name}] scanned {self.scanned}, skipped {self.skipped_boundary} "
                f"at boundary, margin {self.margin_used}, {self.elapsed:.2f}s: {status}")


def _require_margin(margin: int):
    if margin < 1:
        raise PreconditionError(f"margin must be >= 1, got {margin}")


def _run(items: Sequence, fn: Callable, workers: int) -> List:
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def finish_report(report: VerificationReport, started: float, structural: bool = False) -> VerificationReport:
    report.elapsed = time.perf_counter() - started
    if report.violations and structural:
        for violation in report.violations:
            logger.error(f"[{report.check_name}] {violation}")
    if report.scanned == 0:
        logger.warning(f"[{report.check_name}] nothing deep enough to scan at margin {report.margin_used}")
    if report.skipped_boundary:
        logger.warning(f"[{report.check_name}] {report.skipped_boundary} witnesses suppressed near the boundary")
    logger.info(report.summary())
    return report


# Witness certification

def certified_pair(complex_: TypedComplex, x: str, y: str) -> bool:
    """Whether the non-adjacency of x and y holds in the untruncated complex."""
    joined = complex_.metadata.get("joined_types", [])
    tx = complex_.type_of(x)
    if tx != complex_.type_of(y) or tx not in joined:
        return True
    if max(vertex_depth(complex_, x), vertex_depth(complex_, y)) < 1:
        return False
    common = complex_.neighbors(x) & complex_.neighbors(y)
    for witness_types in complex_.metadata.get("witness_types", {}).get(tx, []):
        if len(witness_types) == 1:
            for z in common:
                if complex_.type_of(z) == witness_types[0] and not star_complete(complex_, z):
                    return False
        else:
            wanted = frozenset(witness_types)
            for p, q in combinations(sorted(common), 2):
                if (complex_.adjacent(p, q)
                        and frozenset((complex_.type_of(p), complex_.type_of(q))) == wanted
                        and not edge_star_complete(complex_, p, q)):
                    return False
    return True


def certified_cycle(complex_: TypedComplex, cycle: Sequence[str]) -> bool:
    n = len(cycle)
    for i, j in combinations(range(n), 2):
        if j - i in (1, n - 1):
            continue
        if not certified_pair(complex_, cycle[i], cycle[j]):
            return False
    return True


def _certified_link_witness(complex_: TypedComplex, sigma: Sequence[str], k: float,
                            context: str) -> Tuple[Optional[CycleWitness], bool, TypedComplex]:
    sub = link(complex_, sigma)
    bound = len(sub.vertices) if k == INFINITE_K else int(k) - 1
    if bound < 4:
        return None, False, sub
    skipped = False
    for cycle in full_cycles(sub, bound):
        if certified_cycle(complex_, cycle):
            return CycleWitness(tuple(cycle), len(cycle), context), False, sub
        skipped = True
    return None, skipped, sub


def revalidate_witness(complex_: TypedComplex, witness: Union[CycleWitness, dict]) -> bool:
    """Independent recheck: distinct vertices, consecutive ones adjacent, all others non-adjacent."""
    if isinstance(witness, dict):
        witness = CycleWitness(tuple(witness["vertices"]), int(witness["length"]), witness.get("context", ""))
    cycle = list(witness.vertices)
    n = len(cycle)
    if n < 4 or n != witness.length or len(set(cycle)) != n:
        return False
    if any(v not in complex_.vertices for v in cycle):
        return False
    for i, j in combinations(range(n), 2):
        consecutive = j - i in (1, n - 1)
        if complex_.adjacent(cycle[i], cycle[j]) != consecutive:
            return False
    return True


# Link checks

def check_vertex_links(complex_: TypedComplex, k: float = DEFAULT_K, margin: int = RANK3_MARGIN,
                       workers: int = DEFAULT_WORKERS) -> VerificationReport:
    """
    Run the k-largeness test on the link of every vertex of depth >= margin.

    Args:
        complex_: ball or systolized ball
        k: largeness to test (INFINITE_K allowed)
        margin: minimal vertex depth for a vertex to be scanned
        workers: thread count for the per-vertex scan

    Returns:
        VerificationReport with one violation per vertex whose link has a certified full cycle
    """
    _require_margin(margin)
    started = time.perf_counter()
    report = VerificationReport("vertex_links", margin_used=margin)
    centers = [v for v in sorted(complex_.vertices) if vertex_depth(complex_, v) >= margin]

    def scan(v):
        return _certified_link_witness(complex_, [v], k, f"link of {v}")[:2]

    for v, (witness, skipped) in zip(centers, _run(centers, scan, workers)):
        report.scanned += 1
        if witness is not None:
            report.violations.append({
                "check": "vertex_link", "center": [v], "type": complex_.type_of(v), "witness": witness.to_dict(),
            })
            logger.debug(f"[vertex_links] {v}: full {witness.length}-cycle {list(witness.vertices)}")
        elif skipped:
            report.skipped_boundary += 1
    return finish_report(report, started)


def _case_and_roles(complex_: TypedComplex):
    if "case" in complex_.metadata and "case_roles" in complex_.metadata:
        return CaseLabel(complex_.metadata["case"]), complex_.metadata["case_roles"]
    return classify_case(system_of(complex_))


def expected_edge_link(complex_: TypedComplex, u: str, v: str, case: CaseLabel, roles: Dict[str, str]) -> str:
    """One of "simplex", "infinite", "large" for the link of the edge uv."""
    origin = complex_.edge_origin(u, v)
    if origin == "acquaintance":
        return "simplex"
    if origin == "friend":
        return "infinite"
    if case != CaseLabel.ALL_GEQ_3:
        types = frozenset((complex_.type_of(u), complex_.type_of(v)))
        if types == frozenset((roles["a"], roles["b"])):
            return "simplex"
        if types == frozenset((roles["a"], roles["d"])):
            return "infinite"
    return "large"


def check_edge_links(complex_: TypedComplex, k: float = DEFAULT_K, margin: int = RANK4_MARGIN,
                     workers: int = DEFAULT_WORKERS) -> VerificationReport:
    """
    Check links of edges of depth >= margin in a rank 4 systolized ball against their expected shape.

    ab edges and acquaintance edges must have a simplex as link, ad edges and
    friend edges an infinitely large link, every other edge a k-large link.
    """
    _require_margin(margin)
    if complex_.metadata.get("rank") != 4:
        raise InputError("edge link classification needs a rank 4 complex")
    started = time.perf_counter()
    report = VerificationReport("edge_links", margin_used=margin)
    case, roles = _case_and_roles(complex_)
    edges = sorted(tuple(sorted(e)) for e in complex_.edges)
    edges = [e for e in edges if edge_depth(complex_, *e) >= margin]

    def scan(edge):
        u, v = edge
        shape = expected_edge_link(complex_, u, v, case, roles)
        context = f"link of {u}-{v} ({shape})"
        if shape == "simplex":
            sub = link(complex_, edge)
            skipped = False
            for x, y in combinations(sorted(sub.vertices), 2):
                if sub.adjacent(x, y):
                    continue
                if certified_pair(complex_, x, y):
                    return shape, {"pair": [x, y]}, False
                skipped = True
            return shape, None, skipped
        witness, skipped, _ = _certified_link_witness(complex_, edge, INFINITE_K if shape == "infinite" else k, context)
        return shape, ({"witness": witness.to_dict()} if witness else None), skipped

    for edge, (shape, found, skipped) in zip(edges, _run(edges, scan, workers)):
        report.scanned += 1
        if found is not None:
            report.violations.append({"check": "edge_link", "edge": list(edge), "expected": shape, **found})
        elif skipped:
            report.skipped_boundary += 1
    return finish_report(report, started)


# Structural checks

def _roles_rank3(ball: TypedComplex) -> Dict[str, str]:
    roles = ball.metadata.get("roles")
    if ball.metadata.get("rank") != 3 or not roles:
        raise InputError("structural rank 3 checks need a rank 3 ball with type roles")
    return roles


def check_structural_rank3(ball: TypedComplex, margin: int = RANK3_MARGIN) -> VerificationReport:
    """
    Around every interior type-2 vertex w with type-k neighbours v, v':
    w is the only type-2 vertex adjacent to both, every type-m vertex adjacent to
    both is adjacent to w, and no 6-cycle alternates between types 2 and k.
    """
    _require_margin(margin)
    roles = _roles_rank3(ball)
    started = time.perf_counter()
    report = VerificationReport("structural_rank3", margin_used=margin)
    two, kk, mm = roles["2"], roles["k"], roles["m"]

    def original_neighbors(x, type_name):
        return {n for n in ball.neighbors(x) if ball.type_of(n) == type_name and ball.edge_origin(x, n) == "original"}

    via: Dict[Tuple[str, str], Set[str]] = {}
    for w in ball.vertices_of_type(two):
        if vertex_depth(ball, w) < margin:
            continue
        report.scanned += 1
        for v, v2 in combinations(sorted(original_neighbors(w, kk)), 2):
            via.setdefault((v, v2), set()).add(w)
            shared = original_neighbors(v, two) & original_neighbors(v2, two)
            if shared != {w}:
                report.violations.append({
                    "check": "unique_type2_vertex", "pair": [v, v2], "type2_vertices": sorted(shared),
                })
            for u in sorted(original_neighbors(v, mm) & original_neighbors(v2, mm)):
                if ball.edge_origin(u, w) != "original":
                    report.violations.append({
                        "check": "type_m_adjacent_to_type2", "pair": [v, v2], "type2": w, "type_m": u,
                    })

    k_graph = nx.Graph()
    k_graph.add_edges_from(via)
    for x, y, z in sorted(tuple(sorted(c)) for c in nx.enumerate_all_cliques(k_graph) if len(c) == 3):
        for wx in sorted(via.get((x, y), ())):
            for wy in sorted(via.get((y, z), ())):
                for wz in sorted(via.get((x, z), ())):
                    if len({wx, wy, wz}) == 3:
                        report.violations.append({
                            "check": "alternating_six_cycle", "cycle": [x, wx, y, wy, z, wz],
                        })
    return finish_report(report, started, structural=True)


def _deep_relations(ball: TypedComplex, case: CaseLabel, roles: Dict[str, str], margin: int):
    related = {}
    for relation in find_relations(ball, case, roles):
        deep = [w for w in relation.witnesses if edge_star_complete(ball, *w) and edge_depth(ball, *w) >= margin]
        if deep:
            related[(relation.u, relation.v)] = relation
    return related


def _common(ball: TypedComplex, members: Iterable[str], type_name: Optional[str] = None) -> Set[str]:
    members = list(members)
    common = set.intersection(*(ball.neighbors(x) for x in members))
    if type_name is not None:
        common = {n for n in common if ball.type_of(n) == type_name}
    return common


def _common_edges(ball: TypedComplex, members: Sequence[str], type_pair: frozenset) -> List[Tuple[str, str]]:
    common = _common(ball, members)
    found = []
    for p, q in combinations(sorted(common), 2):
        if ball.adjacent(p, q) and frozenset((ball.type_of(p), ball.type_of(q))) == type_pair:
            found.append((p, q))
    return found


def check_structural_rank4(ball: TypedComplex, case: Optional[CaseLabel] = None,
                           margin: int = RANK4_MARGIN) -> VerificationReport:
    """
    Uniqueness and exclusion properties of friends and acquaintances, and the
    common-edge properties of triples and quadruples of related vertices,
    over pairs related through a witness edge of depth >= margin.
    """
    _require_margin(margin)
    if ball.metadata.get("rank") != 4:
        raise InputError("structural rank 4 checks need a rank 4 ball")
    started = time.perf_counter()
    detected, roles = classify_case(system_of(ball))
    case = CaseLabel(case) if case is not None else detected
    report = VerificationReport("structural_rank4", margin_used=margin)
    if case == CaseLabel.ALL_GEQ_3:
        return finish_report(report, started, structural=True)
    if case != detected:
        raise InputError(f"case {case.value} does not match the system, which is case {detected.value}")

    a, b, c, d = (roles[x] for x in "abcd")
    related = _deep_relations(ball, case, roles, margin)

    def violation(check, **details):
        report.violations.append({"check": check, **details})

    # pairs
    for (u, v), relation in related.items():
        report.scanned += 1
        pair_type = ball.type_of(u)
        other = d if pair_type == c else c
        if relation.kind == "friend":
            x, y = relation.witnesses[0]
            for type_name in (a, b):
                found = _common(ball, (u, v), type_name)
                if len(found) != 1:
                    violation("friends_unique_ab", pair=[u, v], type=type_name, found=sorted(found))
            for z in sorted(_common(ball, (u, v), other)):
                if not (ball.adjacent(z, x) and ball.adjacent(z, y)):
                    violation("friends_common_vertex_on_ab", pair=[u, v], vertex=z, edge=[x, y])
        else:
            if pair_type == d and case == CaseLabel.CASE_II:
                violation("no_type_d_acquaintances", pair=[u, v])
                continue
            x, y = relation.witnesses[0]
            edge_types = sorted((ball.type_of(x), ball.type_of(y)))
            for type_name in edge_types:
                found = _common(ball, (u, v), type_name)
                if len(found) != 1:
                    violation("acquaintances_unique_edge", pair=[u, v], type=type_name, found=sorted(found))
            excluded = ({a, b, c, d} - set(edge_types) - {pair_type}).pop()
            found = _common(ball, (u, v), excluded)
            if found:
                violation("acquaintances_excluded_type", pair=[u, v], type=excluded, found=sorted(found))

    # triples and quadruples
    ab = frozenset((a, b))
    if case == CaseLabel.CASE_I:
        rules = {c: [frozenset((a, d))], d: [frozenset((b, c))]}
    else:
        rules = {c: [frozenset((a, d)), frozenset((b, d))]}
    for type_name in (c, d):
        graph = nx.Graph()
        graph.add_edges_from(p for p in related if ball.type_of(p[0]) == type_name)
        groups = [tuple(sorted(g)) for g in nx.enumerate_all_cliques(graph) if 2 <= len(g) <= 4]
        for group in sorted(groups):
            pairs = list(combinations(group, 2))
            all_friends = all(related[p].kind == "friend" for p in pairs)
            if type_name == d and case == CaseLabel.CASE_II:
                if all_friends and len(group) >= 3:
                    report.scanned += 1
                    if not _common_edges(ball, group, ab):
                        violation("friends_common_ab_edge", vertices=list(group))
                continue
            if len(group) < 3:
                continue
            report.scanned += 1
            found = [e for t in rules[type_name] for e in _common_edges(ball, group, t)]
            if not found:
                violation("common_edge_exists", vertices=list(group))
            elif len(found) > 1 and not (all_friends and _common_edges(ball, group, ab)):
                violation("common_edge_unique", vertices=list(group), edges=[list(e) for e in sorted(found)])
    return finish_report(report, started, structural=True)


def check_relation_lists(ball: TypedComplex, margin: int = RANK4_MARGIN) -> VerificationReport:
    """Friends and acquaintances against the explicit per-case edge lists, on pairs with a witness of depth >= margin."""
    _require_margin(margin)
    started = time.perf_counter()
    report = VerificationReport("relation_lists", margin_used=margin)
    case, roles = classify_case(system_of(ball))
    if case == CaseLabel.ALL_GEQ_3:
        return finish_report(report, started, structural=True)
    relations = {(r.u, r.v): r for r in find_relations(ball, case, roles)}
    explicit = explicit_new_edges(ball)

    def deep(witnesses):
        return any(edge_star_complete(ball, *w) and edge_depth(ball, *w) >= margin for w in witnesses)

    for pair, relation in relations.items():
        if deep(relation.witnesses):
            report.scanned += 1
            if pair not in explicit:
                report.violations.append({"check": "missing_from_explicit_list", "pair": list(pair), "kind": relation.kind})
    for pair, witnesses in explicit.items():
        if deep(witnesses):
            report.scanned += 1
            if pair not in relations:
                report.violations.append({"check": "missing_from_relations", "pair": list(pair)})
    return finish_report(report, started, structural=True)


def check_new_edge_triangles(original: TypedComplex, systolized: TypedComplex) -> VerificationReport:
    """Every new edge closes a triangle with a path of two original edges; nothing is removed."""
    started = time.perf_counter()
    report = VerificationReport("new_edge_triangles")
    missing_vertices = set(original.vertices) - set(systolized.vertices)
    missing_edges = [e for e in original.edges if e not in systolized.edges]
    if missing_vertices or missing_edges:
        report.violations.append({
            "check": "removed", "vertices": sorted(missing_vertices)[:10],
            "edges": sorted(sorted(e) for e in missing_edges)[:10],
        })
    for edge in sorted(tuple(sorted(e)) for e, origin in systolized.edges.items() if origin in ("friend", "acquaintance")):
        report.scanned += 1
        u, v = edge
        if u not in original.vertices or v not in original.vertices:
            report.violations.append({"check": "new_edge_triangle", "edge": [u, v], "apex": None})
            continue
        apexes = sorted(original.neighbors(u) & original.neighbors(v))
        if not apexes or not systolized.is_simplex([u, v, apexes[0]]):
            report.violations.append({"check": "new_edge_triangle", "edge": [u, v], "apex": None})
    return finish_report(report, started, structural=True)


def check_full_six_cycles(complex_: TypedComplex, margin: int = SIX_CYCLE_MARGIN) -> VerificationReport:
    """Every full 6-cycle on vertices of depth >= margin has a vertex adjacent to all of its vertices."""
    _require_margin(margin)
    started = time.perf_counter()
    report = VerificationReport("full_six_cycles", margin_used=margin)
    deep = [v for v in complex_.vertices if vertex_depth(complex_, v) >= margin]
    for cycle in full_cycles(complex_.graph.subgraph(deep), 6, min_len=6):
        report.scanned += 1
        if not certified_cycle(complex_, cycle):
            report.skipped_boundary += 1
            continue
        if not _common(complex_, cycle):
            report.violations.append({
                "check": "full_six_cycle", "witness": CycleWitness(tuple(cycle), 6, "uncovered 6-cycle").to_dict(),
            })
    return finish_report(report, started)


def check_vertex_retraction(original: TypedComplex, systolized: TypedComplex,
                            margin: int = RANK3_MARGIN) -> VerificationReport:
    """
    For every interior type-k vertex x, retract its systolized link onto its
    original link (each new type-k neighbour goes to its type-2 neighbour in
    the original link) and check the collapse hypothesis.
    """
    _require_margin(margin)
    roles = _roles_rank3(original)
    started = time.perf_counter()
    report = VerificationReport("vertex_retraction", margin_used=margin)
    for x in original.vertices_of_type(roles["k"]):
        if vertex_depth(original, x) < margin:
            continue
        report.scanned += 1
        before, after = link(original, [x]), link(systolized, [x])
        mapping = {}
        for v in sorted(after.vertices):
            if v in before.vertices:
                mapping[v] = v
                continue
            targets = sorted(w for w in before.vertices
                             if before.type_of(w) == roles["2"] and original.adjacent(v, w))
            if len(targets) != 1:
                report.violations.append({"check": "retraction_target", "center": x, "vertex": v, "targets": targets})
                break
            mapping[v] = targets[0]
        else:
            try:
                holds = check_collapse_hypothesis(mapping, after, before)
            except InputError as e:
                report.violations.append({"check": "retraction_map", "center": x, "error": str(e)})
                continue
            if not holds:
                report.violations.append({"check": "collapse_hypothesis", "center": x})
    return finish_report(report, started, structural=True)
