"""
Randomized lemma oracles.

Each trial draws small random graphs and compares both sides of a
largeness equivalence, with exhaustive induced-cycle search as ground truth.
All randomness comes from one seeded generator.
"""

import time
import random
import logging
from itertools import combinations
from typing import Callable, Dict, List

import networkx as nx

from systolizer.pipeline.config import (
    DEFAULT_MAX_VERTICES, DEFAULT_SEED, DEFAULT_TRIALS, FACE_ORACLE_MAX_VERTICES, FACE_ORACLE_TRIALS,
    ORACLE_K_VALUES,
)
from systolizer.pipeline.errors import PreconditionError
from systolizer.tools.complex import INFINITE_K, face_complex, flag_span, girth, is_k_large
from systolizer.tools.systolize import check_collapse_hypothesis, gamma_star, gamma_tilde
from systolizer.tools.verify import VerificationReport, finish_report

logger = logging.getLogger(__name__)


def random_graph(rng: random.Random, max_vertices: int, low: float = 0.2, high: float = 0.7,
                 prefix: str = "v") -> nx.Graph:
    n = rng.randint(3, max(3, max_vertices))
    graph = nx.gnp_random_graph(n, rng.uniform(low, high), seed=rng.randrange(2 ** 32))
    return nx.relabel_nodes(graph, {i: f"{prefix}{i}" for i in graph.nodes})


def random_triangle_free_graph(rng: random.Random, max_vertices: int) -> nx.Graph:
    """Random edges, skipping any edge that would close a triangle."""
    n = rng.randint(3, max(3, max_vertices))
    graph = nx.empty_graph([f"v{i}" for i in range(n)])
    candidates = list(combinations(sorted(graph.nodes), 2))
    rng.shuffle(candidates)
    for u, v in candidates[:rng.randint(n - 1, len(candidates))]:
        if not set(graph.adj[u]) & set(graph.adj[v]):
            graph.add_edge(u, v)
    return graph


def random_clique_tree_graph(rng: random.Random, max_vertices: int) -> nx.Graph:
    """Graph whose maximal cliques meet in at most one vertex, from random gnp draws or a random tree."""
    for _ in range(20):
        graph = random_graph(rng, max_vertices, 0.15, 0.5)
        cliques = [set(c) for c in nx.find_cliques(graph)]
        if all(len(p & q) <= 1 for p, q in combinations(cliques, 2)):
            return graph
    n = rng.randint(3, max(3, max_vertices))
    tree = nx.empty_graph([f"v{i}" for i in range(n)])
    tree.add_edges_from((f"v{i}", f"v{rng.randrange(i)}") for i in range(1, n))
    return tree


def _large(graph: nx.Graph, k: int) -> bool:
    return is_k_large(graph, k)[0]


def amalgam_trial(rng: random.Random, max_vertices: int) -> List[dict]:
    """Two flag complexes glued along simplices of equal size are k-large iff both are."""
    first = random_graph(rng, max_vertices, prefix="a")
    second = random_graph(rng, max_vertices, prefix="b")
    clique_a = sorted(max(nx.find_cliques(first), key=lambda c: (len(c), sorted(c))))
    clique_b = sorted(max(nx.find_cliques(second), key=lambda c: (len(c), sorted(c))))
    size = rng.randint(1, min(len(clique_a), len(clique_b)))
    glued = nx.compose(first, nx.relabel_nodes(second, dict(zip(clique_b[:size], clique_a[:size]))))
    failures = []
    for k in ORACLE_K_VALUES:
        if _large(glued, k) != (_large(first, k) and _large(second, k)):
            failures.append({"lemma": "amalgam", "k": k, "edges": sorted(map(sorted, glued.edges))})
    return failures


def collapse_trial(rng: random.Random, max_vertices: int) -> List[dict]:
    """Blow every vertex of B up into a clique; the collapse map keeps shortest full cycle length."""
    target = random_graph(rng, max_vertices, prefix="b")
    source = nx.Graph()
    mapping: Dict[str, str] = {}
    for b in sorted(target.nodes):
        copies = [f"{b}_{j}" for j in range(rng.randint(1, 3))]
        source.add_nodes_from(copies)
        source.add_edges_from(combinations(copies, 2))
        mapping.update({c: b for c in copies})
    for x, y in combinations(sorted(source.nodes), 2):
        if target.has_edge(mapping[x], mapping[y]):
            source.add_edge(x, y)

    failures = []
    if not check_collapse_hypothesis(mapping, source, target):
        failures.append({"lemma": "collapse", "reason": "hypothesis rejected on a blow-up"})
    for k in ORACLE_K_VALUES:
        if _large(source, k) != _large(target, k):
            failures.append({"lemma": "collapse", "k": k, "edges": sorted(map(sorted, target.edges))})

    inside = [e for e in source.edges if mapping[e[0]] == mapping[e[1]]]
    if inside:
        broken = source.copy()
        broken.remove_edge(*rng.choice(sorted(inside)))
        if check_collapse_hypothesis(mapping, broken, target):
            failures.append({"lemma": "collapse", "reason": "hypothesis accepted with a missing edge"})
    return failures


def gamma_star_trial(rng: random.Random, max_vertices: int) -> List[dict]:
    graph = random_clique_tree_graph(rng, max_vertices)
    expanded = gamma_star(graph)
    failures = []
    for k in ORACLE_K_VALUES:
        if _large(expanded, k) != _large(graph, k):
            failures.append({"lemma": "gamma_star", "k": k, "edges": sorted(map(sorted, graph.edges))})
    return failures


def gamma_tilde_trial(rng: random.Random, max_vertices: int) -> List[dict]:
    graph = random_triangle_free_graph(rng, max_vertices)
    expanded = gamma_tilde(graph)
    shortest = girth(graph)
    failures = []
    for k in ORACLE_K_VALUES:
        if _large(expanded, k) != (shortest >= k):
            failures.append({"lemma": "gamma_tilde", "k": k, "edges": sorted(map(sorted, graph.edges))})
    return failures


LEMMA_TRIALS: Dict[str, Callable[[random.Random, int], List[dict]]] = {
    "amalgam": amalgam_trial,
    "collapse": collapse_trial,
    "gamma_star": gamma_star_trial,
    "gamma_tilde": gamma_tilde_trial,
}


def run_lemma_oracles(trials: int = DEFAULT_TRIALS, max_vertices: int = DEFAULT_MAX_VERTICES,
                      seed: int = DEFAULT_SEED) -> VerificationReport:
    """
    Check the amalgam, collapse, clique-graph and incidence-graph largeness equivalences on random instances.

    Args:
        trials: instances per lemma
        max_vertices: largest random graph drawn
        seed: seed of the single random generator

    Returns:
        VerificationReport whose violations are counterexamples (there should be none)
    """
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    started = time.perf_counter()
    rng = random.Random(seed)
    report = VerificationReport("lemma_oracles")
    for name, trial in LEMMA_TRIALS.items():
        for i in range(trials):
            for failure in trial(rng, max_vertices):
                report.violations.append({"trial": i, **failure})
            report.scanned += 1
        logger.debug(f"[oracles] {name}: {trials} trials done")
    return finish_report(report, started, structural=True)


def run_face_complex_oracle(trials: int = FACE_ORACLE_TRIALS, max_vertices: int = FACE_ORACLE_MAX_VERTICES,
                            seed: int = DEFAULT_SEED, k: float = 6) -> VerificationReport:
    """Whenever a random flag complex is k-large, so is its face complex."""
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    started = time.perf_counter()
    rng = random.Random(seed)
    report = VerificationReport("face_complex_oracle")
    for i in range(trials):
        complex_ = flag_span(random_graph(rng, max_vertices, 0.2, 0.5))
        report.scanned += 1
        if not is_k_large(complex_, k)[0]:
            continue
        large, witness = is_k_large(face_complex(complex_), k)
        if not large:
            report.violations.append({
                "trial": i, "lemma": "face_complex", "k": "inf" if k == INFINITE_K else k,
                "edges": sorted(sorted(e) for e in complex_.edges), "witness": witness.to_dict(),
            })
    return finish_report(report, started, structural=True)
