"""
Systolization constructions.

Rank 3: join type-k vertices that share a type-2 vertex. Rank 4: join
friends (same type c or d, common ab edge) and acquaintances (not friends,
common edge labelled k or k'). New edges are only added when a witnessing
simplex has its whole star inside the ball, so truncation never invents edges.
Also the graph transforms used by the largeness lemmas and the Davis
systolization assembly.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx

from systolizer.pipeline.errors import EligibilityError, InputError, PreconditionError
from systolizer.tools.complex import (
    TypedComplex, edge_depth, edge_key, edge_star_complete, face_complex, raw_depth,
    remove_open_stars, simplex_id, star_complete, vertex_depth,
)
from systolizer.tools.coxeter import (
    CoxeterSystem, check_rank3_eligible, check_rank4_eligible, rank3_roles,
)

logger = logging.getLogger(__name__)

WitnessEdge = Tuple[str, str]


class CaseLabel(str, Enum):
    CASE_I = "I"
    CASE_II = "II"
    ALL_GEQ_3 = "all_geq_3"


@dataclass(frozen=True)
class Relation:
    """Friend or acquaintance relation between two same-type vertices, with the edges certifying it."""

    kind: str
    u: str
    v: str
    witnesses: Tuple[WitnessEdge, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pair": [self.u, self.v], "witnesses": [list(w) for w in self.witnesses]}


# Edge types (as role letter pairs) labelled k or k' in each case
K_EDGE_ROLES = {
    CaseLabel.CASE_I: ("ad", "bc"),
    CaseLabel.CASE_II: ("ad", "bd"),
}

# Explicit form of the rank 4 construction: vertex role -> witnessing edge roles
EXPLICIT_EDGE_ROLES = {
    CaseLabel.CASE_I: {"c": ("ad",), "d": ("bc",)},
    CaseLabel.CASE_II: {"c": ("ad", "bd"), "d": ("ab",)},
}


def system_of(complex_: TypedComplex) -> CoxeterSystem:
    if "system" not in complex_.metadata:
        raise InputError("complex metadata carries no Coxeter system; pass one explicitly")
    return CoxeterSystem.from_dict(complex_.metadata["system"])


# Rank 3

def systolize_rank3(ball: TypedComplex, system: Optional[CoxeterSystem] = None, force: bool = False) -> TypedComplex:
    """
    Add an edge between every two type-k vertices adjacent to a common type-2 vertex.

    Args:
        ball: rank 3 Coxeter realization ball
        system: its Coxeter system (read from the ball metadata when omitted)
        force: run on excluded types anyway, for negative testing

    Returns:
        The systolized complex, or the ball itself when all exponents are >= 3
    """
    system = system or system_of(ball)
    tag = f"[{system.describe()} systolize]"
    try:
        kind = check_rank3_eligible(system)
    except EligibilityError as e:
        if not force:
            raise
        logger.warning(f"{tag} forcing construction on ineligible type: {e}")
        kind = "two"
    if kind == "all_geq_3":
        logger.info(f"{tag} all exponents >= 3, complex is already systolic")
        return ball

    roles = rank3_roles(system)
    edges = dict(ball.edges)
    depths = dict(ball.metadata.get("edge_depth", {}))
    added = 0
    for z in ball.vertices_of_type(roles["2"]):
        if not star_complete(ball, z):
            continue
        around = sorted(n for n in ball.neighbors(z) if ball.type_of(n) == roles["k"])
        for p, q in combinations(around, 2):
            pair = frozenset((p, q))
            if pair in edges:
                continue
            edges[pair] = "friend"
            depths[edge_key(p, q)] = max(depths.get(edge_key(p, q), 0), raw_depth(ball, z))
            added += 1

    metadata = dict(ball.metadata)
    metadata.update({
        "kind": "systolized",
        "source": ball.metadata.get("kind", "complex"),
        "edge_depth": depths,
        "joined_types": [roles["k"]],
        "witness_types": {roles["k"]: [[roles["2"]]]},
        "added_edges": {"friend": added, "acquaintance": 0},
    })
    result = TypedComplex.from_graph(ball.vertices.values(), edges, metadata)
    logger.info(f"{tag} added {added} edges between type-{roles['k']} vertices")
    return result


# Rank 4

def classify_case(system: CoxeterSystem) -> Tuple[CaseLabel, Dict[str, str]]:
    """
    Decide case I / case II / all >= 3 and the assignment of roles a,b,c,d to vertex types.

    Returns:
        (case, roles) where roles maps each role letter to a vertex type of the system
    """
    check_rank4_eligible(system)
    types = system.type_names
    labels = {frozenset(pair): system.edge_label(*pair) for pair in combinations(types, 2)}
    twos = [pair for pair, value in labels.items() if value == 2]
    if not twos:
        return CaseLabel.ALL_GEQ_3, {t: t for t in types}

    def label(roles, x, y):
        return labels[frozenset((roles[x], roles[y]))]

    candidates = []
    for a, b in permutations(sorted(twos[0])):
        for c, d in permutations(sorted(set(types) - twos[0])):
            roles = {"a": a, "b": b, "c": c, "d": d}
            if label(roles, "a", "c") < 6 or label(roles, "a", "d") < 3:
                continue
            if label(roles, "b", "c") >= 3 and label(roles, "b", "d") >= 6:
                candidates.append((0, [types.index(roles[r]) for r in "abcd"], CaseLabel.CASE_I, roles))
            elif label(roles, "b", "c") >= 6 and label(roles, "b", "d") >= 3:
                candidates.append((1, [types.index(roles[r]) for r in "abcd"], CaseLabel.CASE_II, roles))
    if not candidates:
        raise EligibilityError(f"type {system.describe()} matches neither case I nor case II")
    _, _, case, roles = min(candidates, key=lambda c: (c[0], c[1]))
    return case, roles


def _role_pair(roles: Mapping[str, str], letters: str) -> frozenset:
    return frozenset(roles[x] for x in letters)


def _edges_of_type(complex_: TypedComplex, type_pair: frozenset) -> List[WitnessEdge]:
    found = []
    for edge in complex_.edges:
        u, v = sorted(edge)
        if frozenset((complex_.type_of(u), complex_.type_of(v))) == type_pair and len(type_pair) == 2:
            found.append((u, v))
    return sorted(found)


def _shared_edge_pairs(complex_: TypedComplex, vertex_type: str,
                       edge_types: Iterable[frozenset]) -> Dict[Tuple[str, str], List[WitnessEdge]]:
    """Pairs of vertices of vertex_type adjacent to a common edge of one of edge_types, with those edges."""
    pairs: Dict[Tuple[str, str], List[WitnessEdge]] = defaultdict(list)
    for type_pair in edge_types:
        if vertex_type in type_pair:
            continue
        for x, y in _edges_of_type(complex_, type_pair):
            common = sorted(
                n for n in complex_.neighbors(x) & complex_.neighbors(y)
                if complex_.type_of(n) == vertex_type
            )
            for p, q in combinations(common, 2):
                pairs[(p, q)].append((x, y))
    return pairs


def _k_edge_types(case: CaseLabel, roles: Mapping[str, str]) -> List[frozenset]:
    return [_role_pair(roles, letters) for letters in K_EDGE_ROLES[case]]


def find_relations(ball: TypedComplex, case: CaseLabel, roles: Mapping[str, str]) -> List[Relation]:
    """Every friend and acquaintance pair in the ball, with all witnesses present in it."""
    if case == CaseLabel.ALL_GEQ_3:
        return []
    ab = _role_pair(roles, "ab")
    relations = []
    for role in ("c", "d"):
        vertex_type = roles[role]
        friends = _shared_edge_pairs(ball, vertex_type, [ab])
        known = _shared_edge_pairs(ball, vertex_type, _k_edge_types(case, roles))
        for pair, witnesses in friends.items():
            relations.append(Relation("friend", pair[0], pair[1], tuple(sorted(set(witnesses)))))
        for pair, witnesses in known.items():
            if pair not in friends:
                relations.append(Relation("acquaintance", pair[0], pair[1], tuple(sorted(set(witnesses)))))
    return sorted(relations, key=lambda r: (r.u, r.v))


def classify_relation(ball: TypedComplex, u: str, v: str,
                      system: Optional[CoxeterSystem] = None) -> Optional[Relation]:
    """
    Decide whether u and v are friends, acquaintances or neither.

    Args:
        ball: rank 4 Coxeter realization ball
        u, v: distinct interior vertices of the same type c or d
        system: Coxeter system (read from the ball metadata when omitted)

    Returns:
        The Relation with every witnessing edge found in the ball, or None
    """
    if u == v:
        raise PreconditionError("a vertex is not related to itself")
    system = system or system_of(ball)
    case, roles = classify_case(system)
    if case == CaseLabel.ALL_GEQ_3:
        return None
    vertex_type = ball.type_of(u)
    if vertex_type != ball.type_of(v) or vertex_type not in (roles["c"], roles["d"]):
        raise PreconditionError(f"{u} and {v} must share a type among {roles['c']}, {roles['d']}")
    if vertex_depth(ball, u) < 1 or vertex_depth(ball, v) < 1:
        raise PreconditionError(f"{u} or {v} lies on the ball boundary")

    common = ball.neighbors(u) & ball.neighbors(v)

    def witnesses_of(type_pairs):
        found = set()
        for x, y in combinations(sorted(common), 2):
            if ball.adjacent(x, y) and frozenset((ball.type_of(x), ball.type_of(y))) in type_pairs:
                found.add((x, y))
        return tuple(sorted(found))

    p, q = sorted((u, v))
    friends = witnesses_of({_role_pair(roles, "ab")})
    if friends:
        return Relation("friend", p, q, friends)
    known = witnesses_of({t for t in _k_edge_types(case, roles) if vertex_type not in t})
    if known:
        return Relation("acquaintance", p, q, known)
    return None


def systolize_rank4(ball: TypedComplex, system: Optional[CoxeterSystem] = None) -> TypedComplex:
    """Join friends and acquaintances whose relation has a witness with complete star."""
    system = system or system_of(ball)
    tag = f"[{system.describe()} systolize]"
    case, roles = classify_case(system)
    if case == CaseLabel.ALL_GEQ_3:
        logger.info(f"{tag} all exponents >= 3, complex is already systolic")
        return ball

    edges = dict(ball.edges)
    depths = dict(ball.metadata.get("edge_depth", {}))
    added = {"friend": 0, "acquaintance": 0}
    skipped = 0
    for relation in find_relations(ball, case, roles):
        complete = [w for w in relation.witnesses if edge_star_complete(ball, *w)]
        if not complete:
            skipped += 1
            continue
        edges[frozenset((relation.u, relation.v))] = relation.kind
        depths[edge_key(relation.u, relation.v)] = max(edge_depth(ball, *w) for w in complete)
        added[relation.kind] += 1

    joined = sorted({roles["c"], roles["d"]})
    metadata = dict(ball.metadata)
    metadata.update({
        "kind": "systolized",
        "source": ball.metadata.get("kind", "complex"),
        "case": case.value,
        "case_roles": dict(roles),
        "edge_depth": depths,
        "joined_types": joined,
        "witness_types": {
            roles[role]: [sorted(t) for t in [_role_pair(roles, "ab"), *_k_edge_types(case, roles)] if roles[role] not in t]
            for role in ("c", "d")
        },
        "added_edges": added,
    })
    result = TypedComplex.from_graph(ball.vertices.values(), edges, metadata)
    logger.info(
        f"{tag} case {case.value}: added {added['friend']} friend and {added['acquaintance']} acquaintance edges"
    )
    if skipped:
        logger.debug(f"{tag} {skipped} relations left out, no witness with complete star")
    return result


def explicit_new_edges(ball: TypedComplex, system: Optional[CoxeterSystem] = None) -> Dict[Tuple[str, str], List[WitnessEdge]]:
    """
    Same-type pairs joined by the explicit per-case description of the rank 4 construction.

    Case I: c-vertices sharing an ad edge, d-vertices sharing a bc edge.
    Case II: c-vertices sharing an ad or bd edge, d-vertices sharing an ab edge.
    """
    system = system or system_of(ball)
    case, roles = classify_case(system)
    if case == CaseLabel.ALL_GEQ_3:
        return {}
    pairs: Dict[Tuple[str, str], List[WitnessEdge]] = {}
    for role, edge_roles in EXPLICIT_EDGE_ROLES[case].items():
        found = _shared_edge_pairs(ball, roles[role], [_role_pair(roles, e) for e in edge_roles])
        pairs.update({pair: sorted(set(w)) for pair, w in found.items()})
    return dict(sorted(pairs.items()))


# Graph transforms

def _sorted_cliques(graph: nx.Graph) -> List[Tuple]:
    return sorted((tuple(sorted(c, key=str)) for c in nx.find_cliques(graph)), key=lambda c: [str(x) for x in c])


def gamma_star(graph: nx.Graph) -> nx.Graph:
    """
    Adjoin one vertex per maximal clique.

    Args:
        graph: graph whose maximal cliques pairwise meet in at most one vertex

    Returns:
        Graph on V and the clique vertices "m0", "m1", ... (cliques in sorted
        order); two clique vertices are adjacent when the cliques meet, and a
        clique vertex is adjacent to its members
    """
    cliques = _sorted_cliques(graph)
    for (i, first), (j, second) in combinations(enumerate(cliques), 2):
        if len(set(first) & set(second)) > 1:
            raise PreconditionError(f"maximal cliques {list(first)} and {list(second)} share an edge")
    names = [f"m{i}" for i in range(len(cliques))]
    clash = set(names) & set(graph.nodes)
    if clash:
        raise InputError(f"clique vertex names already used: {sorted(clash)}")

    result = nx.Graph()
    result.add_nodes_from(graph.nodes)
    result.add_edges_from(graph.edges)
    for name, clique in zip(names, cliques):
        result.add_node(name)
        result.add_edges_from((name, v) for v in clique)
    for (name, first), (other, second) in combinations(zip(names, cliques), 2):
        if set(first) & set(second):
            result.add_edge(name, other)
    return result


def gamma_tilde(graph: nx.Graph) -> nx.Graph:
    """Vertices (v, sigma) with v in sigma, sigma a vertex or an edge; named "(v,v)" and "(v,u-w)"."""
    if graph.number_of_edges() and nx.girth(graph) < 4:
        raise PreconditionError("gamma_tilde needs a graph of girth >= 4")

    def name(v, sigma):
        return f"({v},{'-'.join(str(x) for x in sigma)})"

    pairs = []
    for v in graph.nodes:
        pairs.append((v, (v,)))
        for u in graph.adj[v]:
            pairs.append((v, tuple(sorted((u, v), key=str))))
    result = nx.Graph()
    result.add_nodes_from(name(v, sigma) for v, sigma in pairs)
    for (v, sigma), (w, tau) in combinations(pairs, 2):
        if v == w:
            result.add_edge(name(v, sigma), name(w, tau))
        elif graph.has_edge(v, w):
            joint = tuple(sorted((v, w), key=str))
            if sigma in ((v,), joint) and tau in ((w,), joint):
                result.add_edge(name(v, sigma), name(w, tau))
    return result


def _graph_of(obj: Union[TypedComplex, nx.Graph]) -> nx.Graph:
    return obj.graph if isinstance(obj, TypedComplex) else obj


def check_collapse_hypothesis(f: Mapping, A: Union[TypedComplex, nx.Graph], B: Union[TypedComplex, nx.Graph]) -> bool:
    """
    Whether a simplicial surjection f: A -> B satisfies: a, a' adjacent iff f(a), f(a') adjacent or equal.

    Raises:
        InputError: f is not defined on every vertex of A, not onto B, or not simplicial
    """
    first, second = _graph_of(A), _graph_of(B)
    missing = [a for a in first.nodes if a not in f]
    if missing:
        raise InputError(f"map undefined on {sorted(map(str, missing))[:5]}")
    image = {f[a] for a in first.nodes}
    if any(b not in second for b in image):
        raise InputError("map leaves the target complex")
    if image != set(second.nodes):
        raise InputError("map is not onto")
    holds = True
    for a, b in combinations(first.nodes, 2):
        close = f[a] == f[b] or second.has_edge(f[a], f[b])
        if first.has_edge(a, b):
            if not close:
                raise InputError(f"map is not simplicial on edge {a}-{b}")
        elif close:
            holds = False
    return holds


def davis_systolization(ball: TypedComplex, system: Optional[CoxeterSystem] = None, force: bool = False) -> TypedComplex:
    """Face complex of the systolization; for rank 4, minus the open stars of the original vertices."""
    system = system or system_of(ball)
    if system.rank == 3:
        result = face_complex(systolize_rank3(ball, system, force=force))
        result.metadata["kind"] = "davis_systolization"
        return result
    if system.rank == 4:
        faces = face_complex(systolize_rank4(ball, system))
        removed = [simplex_id([v]) for v in ball.vertices]
        return remove_open_stars(faces, removed, "davis_systolization")
    raise EligibilityError(f"no systolization for rank {system.rank}")
