"""
Typed flag simplicial complexes.

A TypedComplex is determined by its 1-skeleton: maximal simplices are the
maximal cliques of the edge graph. Vertices carry a type label and an origin
tag, edges carry an origin tag (original, friend, acquaintance, derived).
Depth tables produced by ball construction travel in ``metadata`` so that
links and derived complexes can still tell interior vertices from boundary ones.
"""

import math
import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

import networkx as nx

from systolizer.pipeline.errors import InputError, PreconditionError

logger = logging.getLogger(__name__)

ORIGINS = ("original", "friend", "acquaintance", "derived")
UNBOUNDED_DEPTH = 10 ** 9
INFINITE_K = math.inf

Edge = FrozenSet[str]


@dataclass(frozen=True, order=True)
class Vertex:
    id: str
    type: str = ""
    origin: str = "original"

    def to_dict(self) -> dict:
        return {"id": self.id, "type": self.type, "origin": self.origin}


@dataclass(frozen=True)
class CycleWitness:
    """An induced cycle: consecutive vertices adjacent, all other pairs non-adjacent."""

    vertices: Tuple[str, ...]
    length: int
    context: str = ""

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "length": self.length, "context": self.context}


def edge_key(u: str, v: str) -> str:
    return "|".join(sorted((u, v)))


def simplex_id(members: Iterable[str]) -> str:
    return "{" + ",".join(sorted(members)) + "}"


def type_set_label(types: Iterable[str]) -> str:
    return "+".join(sorted(set(types)))


class TypedComplex:
    """Flag simplicial complex with typed vertices and edge origin labels."""

    def __init__(
        self,
        vertices: Iterable[Vertex],
        edges: Mapping[Edge, str],
        maximal_simplices: Iterable[Iterable[str]],
        metadata: Optional[dict] = None,
    ):
        self.vertices: Dict[str, Vertex] = {v.id: v for v in vertices}
        self.edges: Dict[Edge, str] = dict(edges)
        self.maximal_simplices: List[Tuple[str, ...]] = sorted(tuple(sorted(s)) for s in maximal_simplices)
        self.metadata: dict = dict(metadata or {})
        self._graph: Optional[nx.Graph] = None

    @classmethod
    def from_graph(cls, vertices: Iterable[Vertex], edges: Mapping[Edge, str], metadata: Optional[dict] = None):
        vertices = list(vertices)
        graph = nx.Graph()
        graph.add_nodes_from(v.id for v in vertices)
        graph.add_edges_from(tuple(e) for e in edges)
        return cls(vertices, edges, nx.find_cliques(graph), metadata)

    @property
    def graph(self) -> nx.Graph:
        if self._graph is None:
            graph = nx.Graph()
            for v in self.vertices.values():
                graph.add_node(v.id, type=v.type, origin=v.origin)
            for edge, origin in self.edges.items():
                u, v = tuple(edge)
                graph.add_edge(u, v, origin=origin)
            self._graph = graph
        return self._graph

    def type_of(self, v: str) -> str:
        return self.vertices[v].type

    def neighbors(self, v: str) -> Set[str]:
        return set(self.graph.adj[v])

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edges

    def edge_origin(self, u: str, v: str) -> Optional[str]:
        return self.edges.get(frozenset((u, v)))

    def is_simplex(self, sigma: Iterable[str]) -> bool:
        sigma = list(sigma)
        if not sigma or any(v not in self.vertices for v in sigma):
            return False
        return all(self.adjacent(u, v) for u, v in combinations(sigma, 2))

    def vertices_of_type(self, type_name: str) -> List[str]:
        return sorted(v.id for v in self.vertices.values() if v.type == type_name)

    def simplices(self) -> Set[FrozenSet[str]]:
        faces: Set[FrozenSet[str]] = set()
        for top in self.maximal_simplices:
            for size in range(1, len(top) + 1):
                faces.update(frozenset(c) for c in combinations(top, size))
        return faces

    def dimension(self) -> int:
        return max((len(s) for s in self.maximal_simplices), default=0) - 1

    def star(self, sigma: Iterable[str]) -> "TypedComplex":
        """Closed star: every maximal simplex containing sigma."""
        sigma = frozenset(sigma)
        if not self.is_simplex(sigma):
            raise InputError(f"{sorted(sigma)} is not a simplex")
        tops = [top for top in self.maximal_simplices if sigma <= set(top)]
        members = set().union(*tops) if tops else set(sigma)
        return self.full_subcomplex(members, kind="star")

    def full_subcomplex(self, keep: Iterable[str], kind: str = "full_subcomplex") -> "TypedComplex":
        keep = set(keep)
        restricted = {frozenset(top) & keep for top in self.maximal_simplices}
        restricted.discard(frozenset())
        tops = [s for s in restricted if not any(s < other for other in restricted)]
        edges = {e: o for e, o in self.edges.items() if e <= keep}
        metadata = _restricted_metadata(self.metadata, keep)
        metadata["kind"] = kind
        return TypedComplex((self.vertices[v] for v in keep), edges, tops, metadata)

    def validate(self) -> None:
        """Assert the flag invariant and internal consistency; raise InputError on failure."""
        for edge in self.edges:
            if len(edge) != 2:
                raise InputError(f"self-loop or malformed edge {sorted(edge)}")
            for v in edge:
                if v not in self.vertices:
                    raise InputError(f"edge {sorted(edge)} references unknown vertex {v}")
        for origin in self.edges.values():
            if origin not in ORIGINS:
                raise InputError(f"unknown edge origin {origin!r}")
        covered = set()
        for top in self.maximal_simplices:
            for v in top:
                if v not in self.vertices:
                    raise InputError(f"maximal simplex references unknown vertex {v}")
            if not all(self.adjacent(u, v) for u, v in combinations(top, 2)):
                raise InputError(f"maximal simplex {list(top)} is missing edges")
            covered.update(top)
        missing = set(self.vertices) - covered
        if missing:
            raise InputError(f"vertices outside every maximal simplex: {sorted(missing)[:5]}")
        cliques = {tuple(sorted(c)) for c in nx.find_cliques(self.graph)}
        if cliques != set(self.maximal_simplices):
            raise InputError("maximal simplices differ from the maximal cliques of the 1-skeleton")

    def to_dict(self) -> dict:
        return {
            "vertices": [v.to_dict() for v in sorted(self.vertices.values())],
            "edges": sorted([*sorted(e), o] for e, o in self.edges.items()),
            "maximal_simplices": [list(s) for s in self.maximal_simplices],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TypedComplex":
        try:
            vertices = [Vertex(str(v["id"]), str(v.get("type", "")), str(v.get("origin", "original")))
                        for v in data["vertices"]]
            edges = {}
            for entry in data["edges"]:
                u, v = str(entry[0]), str(entry[1])
                edges[frozenset((u, v))] = str(entry[2]) if len(entry) > 2 else "original"
            tops = [[str(x) for x in s] for s in data.get("maximal_simplices", [])]
        except (KeyError, TypeError, IndexError) as e:
            raise InputError(f"malformed complex JSON: {e}")
        if not tops and vertices:
            complex_ = cls.from_graph(vertices, edges, data.get("metadata", {}))
        else:
            complex_ = cls(vertices, edges, tops, data.get("metadata", {}))
        complex_.validate()
        return complex_

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypedComplex):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return (f"TypedComplex({len(self.vertices)} vertices, {len(self.edges)} edges, "
                f"{len(self.maximal_simplices)} maximal simplices)")


def _restricted_metadata(metadata: dict, keep: Set[str]) -> dict:
    restricted = {}
    for key in ("rank", "radius", "system", "infinite_types", "joined_types", "witness_types", "roles",
                "case", "case_roles", "type_orders", "edge_labels"):
        if key in metadata:
            restricted[key] = metadata[key]
    if "depth" in metadata:
        restricted["depth"] = {v: d for v, d in metadata["depth"].items() if v in keep}
    if "edge_depth" in metadata:
        restricted["edge_depth"] = {
            k: d for k, d in metadata["edge_depth"].items() if all(v in keep for v in k.split("|"))
        }
    return restricted


# Depth

def raw_depth(complex_: TypedComplex, v: str) -> int:
    if v not in complex_.vertices:
        raise InputError(f"unknown vertex {v}")
    table = complex_.metadata.get("depth")
    if table is None or v not in table:
        return UNBOUNDED_DEPTH
    return int(table[v])


def has_finite_stabilizer(complex_: TypedComplex, v: str) -> bool:
    return complex_.type_of(v) not in complex_.metadata.get("infinite_types", ())


def vertex_depth(complex_: TypedComplex, v: str) -> int:
    """
    Distance from v's star to the ball boundary.

    Args:
        complex_: a ball (or anything derived from one) carrying a depth table
        v: vertex id

    Returns:
        radius minus the largest chamber distance around v, clamped at 0; for
        vertices with infinite stabilizer, the radius of the truncated link
    """
    depth = raw_depth(complex_, v)
    if has_finite_stabilizer(complex_, v):
        return max(0, depth)
    return depth


def star_complete(complex_: TypedComplex, v: str) -> bool:
    if "depth" not in complex_.metadata:
        return True
    return has_finite_stabilizer(complex_, v) and raw_depth(complex_, v) >= 0


def edge_depth(complex_: TypedComplex, u: str, v: str) -> int:
    table = complex_.metadata.get("edge_depth", {})
    key = edge_key(u, v)
    if key in table:
        return max(0, int(table[key]))
    return min(vertex_depth(complex_, u), vertex_depth(complex_, v))


def edge_star_complete(complex_: TypedComplex, u: str, v: str) -> bool:
    table = complex_.metadata.get("edge_depth")
    if table is None:
        return True
    key = edge_key(u, v)
    return key in table and int(table[key]) >= 0


def simplex_depth(complex_: TypedComplex, sigma: Iterable[str]) -> int:
    sigma = sorted(set(sigma))
    if len(sigma) == 1:
        return vertex_depth(complex_, sigma[0])
    return min(edge_depth(complex_, u, v) for u, v in combinations(sigma, 2))


# Constructions

def flag_span(graph: nx.Graph, metadata: Optional[dict] = None) -> TypedComplex:
    """Flag complex on a graph; node attributes ``type``/``origin`` and edge attribute ``origin`` are kept."""
    vertices = [
        Vertex(str(n), str(data.get("type", "")), str(data.get("origin", "original")))
        for n, data in graph.nodes(data=True)
    ]
    edges = {}
    for u, v, data in graph.edges(data=True):
        if u == v:
            raise InputError(f"self-loop at {u}")
        edges[frozenset((str(u), str(v)))] = data.get("origin", "original")
    return TypedComplex.from_graph(vertices, edges, metadata)


def link(complex_: TypedComplex, sigma: Iterable[str]) -> TypedComplex:
    """Full subcomplex on the vertices adjacent to every vertex of sigma, sigma excluded."""
    sigma = sorted(set(sigma))
    if not complex_.is_simplex(sigma):
        raise InputError(f"{sigma} is not a simplex")
    common = set.intersection(*(complex_.neighbors(v) for v in sigma)) - set(sigma)
    result = complex_.full_subcomplex(common, kind="link")
    result.metadata["center"] = sigma
    return result


def _as_graph(obj: Union[TypedComplex, nx.Graph, Iterable]) -> nx.Graph:
    if isinstance(obj, TypedComplex):
        return obj.graph
    if isinstance(obj, nx.Graph):
        return obj
    graph = nx.Graph()
    graph.add_edges_from(obj)
    return graph


def _canonical_cycle(cycle: List) -> Tuple:
    keys = [str(v) for v in cycle]
    i = keys.index(min(keys))
    forward = cycle[i:] + cycle[:i]
    backward = [cycle[i]] + list(reversed(cycle[i + 1:] + cycle[:i]))
    return min(tuple(forward), tuple(backward), key=lambda c: tuple(str(v) for v in c))


def full_cycles(obj, max_len: int, min_len: int = 4) -> List[Tuple]:
    """All induced cycles with min_len <= length <= max_len, canonical and sorted."""
    graph = _as_graph(obj)
    found = set()
    for cycle in nx.chordless_cycles(graph, length_bound=max_len):
        if min_len <= len(cycle) <= max_len:
            found.add(_canonical_cycle(list(cycle)))
    return sorted(found, key=lambda c: (len(c), tuple(str(v) for v in c)))


def shortest_full_cycle(obj, max_len: int, context: str = "") -> Optional[CycleWitness]:
    """
    Shortest induced cycle of length in [4, max_len].

    Args:
        obj: TypedComplex or networkx graph
        max_len: longest cycle length considered (>= 4)
        context: description stored in the witness

    Returns:
        The lexicographically least shortest witness, or None
    """
    if max_len < 4:
        raise PreconditionError(f"max_len must be >= 4, got {max_len}")
    cycles = full_cycles(obj, max_len)
    if not cycles:
        return None
    best = cycles[0]
    return CycleWitness(tuple(str(v) for v in best), len(best), context)


def is_k_large(obj, k: float, context: str = "") -> Tuple[bool, Optional[CycleWitness]]:
    """True when there is no full cycle of length < k; k may be INFINITE_K."""
    if k < 4:
        raise PreconditionError(f"k must be >= 4, got {k}")
    graph = _as_graph(obj)
    bound = graph.number_of_nodes() if k == INFINITE_K else int(k) - 1
    if bound < 4:
        return True, None
    witness = shortest_full_cycle(graph, bound, context)
    return witness is None, witness


def girth(obj) -> Union[int, float]:
    """Length of a shortest cycle (not necessarily induced); inf for forests."""
    value = nx.girth(_as_graph(obj))
    return value if value == math.inf else int(value)


def _derived_vertex(complex_: TypedComplex, members: FrozenSet[str]) -> Vertex:
    return Vertex(simplex_id(members), type_set_label(complex_.type_of(v) for v in members), "derived")


def _derived_metadata(complex_: TypedComplex, kind: str, simplices: Iterable[FrozenSet[str]]) -> dict:
    metadata = {"kind": kind, "source": complex_.metadata.get("kind", "complex")}
    for key in ("rank", "radius", "exponents", "roles"):
        if key in complex_.metadata:
            metadata[key] = complex_.metadata[key]
    metadata["simplex_of"] = {simplex_id(s): sorted(s) for s in simplices}
    if "depth" in complex_.metadata:
        metadata["depth"] = {
            simplex_id(s): min(raw_depth(complex_, v) for v in s) for s in simplices
        }
    return metadata


def barycentric_subdivision(complex_: TypedComplex) -> TypedComplex:
    """Vertices are the simplices of the input; simplices are chains under inclusion."""
    simplices = complex_.simplices()
    vertices = [_derived_vertex(complex_, s) for s in simplices]
    chains = set()
    for top in complex_.maximal_simplices:
        for order in permutations(top):
            chains.add(tuple(simplex_id(order[:i]) for i in range(1, len(order) + 1)))
    edges = {}
    for chain in chains:
        for u, v in combinations(chain, 2):
            edges[frozenset((u, v))] = "derived"
    result = TypedComplex(vertices, edges, chains, _derived_metadata(complex_, "barycentric_subdivision", simplices))
    logger.debug(f"[subdivision] {len(simplices)} vertices, {len(chains)} maximal simplices")
    return result


def face_complex(complex_: TypedComplex) -> TypedComplex:
    """Vertices are the simplices of the input; a set spans a simplex iff its members lie in a common simplex."""
    simplices = complex_.simplices()
    vertices = [_derived_vertex(complex_, s) for s in simplices]
    tops = []
    edges = {}
    for top in complex_.maximal_simplices:
        faces = [simplex_id(c) for size in range(1, len(top) + 1) for c in combinations(top, size)]
        tops.append(faces)
        for u, v in combinations(faces, 2):
            edges[frozenset((u, v))] = "derived"
    result = TypedComplex(vertices, edges, tops, _derived_metadata(complex_, "face_complex", simplices))
    logger.debug(f"[face complex] {len(simplices)} vertices, {len(edges)} edges")
    return result


def original_subcomplex(complex_: TypedComplex) -> TypedComplex:
    """The complex spanned by the original edges only, i.e. the ball a systolization started from."""
    edges = {e: o for e, o in complex_.edges.items() if o == "original"}
    if len(edges) == len(complex_.edges):
        return complex_
    metadata = {k: v for k, v in complex_.metadata.items()
                if k not in ("joined_types", "witness_types", "added_edges", "case", "case_roles")}
    metadata["kind"] = complex_.metadata.get("source", "coxeter_ball")
    if "edge_depth" in metadata:
        metadata["edge_depth"] = {k: d for k, d in metadata["edge_depth"].items()
                                  if frozenset(k.split("|")) in edges}
    return TypedComplex.from_graph(complex_.vertices.values(), edges, metadata)


def remove_open_stars(complex_: TypedComplex, removed: Iterable[str], kind: str) -> TypedComplex:
    removed = set(removed)
    result = complex_.full_subcomplex(set(complex_.vertices) - removed, kind=kind)
    for key in ("source", "exponents", "simplex_of"):
        if key in complex_.metadata:
            value = complex_.metadata[key]
            result.metadata[key] = {k: v for k, v in value.items() if k not in removed} if isinstance(value, dict) else value
    return result


def davis_realization(complex_: TypedComplex, infinite_types: Optional[Iterable[Iterable[str]]] = None) -> TypedComplex:
    """
    Barycentric subdivision minus the open stars of barycenters whose simplex type is infinite.

    Args:
        complex_: Coxeter realization ball or ingested typed complex
        infinite_types: type sets (e.g. {"a"}) of simplices with infinite stabilizer;
            defaults to the singleton vertex types recorded in the ball metadata

    Returns:
        The Davis realization of the complex
    """
    if infinite_types is None:
        infinite_types = [[t] for t in complex_.metadata.get("infinite_types", [])]
    flagged = {frozenset(t) for t in infinite_types}
    subdivision = barycentric_subdivision(complex_)
    removed = [
        simplex_id(s) for s in complex_.simplices()
        if frozenset(complex_.type_of(v) for v in s) in flagged
    ]
    return remove_open_stars(subdivision, removed, "davis_realization")
