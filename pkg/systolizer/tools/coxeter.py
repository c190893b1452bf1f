"""
Coxeter group word machinery and finite balls of Coxeter realizations.

Elements are identified by their shortlex-minimal words (NormalForm). A ball
of radius R is enumerated layer by layer in the Cayley graph with a right
multiplication table; right descent sets are derived from the dihedral
subgroups so that every element of length <= R is found exactly once.
Vertices of the realization are cosets of maximal special subgroups and are
named "<type>:<min rep word>".
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from systolizer.pipeline.config import (
    EXCLUDED_TRIANGLE_TYPES, NODE_BUDGET, RANK3_GENERATORS, RANK3_ROLES, RANK4_LETTERS
)
from systolizer.pipeline.errors import EligibilityError, InputError, ResourceLimitError

logger = logging.getLogger(__name__)

INFINITY = math.inf
IDENTITY_WORD = "e"

NormalForm = Tuple[int, ...]
Exponent = Union[int, float]


@dataclass(frozen=True)
class CoxeterSystem:
    """Coxeter matrix with generator names and the vertex type carried by each generator.

    The vertex of type ``type_names[i]`` is a coset of the special subgroup
    generated by every generator except ``i``.
    """

    rank: int
    exponents: Tuple[Tuple[Exponent, ...], ...]
    generator_names: Tuple[str, ...]
    type_names: Tuple[str, ...]

    def __post_init__(self):
        n = self.rank
        if n < 1 or len(self.exponents) != n or any(len(row) != n for row in self.exponents):
            raise InputError(f"exponent matrix must be {n}x{n}")
        if len(self.generator_names) != n or len(set(self.generator_names)) != n:
            raise InputError("generator names must be distinct, one per generator")
        if len(self.type_names) != n or len(set(self.type_names)) != n:
            raise InputError("type names must be distinct, one per generator")
        for i in range(n):
            if self.exponents[i][i] != 1:
                raise InputError(f"diagonal exponent m({i},{i}) must be 1")
            for j in range(i + 1, n):
                value = self.exponents[i][j]
                if value != self.exponents[j][i]:
                    raise InputError(f"exponents not symmetric at ({i},{j})")
                if value != INFINITY and (int(value) != value or value < 2):
                    raise InputError(f"exponent m({i},{j}) must be an integer >= 2 or inf, got {value}")

    @classmethod
    def triangle(cls, l: Exponent, k: Exponent, m: Exponent) -> "CoxeterSystem":
        """Rank 3 system of type (l,k,m): the vertex in position x has stabilizer of order 2x.

        Vertex types are named by role, "2" for the smallest exponent, then "k" and
        "m", ties broken by position.
        """
        matrix = _symmetric_matrix(3, {(1, 2): l, (0, 2): k, (0, 1): m})
        return cls(3, matrix, RANK3_GENERATORS, _rank3_type_names(matrix))

    @classmethod
    def tetrahedral(cls, ab: Exponent, ac: Exponent, ad: Exponent,
                    bc: Exponent, bd: Exponent, cd: Exponent) -> "CoxeterSystem":
        """Rank 4 system from the edge labels of the base tetrahedron abcd.

        The label of edge xy is the exponent of the two generators opposite to it.
        """
        matrix = _symmetric_matrix(4, {
            (2, 3): ab, (1, 3): ac, (1, 2): ad,
            (0, 3): bc, (0, 2): bd, (0, 1): cd,
        })
        return cls(4, matrix, RANK4_LETTERS, RANK4_LETTERS)

    @classmethod
    def from_exponents(cls, values: Sequence[Exponent]) -> "CoxeterSystem":
        values = [parse_exponent(v) for v in values]
        if len(values) == 3:
            return cls.triangle(*values)
        if len(values) == 6:
            return cls.tetrahedral(*values)
        raise InputError(f"expected 3 (l,k,m) or 6 (ab,ac,ad,bc,bd,cd) exponents, got {len(values)}")

    @classmethod
    def from_dict(cls, data: dict) -> "CoxeterSystem":
        if not isinstance(data, dict) or "exponents" not in data:
            raise InputError("system description needs an 'exponents' entry")
        exponents = data["exponents"]
        if exponents and not isinstance(exponents[0], (list, tuple)):
            return cls.from_exponents(exponents)
        matrix = tuple(tuple(parse_exponent(v) for v in row) for row in exponents)
        rank = int(data.get("rank", len(matrix)))
        defaults = RANK3_GENERATORS if rank == 3 else RANK4_LETTERS if rank == 4 else tuple(f"s{i}" for i in range(rank))
        names = tuple(data.get("generator_names", defaults))
        if "type_names" in data:
            types = tuple(data["type_names"])
        elif rank == 3 and len(matrix) == 3 and all(len(row) == 3 for row in matrix):
            types = _rank3_type_names(matrix)
        else:
            types = names
        return cls(rank, matrix, names, types)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "generator_names": list(self.generator_names),
            "type_names": list(self.type_names),
            "exponents": [[_dump_exponent(v) for v in row] for row in self.exponents],
        }

    def m(self, i: int, j: int) -> Exponent:
        return self.exponents[i][j]

    @property
    def is_finite_type(self) -> bool:
        return all(v != INFINITY for row in self.exponents for v in row)

    def type_index(self, type_name: str) -> int:
        try:
            return self.type_names.index(type_name)
        except ValueError:
            raise InputError(f"unknown vertex type {type_name!r}")

    def complement(self, indices: Iterable[int]) -> FrozenSet[int]:
        return frozenset(range(self.rank)) - frozenset(indices)

    def type_order(self, type_name: str) -> Exponent:
        """Rank 3: half the order of the stabilizer of a vertex of this type."""
        others = sorted(self.complement([self.type_index(type_name)]))
        if len(others) != 2:
            raise InputError("type_order is defined for rank 3 systems only")
        return self.m(*others)

    def edge_label(self, type_x: str, type_y: str) -> Exponent:
        """Rank 4: exponent attached to the tetrahedron edge between two vertex types."""
        others = sorted(self.complement([self.type_index(type_x), self.type_index(type_y)]))
        if len(others) != 2:
            raise InputError("edge_label is defined for rank 4 systems only")
        return self.m(*others)

    def input_values(self) -> Tuple[Exponent, ...]:
        """The exponents in the (l,k,m) or (ab,ac,ad,bc,bd,cd) input convention."""
        if self.rank == 3:
            return tuple(self.type_order(t) for t in self.type_names)
        if self.rank == 4:
            return tuple(self.edge_label(x, y) for x, y in combinations(self.type_names, 2))
        return tuple(self.m(i, j) for i, j in combinations(range(self.rank), 2))

    def describe(self) -> str:
        return ",".join(_dump_exponent(v) if v == INFINITY else str(int(v)) for v in self.input_values())


@dataclass(frozen=True)
class CosetId:
    subgroup_type: FrozenSet[int]
    min_rep: NormalForm


def _symmetric_matrix(n: int, entries: Dict[Tuple[int, int], Exponent]) -> Tuple[Tuple[Exponent, ...], ...]:
    rows = [[1 if i == j else None for j in range(n)] for i in range(n)]
    for (i, j), value in entries.items():
        value = parse_exponent(value)
        rows[i][j] = rows[j][i] = value
    return tuple(tuple(row) for row in rows)


def _rank3_type_names(matrix: Tuple[Tuple[Exponent, ...], ...]) -> Tuple[str, ...]:
    orders = [matrix[(i + 1) % 3][(i + 2) % 3] for i in range(3)]
    names = [""] * 3
    for role, i in zip(RANK3_ROLES, sorted(range(3), key=lambda i: (orders[i], i))):
        names[i] = role
    return tuple(names)


def parse_exponent(value) -> Exponent:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞", "oo"):
            return INFINITY
        try:
            return int(text)
        except ValueError:
            raise InputError(f"invalid exponent {value!r}")
    if isinstance(value, float) and math.isinf(value):
        return INFINITY
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise InputError(f"invalid exponent {value!r}")
    return int(value)


def _dump_exponent(value: Exponent):
    return "inf" if value == INFINITY else int(value)


# Words

def word_to_str(word: Sequence[int], system: CoxeterSystem) -> str:
    if not word:
        return IDENTITY_WORD
    return ".".join(system.generator_names[g] for g in word)


def parse_word(word: Union[str, Sequence], system: CoxeterSystem) -> NormalForm:
    """Accepts "s.t.s", "sts" (single-character names), or a sequence of indices/names."""
    names = system.generator_names
    if isinstance(word, str):
        text = word.strip()
        if text in ("", IDENTITY_WORD):
            return ()
        if "." in text:
            tokens = text.split(".")
        elif all(len(name) == 1 for name in names):
            tokens = list(text)
        else:
            tokens = [text]
    else:
        tokens = list(word)
    letters = []
    for token in tokens:
        if isinstance(token, int) and not isinstance(token, bool):
            if not 0 <= token < system.rank:
                raise InputError(f"invalid generator index {token}")
            letters.append(token)
        elif token in names:
            letters.append(names.index(token))
        else:
            raise InputError(f"invalid generator {token!r}")
    return tuple(letters)


def _alternating(s: int, t: int, length: int) -> NormalForm:
    return tuple(s if i % 2 == 0 else t for i in range(length))


@lru_cache(maxsize=None)
def _braid_class(system: CoxeterSystem, word: NormalForm) -> FrozenSet[NormalForm]:
    seen = {word}
    frontier = [word]
    n = system.rank
    while frontier:
        current = frontier.pop()
        for s in range(n):
            for t in range(n):
                if s == t or system.m(s, t) == INFINITY:
                    continue
                m = int(system.m(s, t))
                if m > len(current):
                    continue
                pattern = _alternating(s, t, m)
                replacement = _alternating(t, s, m)
                for i in range(len(current) - m + 1):
                    if current[i:i + m] == pattern:
                        rewritten = current[:i] + replacement + current[i + m:]
                        if rewritten not in seen:
                            seen.add(rewritten)
                            frontier.append(rewritten)
    return frozenset(seen)


@lru_cache(maxsize=None)
def _reduce(system: CoxeterSystem, word: NormalForm) -> NormalForm:
    current = word
    while True:
        shortened = None
        for candidate in sorted(_braid_class(system, current)):
            for i in range(len(candidate) - 1):
                if candidate[i] == candidate[i + 1]:
                    shortened = candidate[:i] + candidate[i + 2:]
                    break
            if shortened is not None:
                break
        if shortened is None:
            return min(_braid_class(system, current))
        current = shortened


def tits_reduce(word: Union[str, Sequence], system: CoxeterSystem) -> NormalForm:
    """
    Solve the word problem with Tits' M-operations.

    Args:
        word: generator indices, generator names, or a word string such as "s.t.s"
        system: the Coxeter system

    Returns:
        The shortlex-minimal word representing the same element
    """
    return _reduce(system, parse_word(word, system))


def word_length(word: Union[str, Sequence], system: CoxeterSystem) -> int:
    return len(tits_reduce(word, system))


def min_coset_rep(w: Union[str, Sequence], J: Iterable[int], system: CoxeterSystem) -> NormalForm:
    """Unique minimal-length element of the coset wW_J, found by greedy right multiplication."""
    J = frozenset(parse_word(list(J), system))
    if J >= frozenset(range(system.rank)):
        raise InputError("J must be a proper subset of the generators")
    current = tits_reduce(w, system)
    improved = True
    while improved:
        improved = False
        for j in sorted(J):
            candidate = _reduce(system, current + (j,))
            if len(candidate) < len(current):
                current = candidate
                improved = True
                break
    return current


def coset_id(w: Union[str, Sequence], J: Iterable[int], system: CoxeterSystem) -> CosetId:
    J = frozenset(J)
    return CosetId(J, min_coset_rep(w, J, system))


@lru_cache(maxsize=None)
def special_subgroup_longest(system: CoxeterSystem, J: FrozenSet[int]) -> Optional[int]:
    """Length of the longest element of W_J, or None when W_J is infinite."""
    J = sorted(J)
    if len(J) == 0:
        return 0
    if len(J) == 1:
        return 1
    pairs = [system.m(i, j) for i, j in combinations(J, 2)]
    if any(v == INFINITY for v in pairs):
        return None
    if len(J) == 2:
        return int(pairs[0])
    if len(J) == 3 and sum(1.0 / v for v in pairs) <= 1.0:
        return None
    sub = CoxeterSystem(
        len(J),
        tuple(tuple(system.m(i, j) for j in J) for i in J),
        tuple(system.generator_names[i] for i in J),
        tuple(system.type_names[i] for i in J),
    )
    cap = 64
    try:
        ball = CoxeterBall(sub, cap, node_budget=20_000)
    except ResourceLimitError:
        return None
    longest = max(ball.lengths)
    return longest if longest < cap else None


# Eligibility

def rank3_roles(system: CoxeterSystem) -> Dict[str, str]:
    """Map the roles "2", "k", "m" to vertex types: ordered by stabilizer exponent, ties by position."""
    if system.rank != 3:
        raise InputError("rank3_roles needs a rank 3 system")
    order = sorted(system.type_names, key=lambda t: (system.type_order(t), system.type_index(t)))
    return dict(zip(("2", "k", "m"), order))


def check_rank3_eligible(system: CoxeterSystem) -> str:
    """Return "all_geq_3" or "two"; raise EligibilityError for types the rank 3 construction excludes."""
    if system.rank != 3:
        raise EligibilityError(f"expected a rank 3 system, got rank {system.rank}")
    values = [system.type_order(t) for t in system.type_names]
    if any(v == INFINITY for v in values):
        raise EligibilityError("infinite exponents are not supported")
    ordered = tuple(sorted(int(v) for v in values))
    if ordered[0] >= 3:
        return "all_geq_3"
    if ordered in EXCLUDED_TRIANGLE_TYPES:
        raise EligibilityError(f"type {ordered} is excluded from systolization")
    if ordered[1] == 2:
        raise EligibilityError(f"type {ordered} has more than one exponent 2")
    if ordered[1] < 3 or ordered[2] < 6:
        raise EligibilityError(f"type {ordered} is not of the form (2,k,m) with k >= 3, m >= 6")
    return "two"


def check_rank4_eligible(system: CoxeterSystem) -> None:
    if system.rank != 4:
        raise EligibilityError(f"expected a rank 4 system, got rank {system.rank}")
    if not system.is_finite_type:
        raise EligibilityError("infinite exponents are not supported")
    twos = [v for v in system.input_values() if v == 2]
    if len(twos) > 1:
        raise EligibilityError(f"{len(twos)} exponents equal 2, at most one is allowed")
    for i, name in enumerate(system.type_names):
        J = system.complement([i])
        if special_subgroup_longest(system, J) is not None:
            raise EligibilityError(f"special subgroup at vertex type {name} is finite")
        ordered = tuple(sorted(int(system.m(x, y)) for x, y in combinations(sorted(J), 2)))
        if ordered in EXCLUDED_TRIANGLE_TYPES:
            raise EligibilityError(f"special subgroup at vertex type {name} has excluded type {ordered}")


# Balls

class CoxeterBall:
    """All elements of length <= radius, with right descent sets and a right multiplication table."""

    def __init__(self, system: CoxeterSystem, radius: int, node_budget: Optional[int] = None):
        if radius < 0:
            raise InputError(f"radius must be >= 0, got {radius}")
        if not system.is_finite_type:
            raise EligibilityError("infinite exponents are not supported")
        self.system = system
        self.radius = radius
        self.node_budget = NODE_BUDGET if node_budget is None else node_budget
        n = system.rank
        self.lengths: List[int] = [0]
        self.words: List[NormalForm] = [()]
        self.descents: List[int] = [0]
        self.table: List[List[Optional[int]]] = [[None] * n]
        self._enumerate()
        self.index: Dict[NormalForm, int] = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def _enumerate(self):
        layer = [0]
        for length in range(self.radius):
            created = []
            for x in layer:
                for s in range(self.system.rank):
                    if self.table[x][s] is None:
                        created.append(self._attach(x, s))
            for y in created:
                self.words[y] = min(
                    self.words[self.table[y][r]] + (r,)
                    for r in range(self.system.rank) if self.descents[y] >> r & 1
                )
            if not created:
                break
            logger.debug(f"[{self.system.describe()}] layer {length + 1}: {len(created)} elements")
            layer = created

    def _attach(self, x: int, s: int) -> int:
        if len(self.words) >= self.node_budget:
            raise ResourceLimitError(
                f"ball of radius {self.radius} for {self.system.describe()} exceeds node budget {self.node_budget}"
            )
        n = self.system.rank
        y = len(self.words)
        self.lengths.append(self.lengths[x] + 1)
        self.words.append(())
        self.table.append([None] * n)
        self.table[x][s] = y
        self.table[y][s] = x
        descents = 1 << s
        for t in range(n):
            if t == s or self.system.m(s, t) == INFINITY:
                continue
            m = int(self.system.m(s, t))
            # walk down the <s,t>-part of x, which ends in t
            z, steps, g = x, 0, t
            while steps < m - 1 and self.descents[z] >> g & 1:
                z = self.table[z][g]
                steps += 1
                g = s if g == t else t
            if steps < m - 1:
                continue
            descents |= 1 << t
            for p in range(m - 2, -1, -1):
                z = self.table[z][s if p % 2 == 0 else t]
                if z is None:
                    raise RuntimeError("multiplication table incomplete below the current layer")
            if self.table[z][t] is not None and self.table[z][t] != y:
                raise RuntimeError("inconsistent multiplication table")
            self.table[z][t] = y
            self.table[y][t] = z
        self.descents.append(descents)
        return y

    def element(self, word: Union[str, Sequence]) -> int:
        current = 0
        for g in parse_word(word, self.system):
            current = self.table[current][g]
            if current is None:
                raise InputError(f"word {word!r} leaves the ball of radius {self.radius}")
        return current

    def multiply(self, element: int, generator: int) -> Optional[int]:
        return self.table[element][generator]

    def is_descent(self, element: int, generator: int) -> bool:
        return bool(self.descents[element] >> generator & 1)

    def coset_min_rep(self, element: int, J: Iterable[int]) -> int:
        mask = sum(1 << j for j in set(J))
        current = element
        while self.descents[current] & mask:
            low = (self.descents[current] & mask) & -(self.descents[current] & mask)
            current = self.table[current][low.bit_length() - 1]
        return current

    def word_str(self, element: int) -> str:
        return word_to_str(self.words[element], self.system)


def _type_key(types: Iterable[str]) -> str:
    return "".join(sorted(types))


def build_coxeter_ball(system: CoxeterSystem, radius: int, node_budget: Optional[int] = None):
    """
    Build the ball of the given radius in the Coxeter realization.

    Args:
        system: finite-exponent Coxeter system
        radius: largest chamber distance from the identity chamber
        node_budget: maximum number of chambers to enumerate

    Returns:
        A TypedComplex whose metadata carries radius, per-vertex and per-edge
        depth tables, and every chamber with its distance
    """
    from systolizer.tools.complex import TypedComplex, Vertex, edge_key

    ball = CoxeterBall(system, radius, node_budget)
    tag = f"[{system.describe()} r={radius}]"
    n = system.rank
    everything = frozenset(range(n))

    vertex_stabilizer = {i: special_subgroup_longest(system, everything - {i}) for i in range(n)}
    pair_stabilizer = {
        (i, j): special_subgroup_longest(system, everything - {i, j})
        for i, j in combinations(range(n), 2)
    }

    vertices: Dict[str, Vertex] = {}
    depth: Dict[str, int] = {}
    edge_depth: Dict[str, int] = {}
    edges: Dict[FrozenSet[str], str] = {}
    chambers = []

    def coset_depth(rep: int, longest: Optional[int]) -> int:
        if longest is None:
            return radius - ball.lengths[rep]
        return radius - ball.lengths[rep] - longest

    for element in range(len(ball)):
        ids = []
        for i in range(n):
            rep = ball.coset_min_rep(element, everything - {i})
            vid = f"{system.type_names[i]}:{ball.word_str(rep)}"
            if vid not in vertices:
                vertices[vid] = Vertex(vid, system.type_names[i], "original")
                depth[vid] = coset_depth(rep, vertex_stabilizer[i])
            ids.append(vid)
        for i, j in combinations(range(n), 2):
            key = edge_key(ids[i], ids[j])
            if key not in edge_depth:
                rep = ball.coset_min_rep(element, everything - {i, j})
                edge_depth[key] = coset_depth(rep, pair_stabilizer[(i, j)])
            edges[frozenset((ids[i], ids[j]))] = "original"
        chambers.append([ball.lengths[element], ball.word_str(element), sorted(ids)])

    chambers.sort(key=lambda c: (c[0], c[1]))
    metadata = {
        "kind": "coxeter_ball",
        "rank": n,
        "radius": radius,
        "exponents": [_dump_exponent(v) for v in system.input_values()],
        "system": system.to_dict(),
        "infinite_types": sorted(system.type_names[i] for i in range(n) if vertex_stabilizer[i] is None),
        "depth": depth,
        "edge_depth": edge_depth,
        "chambers": chambers,
    }
    if n == 3:
        metadata["type_orders"] = {t: _dump_exponent(system.type_order(t)) for t in system.type_names}
        metadata["roles"] = rank3_roles(system)
    if n == 4:
        metadata["edge_labels"] = {
            _type_key((x, y)): _dump_exponent(system.edge_label(x, y))
            for x, y in combinations(system.type_names, 2)
        }

    complex_ = TypedComplex.from_graph(vertices.values(), edges, metadata)
    logger.info(
        f"{tag} built ball: {len(ball)} chambers, {len(complex_.vertices)} vertices, {len(complex_.edges)} edges"
    )
    return complex_


def vertex_depth(complex_, v: str) -> int:
    """Radius minus the largest chamber distance around v; the truncated link radius for infinite stabilizers."""
    from systolizer.tools.complex import vertex_depth as _vertex_depth
    return _vertex_depth(complex_, v)
