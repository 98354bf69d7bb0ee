import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

Diagonal = Tuple[int, int]
Triangle = Tuple[int, int, int]


class MopError(ValueError):
    """Base class for every domain error raised by mopdom."""


class InvalidMopError(MopError):
    pass


class NotOuterEdgeError(MopError):
    pass


class RegionDeletionError(MopError):
    pass


class PartitionError(MopError):
    pass


def normalize_pair(a: int, b: int) -> Diagonal:
    return (a, b) if a < b else (b, a)


def is_boundary_pair(n: int, a: int, b: int) -> bool:
    a, b = normalize_pair(a, b)
    return b == a + 1 or (a == 0 and b == n - 1)


def disjunctive_bound(n: int, k: int) -> int:
    """The 2(n+k)/9 upper bound on the disjunctive domination number."""
    return (2 * (n + k)) // 9


def domination_bound(n: int, k: int) -> int:
    return (n + k) // 4


def chvatal_bound(n: int) -> int:
    return n // 3


@dataclass(frozen=True)
class Mop:
    """
    A maximal outerplanar graph given by its boundary cycle 0..n-1
    (counterclockwise) and a set of diagonals.

    Values are immutable; derived adjacency data is computed once and cached.
    Construction normalizes pairs but does not validate: use validate().
    """
    n: int
    diagonals: FrozenSet[Diagonal] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(
            self, 'diagonals',
            frozenset(normalize_pair(int(a), int(b)) for a, b in self.diagonals)
        )

    @property
    def sorted_diagonals(self) -> List[Diagonal]:
        return sorted(self.diagonals)

    @property
    def boundary_edges(self) -> List[Diagonal]:
        return [normalize_pair(i, (i + 1) % self.n) for i in range(self.n)]

    @cached_property
    def edges(self) -> FrozenSet[Diagonal]:
        return frozenset(self.boundary_edges) | self.diagonals

    @cached_property
    def neighbors(self) -> Dict[int, FrozenSet[int]]:
        adj: Dict[int, set] = {v: set() for v in range(self.n)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(ns) for v, ns in adj.items()}

    @cached_property
    def second_neighbors(self) -> Dict[int, FrozenSet[int]]:
        """Vertices at distance exactly 2."""
        result = {}
        for v in range(self.n):
            closed = self.neighbors[v] | {v}
            reach = set()
            for u in self.neighbors[v]:
                reach |= self.neighbors[u]
            result[v] = frozenset(reach - closed)
        return result

    @cached_property
    def faces(self) -> List[Triangle]:
        """Inner triangles, sorted by vertex triple."""
        triangles = []
        for u in range(self.n):
            for v in self.neighbors[u]:
                if v <= u:
                    continue
                for w in self.neighbors[u] & self.neighbors[v]:
                    if w > v:
                        triangles.append((u, v, w))
        return sorted(triangles)

    @cached_property
    def graph(self) -> nx.Graph:
        return self.to_networkx()

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def is_outer_edge(self, a: int, b: int) -> bool:
        return is_boundary_pair(self.n, a, b)

    def has_edge(self, a: int, b: int) -> bool:
        return normalize_pair(a, b) in self.edges

    def __repr__(self):
        return f"<Mop(n={self.n}, diagonals={self.sorted_diagonals})>"


@dataclass
class ValidationReport:
    issues: List[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.is_valid


@dataclass(frozen=True)
class MopMetrics:
    n: int
    k: int
    internal_triangles: int
    gamma: Optional[int] = None
    gamma2d: Optional[int] = None

    @property
    def bound(self) -> int:
        return disjunctive_bound(self.n, self.k)

    @property
    def slack(self) -> Optional[int]:
        if self.gamma2d is None:
            return None
        return self.bound - self.gamma2d


@dataclass(frozen=True)
class Region:
    """
    A region cut off by a diagonal: the closing diagonal plus the boundary
    vertices on one side of it, listed counterclockwise.
    """
    vertices: Tuple[int, ...]
    closing_diagonal: Diagonal

    @property
    def interior(self) -> Tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.closing_diagonal)

    @property
    def outer_edge_count(self) -> int:
        return len(self.vertices) - 1


class RegionDeletion(NamedTuple):
    mop: Mop
    index_map: Dict[int, int]


def _range_issues(m: Mop) -> List[str]:
    issues = []
    for a, b in m.sorted_diagonals:
        if a < 0 or b >= m.n:
            issues.append(f"diagonal {{{a},{b}}} out of range for n={m.n}")
        elif a == b:
            issues.append(f"diagonal {{{a},{b}}} is a loop")
        elif is_boundary_pair(m.n, a, b):
            issues.append(f"diagonal {{{a},{b}}} is a boundary edge")
    return issues


def _chords_nest(diagonals: Iterable[Diagonal]) -> bool:
    # Chords of a convex polygon are pairwise non-crossing iff their
    # endpoints nest like parentheses when read around the cycle.
    closing: Dict[int, List[Diagonal]] = {}
    opening: Dict[int, List[Diagonal]] = {}
    for a, b in diagonals:
        opening.setdefault(a, []).append((a, b))
        closing.setdefault(b, []).append((a, b))
    stack: List[Diagonal] = []
    for p in sorted(set(opening) | set(closing)):
        for chord in sorted(closing.get(p, []), key=lambda d: -d[0]):
            if not stack or stack[-1] != chord:
                return False
            stack.pop()
        for chord in sorted(opening.get(p, []), key=lambda d: -d[1]):
            stack.append(chord)
    return not stack


def _crossing_pairs(diagonals: List[Diagonal]) -> List[Tuple[Diagonal, Diagonal]]:
    pairs = []
    for i, (a, b) in enumerate(diagonals):
        for c, d in diagonals[i + 1:]:
            if a < c < b < d or c < a < d < b:
                pairs.append(((a, b), (c, d)))
    return pairs


def _face_issues(m: Mop) -> List[str]:
    embedding = nx.PlanarEmbedding()
    # Clockwise neighbour order around a vertex of a convex polygon is the
    # order of decreasing counterclockwise offset.
    embedding.set_data({
        v: sorted(m.neighbors[v], key=lambda u: -((u - v) % m.n))
        for v in range(m.n)
    })
    try:
        embedding.check_structure()
    except nx.NetworkXException as e:
        return [f"embedding is not planar: {e}"]

    marked = set()
    lengths = []
    for u, v in embedding.edges():
        if (u, v) in marked:
            continue
        lengths.append(len(embedding.traverse_face(u, v, mark_half_edges=marked)))

    expected = sorted([3] * (m.n - 2) + [m.n])
    if sorted(lengths) != expected:
        return [f"face lengths {sorted(lengths)} differ from a triangulated {m.n}-gon"]
    return []


def validate(m: Mop, traverse_faces: bool = True) -> ValidationReport:
    """
    Check every Mop invariant and report all failures.

    Face traversal is skipped when traverse_faces is False; reduction code
    uses that for mops it derives from already-validated ones.
    """
    report = ValidationReport()
    if m.n < 3:
        report.issues.append(f"n={m.n} is below 3")
        return report

    report.issues.extend(_range_issues(m))
    expected = m.n - 3
    if len(m.diagonals) != expected:
        report.issues.append(f"|diagonals| = {len(m.diagonals)} != {expected}")
    if report.issues:
        return report

    diagonals = m.sorted_diagonals
    if not _chords_nest(diagonals):
        for d1, d2 in _crossing_pairs(diagonals):
            report.issues.append(f"diagonal {{{d1[0]},{d1[1]}}} crosses {{{d2[0]},{d2[1]}}}")
        return report

    if len(m.edges) != 2 * m.n - 3:
        report.issues.append(f"edge count {len(m.edges)} != {2 * m.n - 3}")
    if traverse_faces:
        report.issues.extend(_face_issues(m))
    if m.n >= 4 and degree_two_count(m) < 2:
        report.issues.append("fewer than two vertices of degree 2")
    return report


def require_valid(m: Mop, traverse_faces: bool = False) -> None:
    report = validate(m, traverse_faces=traverse_faces)
    if not report.is_valid:
        raise InvalidMopError("; ".join(report.issues))


def _check_vertex(m: Mop, v: int) -> None:
    if not 0 <= v < m.n:
        raise InvalidMopError(f"vertex {v} out of range for n={m.n}")


def degree(m: Mop, v: int) -> int:
    _check_vertex(m, v)
    return len(m.neighbors[v])


def degree_two_count(m: Mop) -> int:
    return sum(1 for v in range(m.n) if len(m.neighbors[v]) == 2)


def distance(m: Mop, u: int, v: int) -> int:
    _check_vertex(m, u)
    _check_vertex(m, v)
    return nx.shortest_path_length(m.graph, u, v)


def is_internal_triangle(m: Mop, t: Iterable[int]) -> bool:
    tri = tuple(sorted(t))
    # every 3-cycle of a mop bounds an inner face
    if len(tri) != 3 or not all(m.has_edge(x, y) for x, y in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2]))):
        raise MopError(f"{tri} is not an inner face")
    a, b, c = tri
    return not any(m.is_outer_edge(x, y) for x, y in ((a, b), (b, c), (a, c)))


def internal_triangles(m: Mop) -> List[Triangle]:
    return [t for t in m.faces if is_internal_triangle(m, t)]


def has_internal_triangle(m: Mop) -> bool:
    return bool(internal_triangles(m))


def contraction_map(n: int, e: Diagonal) -> Dict[int, int]:
    """Old-to-new labels when the outer edge e of an n-vertex mop is contracted."""
    if not is_boundary_pair(n, *e):
        raise NotOuterEdgeError(f"{e} is not an outer edge for n={n}")
    low, high = normalize_pair(*e)
    if low == 0 and high == n - 1:
        # wrap-around edge: n-1 merges into 0
        return {v: (0 if v == n - 1 else v) for v in range(n)}
    return {v: (low if v == high else (v if v < high else v - 1)) for v in range(n)}


def contract_outer_edge(m: Mop, e: Diagonal) -> Mop:
    if m.n <= 3:
        raise InvalidMopError("cannot contract an edge of a triangle")
    mapping = contraction_map(m.n, e)
    new_n = m.n - 1
    diagonals = set()
    for a, b in m.diagonals:
        x, y = mapping[a], mapping[b]
        if x != y and not is_boundary_pair(new_n, x, y):
            diagonals.add(normalize_pair(x, y))
    return Mop(new_n, frozenset(diagonals))


def delete_ear_region(m: Mop, deleted: Iterable[int]) -> RegionDeletion:
    """
    Remove a union of ear regions and relabel the rest by compaction.

    The kept vertices, in cyclic order, must still be joined by edges of m and
    induce a mop; otherwise the removal is rejected.
    """
    removed = set(deleted)
    for v in removed:
        _check_vertex(m, v)
    kept = [v for v in range(m.n) if v not in removed]
    if len(kept) < 3:
        raise RegionDeletionError(f"deleting {sorted(removed)} leaves {len(kept)} vertices")

    for x, y in zip(kept, kept[1:] + kept[:1]):
        if not m.has_edge(x, y):
            raise RegionDeletionError(
                f"removal leaves a non-mop: kept vertices {x} and {y} are not adjacent"
            )

    index_map = {old: new for new, old in enumerate(kept)}
    new_n = len(kept)
    diagonals = set()
    for a, b in m.edges:
        if a in index_map and b in index_map:
            x, y = index_map[a], index_map[b]
            if not is_boundary_pair(new_n, x, y):
                diagonals.add(normalize_pair(x, y))
    result = Mop(new_n, frozenset(diagonals))

    report = validate(result, traverse_faces=False)
    if not report.is_valid:
        raise RegionDeletionError(f"removal leaves a non-mop: {'; '.join(report.issues)}")
    return RegionDeletion(result, index_map)


def insert_ear(m: Mop, i: int) -> Mop:
    """Add a new degree-2 vertex on the outer edge {i, i+1}; inverse of ear deletion."""
    _check_vertex(m, i)
    j = (i + 1) % m.n
    if j == 0:
        new = m.n

        def shift(v: int) -> int:
            return v
    else:
        new = i + 1

        def shift(v: int) -> int:
            return v if v <= i else v + 1

    edges = {normalize_pair(shift(a), shift(b)) for a, b in m.edges}
    edges |= {normalize_pair(shift(i), new), normalize_pair(new, shift(j))}
    return Mop(m.n + 1, frozenset(e for e in edges if not is_boundary_pair(m.n + 1, *e)))


def partition_side(m: Mop, d: Diagonal, side_count: int) -> List[int]:
    """Boundary vertices of the side of d holding side_count outer edges."""
    a, b = d
    if b - a == side_count:
        return list(range(a, b + 1))
    return [v % m.n for v in range(b, a + m.n + 1)]


def find_partition_diagonal(m: Mop) -> Tuple[Diagonal, int]:
    """
    Smallest diagonal (lexicographically) cutting off 4, 5 or 6 outer edges.

    The side a..b is preferred; the complementary side is only used when no
    diagonal qualifies that way.
    """
    if m.n < 6:
        raise InvalidMopError(f"partition needs n >= 6, got {m.n}")
    diagonals = m.sorted_diagonals
    for a, b in diagonals:
        if b - a in (4, 5, 6):
            return (a, b), b - a
    for a, b in diagonals:
        if m.n - (b - a) in (4, 5, 6):
            return (a, b), m.n - (b - a)
    raise PartitionError(f"no partition diagonal in {m!r}")


def cut_region(m: Mop, d: Diagonal, through: int) -> Region:
    """The region closed by diagonal d on the side containing vertex `through`."""
    a, b = normalize_pair(*d)
    if a < through < b:
        vertices = tuple(range(a, b + 1))
    else:
        vertices = tuple(v % m.n for v in range(b, a + m.n + 1))
    return Region(vertices=vertices, closing_diagonal=(a, b))


def common_neighbors_across(m: Mop, d: Diagonal) -> Tuple[int, int]:
    """For a diagonal, the common neighbour strictly inside a..b and the one outside."""
    a, b = normalize_pair(*d)
    if (a, b) not in m.diagonals:
        raise MopError(f"{d} is not a diagonal")
    common = m.neighbors[a] & m.neighbors[b]
    inside = [v for v in common if a < v < b]
    outside = [v for v in common if not a < v < b]
    if len(inside) != 1 or len(outside) != 1:
        raise InvalidMopError(f"diagonal {d} does not separate two triangles")
    return inside[0], outside[0]


def window_hub(m: Mop, start: int) -> Optional[int]:
    """
    Universal vertex of the 5-vertex window start..start+4, if the window is
    closed by an edge. Every 5-vertex mop has one.
    """
    window = [(start + i) % m.n for i in range(5)]
    if not m.has_edge(window[0], window[4]):
        return None
    for w in window:
        if all(u in m.neighbors[w] for u in window if u != w):
            return w
    return None


def obs3_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, (i + 4) % n) for i in range(n)]
