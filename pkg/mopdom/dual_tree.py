import logging
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from mopdom.mop_core import Mop, MopError, Triangle, require_valid

logger = logging.getLogger(__name__)


class NoBranchNodeError(MopError):
    pass


class PatternAnomaly(MopError):
    pass


@dataclass
class DualTree:
    """
    Tree of inner triangles; two nodes are adjacent when their triangles
    share a diagonal. Node ids index `nodes`, which is sorted by vertex triple.
    """
    nodes: List[Triangle]
    edges: List[Tuple[int, int]]
    graph: nx.Graph = field(repr=False)
    root: Optional[int] = None
    parent: Dict[int, Optional[int]] = field(default_factory=dict, repr=False)
    children: Dict[int, List[int]] = field(default_factory=dict, repr=False)
    depth: Dict[int, int] = field(default_factory=dict, repr=False)

    def degree(self, node: int) -> int:
        return self.graph.degree[node]

    @property
    def leaves(self) -> List[int]:
        return [v for v in range(len(self.nodes)) if self.degree(v) <= 1]

    @property
    def branch_nodes(self) -> List[int]:
        return [v for v in range(len(self.nodes)) if self.degree(v) == 3]

    @property
    def is_path(self) -> bool:
        return not self.branch_nodes

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    def shared_edge(self, a: int, b: int) -> Tuple[int, int]:
        common = sorted(set(self.nodes[a]) & set(self.nodes[b]))
        if len(common) != 2:
            raise MopError(f"nodes {a} and {b} do not share an edge")
        return common[0], common[1]

    def subtree(self, node: int) -> List[int]:
        result, stack = [], [node]
        while stack:
            v = stack.pop()
            result.append(v)
            stack.extend(self.children.get(v, []))
        return sorted(result)

    def subtree_vertices(self, node: int) -> FrozenSet[int]:
        vertices = set()
        for v in self.subtree(node):
            vertices.update(self.nodes[v])
        return frozenset(vertices)

    def dump(self) -> str:
        lines = []
        for i, (a, b, c) in enumerate(self.nodes):
            kids = self.children.get(i, sorted(self.graph.neighbors(i)))
            lines.append(f"{i}: ({a},{b},{c}) -> [{', '.join(str(k) for k in kids)}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class LeafContext:
    leaf: int
    nearest_deg3: Optional[int]
    dist: int
    path_triangles: Tuple[Triangle, ...]
    region_shape: str = 'NONE'


@dataclass(frozen=True)
class LeafWalk:
    """
    Vertex names along a chain of triangles leaving a leaf.

    F1 = {u1,u2,u3} is the leaf, F2 = {u2,u3,u4}, and from F3 on every
    triangle is {u_p, u_(i+1), u_(i+2)} with pivot p recorded in `pivots`.
    """
    names: Dict[int, int]
    pivots: Dict[int, int]

    def u(self, i: int) -> int:
        return self.names[i]


def build_dual(m: Mop, check: bool = True) -> DualTree:
    if check:
        require_valid(m)
    nodes = list(m.faces)
    by_edge: Dict[Tuple[int, int], List[int]] = {}
    for i, (a, b, c) in enumerate(nodes):
        for e in ((a, b), (b, c), (a, c)):
            by_edge.setdefault(e, []).append(i)
    edges = sorted(tuple(ids) for e, ids in by_edge.items() if len(ids) == 2)

    graph = nx.Graph()
    graph.add_nodes_from(range(len(nodes)))
    graph.add_edges_from(edges)
    return DualTree(nodes=nodes, edges=edges, graph=graph)


def _farthest(graph: nx.Graph, source: int) -> Tuple[int, Dict[int, int]]:
    dist = nx.single_source_shortest_path_length(graph, source)
    far = max(dist.values())
    return min(v for v, d in dist.items() if d == far), dist


def root_at_diametrical_leaf(t: DualTree) -> DualTree:
    """
    Root at the smallest-id leaf lying on a longest path.

    In a tree the eccentricity of any node is its larger distance to the two
    ends of one diameter, so three BFS passes find every diametrical leaf.
    """
    if len(t.nodes) == 1:
        root = 0
    else:
        a, _ = _farthest(t.graph, 0)
        b, dist_a = _farthest(t.graph, a)
        _, dist_b = _farthest(t.graph, b)
        diameter = dist_a[b]
        root = min(v for v in t.leaves if max(dist_a[v], dist_b[v]) == diameter)

    parent: Dict[int, Optional[int]] = {root: None}
    children: Dict[int, List[int]] = {}
    depth = {root: 0}
    order = [root]
    for v in order:
        kids = sorted(u for u in t.graph.neighbors(v) if u not in parent)
        children[v] = kids
        for u in kids:
            parent[u] = v
            depth[u] = depth[v] + 1
            order.append(u)
    return replace(t, root=root, parent=parent, children=children, depth=depth)


def tree_diameter(t: DualTree) -> int:
    if len(t.nodes) == 1:
        return 0
    a, _ = _farthest(t.graph, 0)
    b, dist_a = _farthest(t.graph, a)
    return dist_a[b]


def name_walk(triangles: Sequence[Triangle]) -> LeafWalk:
    if len(triangles) < 2:
        raise MopError("a walk needs at least two triangles")
    faces = [set(tri) for tri in triangles]
    for x, y in zip(faces, faces[1:]):
        if len(x & y) != 2:
            raise MopError("consecutive triangles must share an edge")

    names: Dict[int, int] = {}
    pivots: Dict[int, int] = {}
    shared = faces[0] & faces[1]
    names[1] = (faces[0] - faces[1]).pop()
    names[4] = (faces[1] - faces[0]).pop()
    if len(faces) >= 3:
        hinge = shared & faces[2]
        if len(hinge) != 1:
            raise MopError("walk turns back on itself at F3")
        names[2] = hinge.pop()
        names[3] = (shared - {names[2]}).pop()
        names[5] = (faces[2] - faces[1]).pop()
        pivots[3] = 2
    else:
        names[2], names[3] = sorted(shared)

    index_of = {v: i for i, v in names.items()}
    for i in range(4, len(faces) + 1):
        current, previous = faces[i - 1], faces[i - 2]
        hinge = current & previous
        newest = names[i + 1]
        if newest not in hinge:
            raise MopError(f"walk leaves F{i - 1} through an old edge")
        pivot = (hinge - {newest}).pop()
        names[i + 2] = (current - previous).pop()
        index_of[names[i + 2]] = i + 2
        pivots[i] = index_of[pivot]
    return LeafWalk(names=names, pivots=pivots)


def long_leg_class(walk: LeafWalk) -> Optional[str]:
    """'a' when the sixth triangle pivots on u5, 'b' when it pivots on u4."""
    if walk.pivots.get(4) != 4:
        return None
    return {5: 'a', 4: 'b'}.get(walk.pivots.get(6))


def long_region_shape(walk: LeafWalk, dist: int) -> str:
    if walk.pivots.get(4) != 4:
        return 'NONE'
    p5, p6 = walk.pivots.get(5), walk.pivots.get(6)
    if dist == 5:
        if p5 == p6 == 5:
            return 'H1'
        if p5 == p6 == 4:
            return 'H2'
    if dist == 6:
        p7 = walk.pivots.get(7)
        return {(5, 5): 'H5', (5, 7): 'H6', (4, 4): 'H7', (4, 7): 'H8'}.get((p6, p7), 'NONE')
    return 'NONE'


def _short_leg(t: DualTree, branch: int, first: int) -> Optional[List[int]]:
    """The path branch -> first -> ... -> leaf when it has no other branching, else None."""
    path, previous, current = [first], branch, first
    while t.degree(current) == 2:
        nxt = [u for u in t.graph.neighbors(current) if u != previous][0]
        previous, current = current, nxt
        path.append(current)
    return path if t.degree(current) == 1 else None


def _classify_short_legs(t: DualTree, branch: int, legs: List[List[int]]) -> str:
    pair = sorted(legs, key=len)
    lengths = tuple(len(p) for p in pair)
    edges = [set(t.shared_edge(branch, p[0])) for p in pair]
    apex = (edges[0] & edges[1]).pop()

    def reaches_apex(path: List[int]) -> bool:
        return apex in t.nodes[path[-1]]

    if lengths == (1, 2):
        return 'H9' if reaches_apex(pair[1]) else 'H10'
    if lengths == (2, 2):
        hits = sum(1 for p in pair if reaches_apex(p))
        return {2: 'H11', 1: 'H12', 0: 'H13'}[hits]
    return 'NONE'


def short_region_shape(t: DualTree, branch: int, leaf_leg: List[int]) -> str:
    """Shapes H9-H13 of two short legs meeting at a branch triangle."""
    legs = []
    for u in sorted(t.graph.neighbors(branch)):
        path = leaf_leg if u == leaf_leg[0] else _short_leg(t, branch, u)
        if path is not None and len(path) in (1, 2):
            legs.append(path)
    if leaf_leg not in legs or len(legs) < 2:
        return 'NONE'
    other = min((p for p in legs if p is not leaf_leg), key=lambda p: (len(p), p[0]))
    return _classify_short_legs(t, branch, [leaf_leg, other])


def rooted_short_shape(t: DualTree, v: int) -> str:
    """The H9-H13 shape formed by the two child legs of v in a rooted tree."""
    if not t.is_rooted:
        raise MopError("tree must be rooted")
    legs = [_short_leg(t, v, c) for c in t.children[v]]
    if len(legs) != 2 or any(p is None or len(p) not in (1, 2) for p in legs):
        return 'NONE'
    return _classify_short_legs(t, v, legs)


def leaf_context(m: Mop, t: DualTree, leaf: int) -> LeafContext:
    if len(t.nodes) > 1 and t.degree(leaf) != 1:
        raise MopError(f"node {leaf} is not a leaf")
    branches = t.branch_nodes
    if not branches:
        raise NoBranchNodeError("no degree-3 node: the dual tree is a path")

    dist = nx.single_source_shortest_path_length(t.graph, leaf)
    nearest = min(branches, key=lambda v: (dist[v], v))
    path = nx.shortest_path(t.graph, leaf, nearest)
    triangles = tuple(t.nodes[v] for v in path)
    d = dist[nearest]

    shape = 'NONE'
    if d in (5, 6):
        shape = long_region_shape(name_walk(triangles), d)
    elif d in (1, 2):
        shape = short_region_shape(t, nearest, list(reversed(path[:-1])))
    return LeafContext(leaf, nearest, d, triangles, shape)


# Rooted shapes, written as canonical bracket strings.

def leg_code(length: int) -> str:
    return '(' * length + ')' * length


def node_code(*children: str) -> str:
    return '(' + ''.join(sorted(children)) + ')'


def bracket_codes(t: DualTree) -> Dict[int, str]:
    if not t.is_rooted:
        raise MopError("tree must be rooted")
    codes: Dict[int, str] = {}
    for v in sorted(t.depth, key=lambda x: -t.depth[x]):
        codes[v] = node_code(*(codes[c] for c in t.children[v]))
    return codes


L1, L2, L5, L6 = leg_code(1), leg_code(2), leg_code(5), leg_code(6)
T_PRIME = node_code(L1, L2)
T_DOUBLE = node_code(L2, L2)


@dataclass(frozen=True)
class TreePattern:
    pattern_id: str
    codes: Tuple[str, ...]
    leg_classes: Optional[Tuple[str, ...]] = None
    description: str = ''

    @property
    def size(self) -> int:
        return self.codes[0].count('(')

    @property
    def leaves(self) -> int:
        return self.codes[0].count('()')


def _spider(pid: str, a: int, b: int, classes: Optional[Tuple[str, ...]] = None) -> TreePattern:
    suffix = f" legs {classes}" if classes else ''
    return TreePattern(pid, (node_code(leg_code(a), leg_code(b)),), classes,
                       f"spider S({a},{b}){suffix}")


TREE_PATTERNS: List[TreePattern] = [
    _spider('T1', 1, 1),
    TreePattern('T2', (T_PRIME,), None, "T' = S(1,2)"),
    TreePattern('T3', (node_code(T_PRIME),), None, "chain above T'"),
    TreePattern('T4', (node_code(T_PRIME, L1),), None, "T' beside a leaf"),
    TreePattern('T5', (node_code(T_PRIME, L2),), None, "T' beside L2"),
    TreePattern('T6', (node_code(T_PRIME, T_PRIME),), None, "T' beside T'"),
    TreePattern('T7', (node_code(T_PRIME, L5),), None, "T' beside L5"),
    TreePattern('T8', (node_code(T_PRIME, L6),), None, "T' beside L6"),
    TreePattern('T9', (node_code(T_PRIME, T_DOUBLE),), None, "T' beside T''"),
    TreePattern('T10', (T_DOUBLE,), None, "T'' = S(2,2)"),
    TreePattern('T11', (node_code(T_DOUBLE),), None, "chain above T''"),
    TreePattern('T12', (node_code(T_DOUBLE, L1),), None, "T'' beside a leaf"),
    TreePattern('T13', (node_code(T_DOUBLE, L2),), None, "T'' beside L2"),
    TreePattern('T14', (node_code(T_DOUBLE, T_DOUBLE),), None, "T'' beside T''"),
    TreePattern('T15', (node_code(T_DOUBLE, L5), node_code(T_DOUBLE, L6)), None, "T'' beside a long leg"),
    _spider('T16', 1, 5, ('a',)),
    _spider('T17', 1, 5, ('b',)),
    _spider('T18', 1, 6, ('a',)),
    _spider('T19', 1, 6, ('b',)),
    _spider('T20', 2, 5, ('a',)),
    _spider('T21', 2, 5, ('b',)),
    _spider('T22', 2, 6, ('a',)),
    _spider('T23', 2, 6, ('b',)),
    _spider('T24', 5, 5, ('a', 'a')),
    _spider('T25', 5, 5, ('a', 'b')),
    _spider('T26', 5, 5, ('b', 'b')),
    _spider('T27', 5, 6),
    _spider('T28', 6, 6),
]

_BY_CODE: Dict[str, List[TreePattern]] = {}
for _pattern in TREE_PATTERNS:
    for _code in _pattern.codes:
        _BY_CODE.setdefault(_code, []).append(_pattern)


@dataclass(frozen=True)
class PatternMatch:
    pattern_id: str
    root: int


def _leaf_below(t: DualTree, node: int) -> int:
    while t.children[node]:
        node = t.children[node][0]
    return node


def _long_leg_classes(t: DualTree, v: int, codes: Dict[int, str]) -> Tuple[str, ...]:
    classes = []
    for c in t.children[v]:
        if codes[c] not in (L5, L6):
            continue
        leaf = _leaf_below(t, c)
        path = [leaf]
        while path[-1] != v:
            path.append(t.parent[path[-1]])
        cls = long_leg_class(name_walk([t.nodes[x] for x in path]))
        classes.append(cls or '?')
    return tuple(sorted(classes))


def iter_pattern_matches(t: DualTree) -> Iterator[PatternMatch]:
    """Every (pattern, subtree root) pair, deepest roots first, then smallest id."""
    if not t.is_rooted:
        raise MopError("tree must be rooted at a diametrical leaf")
    if t.is_path:
        raise NoBranchNodeError("no degree-3 node: the dual tree is a path")
    codes = bracket_codes(t)
    for v in sorted(t.depth, key=lambda x: (-t.depth[x], x)):
        if v == t.root:
            continue
        for pattern in _BY_CODE.get(codes[v], []):
            if pattern.leg_classes is not None:
                if _long_leg_classes(t, v, codes) != pattern.leg_classes:
                    continue
            yield PatternMatch(pattern.pattern_id, v)


def match_maximal_subtree(t: DualTree) -> PatternMatch:
    for found in iter_pattern_matches(t):
        return found
    logger.warning(f"no catalogued subtree in rooted tree:\n{t.dump()}")
    raise PatternAnomaly("no catalogued maximal subtree matches")
