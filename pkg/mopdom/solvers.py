import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Tuple

from mopdom.mop_core import (
    Mop, MopError, MopMetrics, degree_two_count, internal_triangles
)

logger = logging.getLogger(__name__)

EXACT_SOFT_LIMIT = 20


class CapError(MopError):
    pass


@dataclass(frozen=True)
class DisjunctiveSet:
    vertices: Tuple[int, ...]
    verified: Optional[bool] = None

    @classmethod
    def of(cls, vertices: Iterable[int], verified: Optional[bool] = None) -> 'DisjunctiveSet':
        return cls(tuple(sorted(set(vertices))), verified)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def as_set(self) -> FrozenSet[int]:
        return frozenset(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices


@dataclass(frozen=True)
class ExactResult:
    value: Optional[int]
    witness: Optional[DisjunctiveSet]

    @property
    def exceeded_cap(self) -> bool:
        return self.value is None


def _as_set(m: Mop, s: Iterable[int]) -> FrozenSet[int]:
    vertices = frozenset(s)
    for v in vertices:
        if not 0 <= v < m.n:
            raise MopError(f"vertex {v} out of range for n={m.n}")
    return vertices


def is_disjunctively_dominated(m: Mop, v: int, s: FrozenSet[int]) -> bool:
    if v in s or m.neighbors[v] & s:
        return True
    return len(m.second_neighbors[v] & s) >= 2


def undominated(m: Mop, s: Iterable[int], targets: Optional[Iterable[int]] = None) -> List[int]:
    """Vertices of `targets` (default: all) that s fails to disjunctively dominate."""
    chosen = _as_set(m, s)
    pool = range(m.n) if targets is None else targets
    return [v for v in pool if not is_disjunctively_dominated(m, v, chosen)]


def is_2dd_set(m: Mop, s: Iterable[int]) -> bool:
    chosen = _as_set(m, s)
    return all(is_disjunctively_dominated(m, v, chosen) for v in range(m.n))


def is_dominating_set(m: Mop, s: Iterable[int]) -> bool:
    chosen = _as_set(m, s)
    return all(v in chosen or m.neighbors[v] & chosen for v in range(m.n))


@lru_cache(maxsize=4096)
def _masks(m: Mop) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    closed = []
    second = []
    for v in range(m.n):
        mask = 1 << v
        for u in m.neighbors[v]:
            mask |= 1 << u
        closed.append(mask)
        mask2 = 0
        for u in m.second_neighbors[v]:
            mask2 |= 1 << u
        second.append(mask2)
    return tuple(closed), tuple(second)


def _popcount(x: int) -> int:
    return bin(x).count('1')


def _ball_prefix(m: Mop) -> List[int]:
    # best-case coverage of r vertices: the r largest closed balls of radius 2
    sizes = sorted(
        (1 + len(m.neighbors[v]) + len(m.second_neighbors[v]) for v in range(m.n)),
        reverse=True,
    )
    prefix = [0]
    for s in sizes:
        prefix.append(prefix[-1] + s)
    return prefix


def exact_gamma2d(m: Mop, cap: Optional[int] = None) -> ExactResult:
    """
    Minimum 2DD-set by increasing cardinality; the witness is the
    lexicographically least set of minimum size.
    """
    n = m.n
    if cap is None:
        cap = n
    if cap <= 0 and n > 0:
        raise CapError(f"cap must be positive for a graph on {n} vertices")
    if n > EXACT_SOFT_LIMIT:
        logger.warning(f"exact search on n={n} is above the soft limit of {EXACT_SOFT_LIMIT}")

    closed, second = _masks(m)
    prefix = _ball_prefix(m)
    for r in range(1, min(cap, n) + 1):
        if prefix[r] < n:
            continue
        for combo in combinations(range(n), r):
            chosen = 0
            for v in combo:
                chosen |= 1 << v
            for v in range(n):
                if closed[v] & chosen:
                    continue
                if _popcount(second[v] & chosen) >= 2:
                    continue
                break
            else:
                return ExactResult(r, DisjunctiveSet.of(combo, verified=True))
    return ExactResult(None, None)


def exact_gamma(m: Mop) -> int:
    n = m.n
    if n > EXACT_SOFT_LIMIT:
        logger.warning(f"exact search on n={n} is above the soft limit of {EXACT_SOFT_LIMIT}")
    closed, _ = _masks(m)
    full = (1 << n) - 1
    for r in range(1, n + 1):
        for combo in combinations(range(n), r):
            covered = 0
            for v in combo:
                covered |= closed[v]
            if covered == full:
                return r
    return n


def greedy_2dd(m: Mop) -> DisjunctiveSet:
    chosen = set()
    missing = set(range(m.n))
    while missing:
        best, best_gain = None, 0
        for v in range(m.n):
            if v in chosen:
                continue
            trial = frozenset(chosen | {v})
            gain = sum(1 for w in missing if is_disjunctively_dominated(m, w, trial))
            if gain > best_gain:
                best, best_gain = v, gain
        chosen.add(best)
        frozen = frozenset(chosen)
        missing = {w for w in missing if not is_disjunctively_dominated(m, w, frozen)}
    return DisjunctiveSet.of(chosen, verified=is_2dd_set(m, chosen))


def compute_metrics(m: Mop, exact: bool = True, with_gamma: bool = True) -> MopMetrics:
    gamma2d = exact_gamma2d(m).value if exact else None
    gamma = exact_gamma(m) if exact and with_gamma else None
    return MopMetrics(
        n=m.n,
        k=degree_two_count(m),
        internal_triangles=len(internal_triangles(m)),
        gamma=gamma,
        gamma2d=gamma2d,
    )
