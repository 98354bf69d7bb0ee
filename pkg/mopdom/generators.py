"""
Instance sources: exhaustive enumeration, canonical codes, uniform random
sampling and the named families.
"""
import logging
import random
import struct
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, List, Optional, Tuple

from mopdom.mop_core import Diagonal, InvalidMopError, Mop, normalize_pair

logger = logging.getLogger(__name__)

ENUMERATION_MIN = 3
ENUMERATION_MAX = 16
FAMILIES = ('fan', 'serpentine')


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def triangulation_count(n: int) -> int:
    return catalan(n - 2)


@dataclass(frozen=True, order=True)
class CanonicalCode:
    code: bytes

    @property
    def hex(self) -> str:
        return self.code.hex()

    def __str__(self):
        return self.hex


def _sub_triangulations(i: int, j: int) -> Iterator[List[Diagonal]]:
    """Diagonal sets triangulating the sub-polygon i..j closed by the edge {i, j}."""
    if j - i < 2:
        yield []
        return
    for apex in range(i + 1, j):
        for left in _sub_triangulations(i, apex):
            for right in _sub_triangulations(apex, j):
                diagonals = left + right
                if apex - i >= 2:
                    diagonals = diagonals + [(i, apex)]
                if j - apex >= 2:
                    diagonals = diagonals + [(apex, j)]
                yield diagonals


def enumerate_triangulations(n: int, apex: Optional[int] = None) -> Iterator[Mop]:
    """
    Every labeled triangulation of the n-gon, ordered by the apex of the
    triangle on the edge {0, n-1}. Passing `apex` yields only that shard.
    """
    if not ENUMERATION_MIN <= n <= ENUMERATION_MAX:
        raise InvalidMopError(f"enumeration supports {ENUMERATION_MIN} <= n <= {ENUMERATION_MAX}, got {n}")
    apexes = range(1, n - 1) if apex is None else [apex]
    for a in apexes:
        if not 1 <= a <= n - 2:
            raise InvalidMopError(f"apex {a} out of range for n={n}")
        for left in _sub_triangulations(0, a):
            for right in _sub_triangulations(a, n - 1):
                diagonals = left + right
                if a >= 2:
                    diagonals.append((0, a))
                if n - 1 - a >= 2:
                    diagonals.append((a, n - 1))
                yield Mop(n, frozenset(diagonals))


def _relabelings(n: int) -> Iterator:
    for r in range(n):
        yield lambda v, r=r: (v + r) % n
        yield lambda v, r=r: (r - v) % n


def canonical_form(m: Mop) -> CanonicalCode:
    """Least diagonal list over the 2n rotations and reflections, packed as bytes."""
    best: Optional[List[Diagonal]] = None
    for relabel in _relabelings(m.n):
        image = sorted(normalize_pair(relabel(a), relabel(b)) for a, b in m.diagonals)
        if best is None or image < best:
            best = image
    values = [m.n] + [v for pair in best for v in pair]
    return CanonicalCode(struct.pack(f">{len(values)}H", *values))


def canonical_classes(mops: Iterable[Mop]) -> List[Mop]:
    """First mop of each dihedral class, in input order."""
    seen = set()
    representatives = []
    for m in mops:
        code = canonical_form(m)
        if code not in seen:
            seen.add(code)
            representatives.append(m)
    return representatives


@lru_cache(maxsize=None)
def _interval_count(length: int) -> int:
    # triangulations of a sub-polygon spanning `length` boundary edges plus its closing edge
    return 1 if length <= 1 else catalan(length - 1)


def random_mop(n: int, seed: Optional[int] = None) -> Mop:
    """Uniform over labeled triangulations: pick each apex with weight (#left) * (#right)."""
    if n < 3:
        raise InvalidMopError(f"n must be at least 3, got {n}")
    rng = random.Random(seed)
    diagonals: List[Diagonal] = []
    stack: List[Tuple[int, int]] = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        pick = rng.randrange(_interval_count(j - i))
        for apex in range(i + 1, j):
            weight = _interval_count(apex - i) * _interval_count(j - apex)
            if pick < weight:
                break
            pick -= weight
        if apex - i >= 2:
            diagonals.append((i, apex))
        if j - apex >= 2:
            diagonals.append((apex, j))
        stack.append((i, apex))
        stack.append((apex, j))
    return Mop(n, frozenset(diagonals))


def random_mops(n: int, count: int, seed: Optional[int] = None) -> List[Mop]:
    rng = random.Random(seed)
    return [random_mop(n, rng.getrandbits(64)) for _ in range(count)]


def family(name: str, n: int) -> Mop:
    if n < 3:
        raise InvalidMopError(f"n must be at least 3, got {n}")
    if name == 'fan':
        return Mop(n, frozenset((0, j) for j in range(2, n - 1)))
    if name == 'serpentine':
        # boundary order 0, 1, n-1, 2, n-2, ...; consecutive entries after the first are diagonals
        order = [0, 1]
        low, high = 2, n - 1
        while len(order) < n:
            order.append(high)
            high -= 1
            if len(order) < n:
                order.append(low)
                low += 1
        return Mop(n, frozenset(normalize_pair(order[t], order[t + 1]) for t in range(1, n - 2)))
    raise ValueError(f"unknown family {name!r}, expected one of {', '.join(FAMILIES)}")
