"""
MOP text format.

    line 1      n
    next lines  a b      one diagonal per line, 0-based, a < b, strictly increasing
    # ...       comment line, ignored anywhere
    blank line  ends a record; a file may hold several records
"""
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, List, Optional

from mopdom.mop_core import Mop, MopError

logger = logging.getLogger(__name__)


class MopFormatError(MopError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True)
class MopRecord:
    mop: Mop
    index: int
    line_no: int


def _ints(line_no: int, tokens: List[str]) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MopFormatError(line_no, f"expected integers, got {' '.join(tokens)!r}")


def parse_mops(lines: Iterable[str]) -> Iterator[MopRecord]:
    n: Optional[int] = None
    start = 0
    pairs = []
    index = 0

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith('#'):
            continue
        if not line:
            if n is not None:
                yield MopRecord(Mop(n, frozenset(pairs)), index, start)
                index += 1
                n, pairs = None, []
            continue

        tokens = line.split()
        if n is None:
            if len(tokens) != 1:
                raise MopFormatError(line_no, f"expected a vertex count, got {line!r}")
            n = _ints(line_no, tokens)[0]
            start = line_no
            continue

        if len(tokens) != 2:
            raise MopFormatError(line_no, f"expected a diagonal 'a b', got {line!r}")
        a, b = _ints(line_no, tokens)
        if a >= b:
            raise MopFormatError(line_no, f"diagonal endpoints must satisfy a < b, got {a} {b}")
        if pairs and (a, b) <= pairs[-1]:
            raise MopFormatError(line_no, f"diagonal {a} {b} is a repeat or out of order after {pairs[-1][0]} {pairs[-1][1]}")
        pairs.append((a, b))

    if n is not None:
        yield MopRecord(Mop(n, frozenset(pairs)), index, start)


def parse_text(text: str) -> List[MopRecord]:
    return list(parse_mops(text.splitlines()))


def format_mop(m: Mop, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(str(m.n))
    lines.extend(f"{a} {b}" for a, b in m.sorted_diagonals)
    return "\n".join(lines) + "\n\n"


def write_mops(stream: IO[str], mops: Iterable[Mop]) -> int:
    count = 0
    for m in mops:
        stream.write(format_mop(m))
        count += 1
    return count
