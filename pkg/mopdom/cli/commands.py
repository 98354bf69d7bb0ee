import logging
import os
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Sequence, TextIO, Tuple

from pydantic import ValidationError

from mopdom.bound_constructor import construct_bounded_2dd, trace_lines
from mopdom.config import Settings
from mopdom.generators import (
    canonical_classes, canonical_form, enumerate_triangulations, random_mops,
)
from mopdom.mop_core import (
    Mop, degree_two_count, disjunctive_bound, internal_triangles, validate,
)
from mopdom.mop_format import MopFormatError, MopRecord, format_mop, parse_mops, write_mops
from mopdom.schemas import PhaseTimes, ResultRecord, StatsRow, TightRow
from mopdom.solvers import exact_gamma, exact_gamma2d

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_EXACT_LIMIT = 3
EXIT_RANGE = 4


class CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        self.exit_code = exit_code
        self.message = message
        super().__init__(message)


def _elapsed_ms(start_time: float) -> float:
    return round((time.time() - start_time) * 1000, 2)


def _open_lines(path: str) -> Iterable[str]:
    if path == '-':
        return sys.stdin.read().splitlines()
    try:
        with open(path) as f:
            return f.read().splitlines()
    except OSError as e:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {e}")


def parse_records(lines: Iterable[str], source: str) -> List[Tuple[MopRecord, float]]:
    """Parse every record, pairing each with the milliseconds spent on it."""
    records = []
    parser = parse_mops(lines)
    try:
        while True:
            start_time = time.time()
            try:
                record = next(parser)
            except StopIteration:
                break
            records.append((record, _elapsed_ms(start_time)))
    except MopFormatError as e:
        raise CliError(EXIT_PARSE, f"{source}: {e}")
    logger.info(f"Read {len(records)} records from {source}")
    return records


def read_records(path: str) -> List[Tuple[MopRecord, float]]:
    return parse_records(_open_lines(path), path)


def _require_valid_records(records: Sequence[Tuple[MopRecord, float]]):
    for record, _ in records:
        report = validate(record.mop)
        if not report.is_valid:
            raise CliError(EXIT_INVALID,
                           f"record {record.index} (line {record.line_no}): {'; '.join(report.issues)}")


def _run(fn: Callable, items: Sequence, jobs: int) -> List:
    """Map fn over items, in input order, on up to `jobs` processes."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _base_record(record: MopRecord, parse_ms: float) -> ResultRecord:
    m = record.mop
    k = degree_two_count(m)
    return ResultRecord(
        instance_id=canonical_form(m).hex,
        record_index=record.index,
        n=m.n,
        k=k,
        internal_triangles=len(internal_triangles(m)),
        bound=disjunctive_bound(m.n, k),
        runtime_ms=PhaseTimes(parse=parse_ms),
    )


def _write_lines(out: TextIO, lines: Iterable[str]):
    for line in lines:
        out.write(line + "\n")
    out.flush()


# validate

def cmd_validate(args, settings: Settings) -> int:
    records = read_records(args.input)
    invalid = 0
    for record, _ in records:
        report = validate(record.mop)
        if report.is_valid:
            print(f"record {record.index} (line {record.line_no}): ok")
            continue
        invalid += 1
        for issue in report.issues:
            print(f"record {record.index} (line {record.line_no}): {issue}")
    if invalid:
        raise CliError(EXIT_INVALID, f"{invalid} of {len(records)} records are not valid mops")
    return EXIT_OK


# exact

def _exact_job(payload) -> str:
    record, parse_ms, cap, with_gamma = payload
    result = _base_record(record, parse_ms)

    start_time = time.time()
    exact = exact_gamma2d(record.mop, cap=cap)
    result.runtime_ms.exact = _elapsed_ms(start_time)
    if exact.exceeded_cap:
        result.anomalies.append(f"no 2DD-set of size <= {cap}")
    else:
        result.gamma2d = exact.value
        result.witness = list(exact.witness)

    if with_gamma:
        start_time = time.time()
        result.gamma = exact_gamma(record.mop)
        result.runtime_ms.gamma = _elapsed_ms(start_time)
    return result.to_json()


def cmd_exact(args, settings: Settings) -> int:
    records = read_records(args.input)
    _require_valid_records(records)
    for record, _ in records:
        if record.mop.n > settings.exact_soft_limit and not args.force:
            raise CliError(EXIT_EXACT_LIMIT,
                           f"record {record.index} has n={record.mop.n} > {settings.exact_soft_limit}; "
                           f"pass --force to run the exact solver anyway")

    payloads = [(record, parse_ms, args.cap, args.with_gamma) for record, parse_ms in records]
    _write_lines(sys.stdout, _run(_exact_job, payloads, settings.jobs))
    return EXIT_OK


# bound

def _bound_job(payload) -> Tuple[str, List[str], bool]:
    record, parse_ms, exact_limit = payload
    result = _base_record(record, parse_ms)

    start_time = time.time()
    trace = construct_bounded_2dd(record.mop, exact_limit=exact_limit)
    result.runtime_ms.construct = _elapsed_ms(start_time)

    result.constructor_set = list(trace.final_set)
    result.constructor_size = trace.final_set.size
    result.used_fallback = trace.used_fallback
    result.bound_proven = trace.bound_proven
    result.verified = bool(trace.final_set.verified)
    result.anomalies = [str(a) for a in trace.anomalies]
    return result.to_json(), trace_lines(trace), result.verified


def cmd_bound(args, settings: Settings) -> int:
    records = read_records(args.input)
    _require_valid_records(records)
    for record, _ in records:
        if record.mop.n < 7:
            raise CliError(EXIT_RANGE, f"record {record.index} has n={record.mop.n}; the bound needs n >= 7")

    if args.trace_dir:
        os.makedirs(args.trace_dir, exist_ok=True)

    payloads = [(record, parse_ms, settings.exact_soft_limit) for record, parse_ms in records]
    results = _run(_bound_job, payloads, settings.jobs)
    failed = 0
    for (record, _), (line, trace, verified) in zip(records, results):
        sys.stdout.write(line + "\n")
        if not verified:
            failed += 1
        if args.trace_dir:
            path = os.path.join(args.trace_dir, f"{record.index:06d}.jsonl")
            with open(path, 'w') as f:
                _write_lines(f, trace)
    sys.stdout.flush()

    if failed:
        raise CliError(EXIT_INVALID, f"{failed} constructed sets failed verification")
    return EXIT_OK


# enumerate / random

def cmd_enumerate(args, settings: Settings) -> int:
    if not 3 <= args.n <= settings.enumeration_limit:
        raise CliError(EXIT_RANGE, f"enumerate supports 3 <= n <= {settings.enumeration_limit}, got {args.n}")
    mops: Iterable[Mop] = enumerate_triangulations(args.n)
    if args.canonical:
        mops = canonical_classes(mops)
    count = write_mops(sys.stdout, mops)
    logger.info(f"Emitted {count} mops on {args.n} vertices")
    return EXIT_OK


def cmd_random(args, settings: Settings) -> int:
    if args.n < 3:
        raise CliError(EXIT_RANGE, f"n must be at least 3, got {args.n}")
    write_mops(sys.stdout, random_mops(args.n, args.count, args.seed))
    return EXIT_OK


# search-tight

def _tight_job(m: Mop):
    bound = disjunctive_bound(m.n, degree_two_count(m))
    exact = exact_gamma2d(m, cap=max(bound, 1))
    return exact.value is not None and exact.value == bound, exact.value, bound


def cmd_search_tight(args, settings: Settings) -> int:
    rows: List[TightRow] = []
    for n in range(args.min_n, args.max_n + 1):
        if args.random:
            if n < 3:
                continue
            candidates = random_mops(n, args.samples, None if args.seed is None else args.seed + n)
        else:
            if not 3 <= n <= settings.enumeration_limit:
                raise CliError(EXIT_RANGE, f"exhaustive search supports 3 <= n <= {settings.enumeration_limit}")
            candidates = canonical_classes(enumerate_triangulations(n))

        start_time = time.time()
        outcomes = _run(_tight_job, candidates, settings.jobs)
        found = 0
        example = None
        for m, (tight, value, bound) in zip(candidates, outcomes):
            if not tight:
                continue
            found += 1
            if example is None:
                example = canonical_form(m).hex
            sys.stdout.write(format_mop(m, comment=f"n={m.n} gamma2d={value} bound={bound}"))
        rows.append(TightRow(n=n, searched=len(candidates), found=found, example=example))
        logger.info(f"n={n}: {found} of {len(candidates)} instances meet the bound ({_elapsed_ms(start_time)}ms)")

    sys.stdout.write("# n searched found example\n")
    for row in rows:
        sys.stdout.write(f"# {row.n} {row.searched} {row.found} {row.example or '-'}\n")
    return EXIT_OK


# stats

def _stats_job(m: Mop) -> Tuple[int, int, int, int]:
    k = degree_two_count(m)
    return m.n, k, len(internal_triangles(m)), exact_gamma2d(m).value


def _stats_from_results(lines: List[str]) -> List[Tuple[int, int, int, int]]:
    rows = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = ResultRecord.model_validate_json(line)
        except ValidationError as e:
            raise CliError(EXIT_PARSE, f"line {line_no}: {e.errors()[0]['msg']}")
        if record.gamma2d is None:
            raise CliError(EXIT_PARSE, f"line {line_no}: record has no gamma2d")
        rows.append((record.n, record.k, record.internal_triangles, record.gamma2d))
    return rows


def aggregate_stats(samples: Iterable[Tuple[int, int, int, int]]) -> List[StatsRow]:
    by_n = {}
    for n, k, t, g in samples:
        by_n.setdefault(n, []).append((k, t, g))
    rows = []
    for n in sorted(by_n):
        group = by_n[n]
        rows.append(StatsRow(
            n=n,
            instances=len(group),
            mean_gamma2d=sum(g for _, _, g in group) / len(group),
            max_gamma2d=max(g for _, _, g in group),
            mean_k=sum(k for k, _, _ in group) / len(group),
            k_distribution=dict(Counter(k for k, _, _ in group)),
            internal_triangle_distribution=dict(Counter(t for _, t, _ in group)),
            slack_histogram=dict(Counter(disjunctive_bound(n, k) - g for k, _, g in group)),
        ))
    return rows


def cmd_stats(args, settings: Settings) -> int:
    if args.n is not None:
        if not 3 <= args.n <= 12:
            raise CliError(EXIT_RANGE, f"stats --n computes exact columns for 3 <= n <= 12, got {args.n}")
        samples = _run(_stats_job, list(enumerate_triangulations(args.n)), settings.jobs)
    else:
        lines = list(_open_lines(args.input))
        first = next((line.strip() for line in lines if line.strip() and not line.startswith('#')), '')
        if first.startswith('{'):
            samples = _stats_from_results(lines)
        else:
            records = parse_records(lines, args.input)
            _require_valid_records(records)
            mops = [record.mop for record, _ in records]
            for m in mops:
                if m.n > settings.exact_soft_limit:
                    raise CliError(EXIT_EXACT_LIMIT, f"n={m.n} is above the exact limit {settings.exact_soft_limit}")
            samples = _run(_stats_job, mops, settings.jobs)

    print(StatsRow.header())
    for row in aggregate_stats(samples):
        print(row.to_csv())
    return EXIT_OK
