import logging
import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from mopdom.dual_tree import (
    DualTree, bracket_codes, build_dual, iter_pattern_matches, name_walk,
    root_at_diametrical_leaf, rooted_short_shape,
)
from mopdom.mop_core import (
    InvalidMopError, Mop, MopError, delete_ear_region, degree_two_count,
    disjunctive_bound, find_partition_diagonal, has_internal_triangle,
    obs3_pairs, partition_side, require_valid, window_hub,
)
from mopdom.reductions import (
    LEAF_CHAIN_RULES, MAX_BUDGET, TREE_RULES_BY_PATTERN, LeafChainPattern,
    LeafChainRule, ReductionStep, RuleTemplate, TreeRule, k_drop,
)
from mopdom.schemas import TraceLine, TraceSummary
from mopdom.solvers import (
    EXACT_SOFT_LIMIT, DisjunctiveSet, exact_gamma2d, greedy_2dd, is_2dd_set, undominated,
)

logger = logging.getLogger(__name__)

SMALL_MIN = 7
SMALL_MAX = 12
REDUCTION_MIN = 13


class SmallCaseError(MopError):
    pass


class LiftError(MopError):
    pass


@dataclass(frozen=True)
class Anomaly:
    level_n: int
    kind: str
    detail: str

    def __str__(self):
        return f"n={self.level_n} {self.kind}: {self.detail}"


@dataclass
class ConstructionTrace:
    steps: List[ReductionStep]
    # augmentation actually added at each step; None where the level was re-solved by fallback
    augments: List[Optional[Tuple[int, ...]]]
    base_case: str
    base_set: DisjunctiveSet
    final_set: DisjunctiveSet
    bound: int
    used_fallback: bool
    bound_proven: bool = True
    anomalies: List[Anomaly] = field(default_factory=list)
    execution_time_ms: float = 0.0
    exact_limit: int = EXACT_SOFT_LIMIT

    @property
    def size(self) -> int:
        return self.final_set.size

    @property
    def within_bound(self) -> bool:
        return self.final_set.size <= self.bound


# Sets of size at most the bound, tried in the order of the small-order case analysis.

def _rotations(n: int, offsets: Sequence[int], count: int) -> Iterator[Tuple[int, ...]]:
    for i in range(count):
        yield tuple((i + o) % n for o in offsets)


def _four_edge_window(m: Mop, side: List[int], p: int) -> int:
    """Start of the side holding exactly four outer edges."""
    if p == 4:
        return side[0]
    # p == 6: the complementary side has 10 - 6 = 4 outer edges
    return side[-1]


def _candidates_ten(m: Mop) -> Iterator[Tuple[int, ...]]:
    d, p = find_partition_diagonal(m)
    side = partition_side(m, d, p)
    if p == 5:
        yield d
    else:
        start = _four_edge_window(m, side, p)
        hub = window_hub(m, start)
        if hub is not None:
            yield hub, (start + 7) % m.n
    # the same constructions on every other partitioning diagonal
    for a, b in m.sorted_diagonals:
        for start, count in ((a, b - a), (b, m.n - (b - a))):
            if count == 5:
                yield a, b
            elif count == 4:
                hub = window_hub(m, start)
                if hub is not None:
                    yield hub, (start + 7) % m.n


def _candidates_eleven(m: Mop) -> Iterator[Tuple[int, ...]]:
    if has_internal_triangle(m):
        yield from _rotations(m.n, (0, 4, 8), m.n)
        return
    hubs = {x: window_hub(m, x) for x in range(m.n)}
    for start, hub in hubs.items():
        if hub is None:
            continue
        if hub == start:
            yield start, (start + 7) % m.n
        elif hub == (start + 4) % m.n:
            yield hub, (start + 8) % m.n
        else:
            # the hub sits inside its window: pair it with the hub of a
            # 5-vertex window on the far side
            for other_start, other in hubs.items():
                if other is not None and other_start != start:
                    yield hub, other


def _small_candidates(m: Mop) -> Iterator[Tuple[int, ...]]:
    n = m.n
    if n <= 8:
        yield from obs3_pairs(n)
    elif n == 9:
        for w in range(n):
            if len(m.neighbors[w]) == 2:
                yield (w - 1) % n, (w + 4) % n
                yield (w + 1) % n, (w - 4) % n
    elif n == 10:
        yield from _candidates_ten(m)
    elif n == 11:
        yield from _candidates_eleven(m)
    else:
        yield from _rotations(n, (0, 4, 8), 4)


def construct_small(m: Mop) -> DisjunctiveSet:
    if not SMALL_MIN <= m.n <= SMALL_MAX:
        raise InvalidMopError(f"construct_small needs 7 <= n <= 12, got n={m.n}")
    bound = disjunctive_bound(m.n, degree_two_count(m))
    for candidate in _small_candidates(m):
        if len(set(candidate)) <= bound and is_2dd_set(m, candidate):
            return DisjunctiveSet.of(candidate, verified=True)
    raise SmallCaseError(f"no small-order construction verified for {m!r}")


class ReductionFinder:
    """
    Search for the first applicable reduction on a mop of order >= 13.

    Phase 1: leaf-chain rules, leaves in id order.
    Phase 2: tree rules on the dual tree rooted at a diametrical leaf,
    deepest matched subtree first. A tree deletion with slack but no
    self-contained certificate is kept as `deferred`; it is returned only
    when nothing else binds, and its lift is resolved against the
    sub-solution from the region pool.
    """

    def __init__(self, m: Mop):
        self.m = m
        self.k = degree_two_count(m)
        self.bound = disjunctive_bound(m.n, self.k)
        self.tree = build_dual(m, check=False)
        self.anomalies: List[Anomaly] = []
        self.deferred: Optional[Tuple[TreeRule, ReductionStep, Mop]] = None

    def find(self) -> Optional[Tuple[ReductionStep, Dict[str, int]]]:
        # Phase 1: leaf-chain rules
        for leaf in self.tree.leaves:
            step = self._try_leaf(leaf)
            if step is not None:
                return step, dict(step.binding)

        # Phase 2: tree rules
        if self.tree.is_path:
            return None
        rooted = root_at_diametrical_leaf(self.tree)
        codes = bracket_codes(rooted)
        matched = False
        for match in iter_pattern_matches(rooted):
            matched = True
            for rule in TREE_RULES_BY_PATTERN.get(match.pattern_id, []):
                step = self._bind_tree(rule, match.root, rooted, codes)
                if step is not None:
                    return step, dict(step.binding)
        if not matched:
            self._anomaly('no-pattern', "no catalogued maximal subtree in the dual tree")
        if self.deferred is not None:
            rule, step, reduced = self.deferred
            logger.debug(f"{step.rule_id}: lift resolved from the region pool at n={self.m.n}")
            self._check_k_drop(rule, reduced)
            return step, dict(step.binding)
        return None

    def _anomaly(self, kind: str, detail: str):
        anomaly = Anomaly(self.m.n, kind, detail)
        logger.warning(f"anomaly {anomaly}")
        self.anomalies.append(anomaly)

    def _chain_nodes(self, leaf: int, length: int) -> List[int]:
        nodes = [leaf]
        previous = None
        while len(nodes) < length:
            current = nodes[-1]
            if len(nodes) > 1 and self.tree.degree(current) != 2:
                break
            ahead = [u for u in self.tree.graph.neighbors(current) if u != previous]
            if len(ahead) != 1:
                break
            previous = current
            nodes.append(ahead[0])
        return nodes

    def _chain_matches(self, pattern: LeafChainPattern, nodes: List[int], pivots: Dict[int, int]) -> bool:
        if len(nodes) < pattern.walk_length:
            return False
        if any(self.tree.degree(nodes[i - 1]) != 2 for i in range(2, pattern.deg2_upto + 1)):
            return False
        if pattern.branch_at is not None and self.tree.degree(nodes[pattern.branch_at - 1]) != 3:
            return False
        return all(pivots.get(i) == p for i, p in pattern.pivots)

    def _try_leaf(self, leaf: int) -> Optional[ReductionStep]:
        longest = max(rule.pattern.walk_length for rule in LEAF_CHAIN_RULES)
        nodes = self._chain_nodes(leaf, longest)
        if len(nodes) < 4:
            return None
        walk = name_walk([self.tree.nodes[v] for v in nodes])
        for rule in LEAF_CHAIN_RULES:
            if self._chain_matches(rule.pattern, nodes, walk.pivots):
                step = self._bind_leaf_chain(rule, walk.names)
                if step is not None:
                    return step
        return None

    def _reduce(self, step: ReductionStep):
        try:
            applied = step.apply(self.m)
        except MopError as e:
            logger.debug(f"{step.rule_id} does not bind on n={self.m.n}: {e}")
            return None
        return applied, degree_two_count(applied.mop)

    def _check_k_drop(self, rule: RuleTemplate, reduced: Mop):
        dropped = k_drop(self.m, reduced)
        if dropped < rule.k_drop:
            self._anomaly('k-decrease', f"{rule.rule_id}: k fell by {dropped}, claim expects {rule.k_drop}")

    def _certificate(self, targets: Iterable[int], pool: Sequence[int], cap: int) -> Optional[Tuple[int, ...]]:
        """Smallest, then lexicographically least, subset of pool dominating every target on its own."""
        targets = list(targets)
        for r in range(1, cap + 1):
            for combo in combinations(sorted(pool), r):
                if not undominated(self.m, combo, targets):
                    return combo
        return None

    def _bind_leaf_chain(self, rule: LeafChainRule, names: Dict[int, int]) -> Optional[ReductionStep]:
        needed = set(rule.deleted) | set(rule.augment_if_merged) | set(rule.augment_otherwise)
        needed |= set(rule.contracted or ())
        if not needed <= set(names):
            logger.debug(f"{rule.rule_id}: walk too short to name {sorted(needed - set(names))}")
            return None

        contracted = None
        if rule.contracted:
            contracted = (names[rule.contracted[0]], names[rule.contracted[1]])
        step = ReductionStep(
            rule_id=rule.rule_id,
            claim=rule.claim,
            deleted=tuple(sorted(names[i] for i in rule.deleted)),
            contracted=contracted,
            augment_if_merged=tuple(sorted(names[i] for i in rule.augment_if_merged)),
            augment_otherwise=tuple(sorted(names[i] for i in rule.augment_otherwise)),
            budget=rule.budget,
            pool=tuple(sorted(set(names.values()))),
            n_before=self.m.n,
            k_before=self.k,
            binding=tuple((f"u{i}", v) for i, v in sorted(names.items())),
        )

        reduced = self._reduce(step)
        if reduced is None:
            self._anomaly('binding', f"{rule.rule_id} matched but its deletion is not an ear region")
            return None
        applied, k1 = reduced
        step = replace(step, n_after=applied.mop.n, k_after=k1)
        self._check_k_drop(rule, applied.mop)

        if applied.mop.n < SMALL_MIN:
            explicit = [tuple(names[i] for i in s) for s in rule.small_sets if set(s) <= set(names)]
            extra = tuple(names[i] for i in rule.small_extra if i in names)
            return self._terminal(step, explicit, extra, names.get(rule.small_anchor))

        slack = self.bound - disjunctive_bound(applied.mop.n, k1)
        if slack < rule.budget:
            logger.debug(f"{rule.rule_id}: slack {slack} below budget {rule.budget}")
            return None
        return step

    def _terminal(self, step: ReductionStep, explicit: List[Tuple[int, ...]],
                  extra: Tuple[int, ...], anchor: Optional[int]) -> Optional[ReductionStep]:
        """Solve G directly when the reduced mop is too small to recurse on."""
        remainder, index_map = delete_ear_region(self.m, step.deleted)
        back = {new: old for old, new in index_map.items()}

        def candidates() -> Iterator[Tuple[int, ...]]:
            yield from explicit
            if 5 <= remainder.n <= 8:
                pairs = obs3_pairs(remainder.n)
                anchored = index_map.get(anchor) if anchor is not None else None
                pairs.sort(key=lambda pair: anchored not in pair)
                for a, b in pairs:
                    yield (back[a], back[b]) + extra
            exact = exact_gamma2d(remainder)
            lifted = tuple(back[v] for v in exact.witness)
            cert = self._certificate(step.deleted, step.pool, max(0, self.bound - len(lifted)))
            if cert is not None:
                yield lifted + cert

        for candidate in candidates():
            chosen = set(candidate)
            if len(chosen) <= self.bound and is_2dd_set(self.m, chosen):
                return replace(step, terminal_set=tuple(sorted(chosen)))
        logger.debug(f"{step.rule_id}: no verified set for the small remainder")
        return None

    def _tree_deletions(self, rule: TreeRule, v: int, tree: DualTree,
                        codes: Dict[int, str]) -> Iterator[Tuple[Tuple[int, ...], Optional[Tuple[int, int]], Dict[str, int]]]:
        parent = tree.parent[v]
        v1, v2 = tree.shared_edge(v, parent)
        region = tree.subtree_vertices(v)
        names = {'v1': v1, 'v2': v2, 'v3': (set(tree.nodes[v]) - {v1, v2}).pop(), 'node': v}
        children = sorted(tree.children[v], key=lambda c: (codes[c], c))

        def child_part(c: int) -> Tuple[set, Tuple[int, int]]:
            edge = tree.shared_edge(v, c)
            return set(tree.subtree_vertices(c)) - set(edge), edge

        if rule.mode in ('FULL', 'FULL-C'):
            contracted = (v1, v2) if rule.contracts else None
            yield tuple(sorted(region - {v1, v2})), contracted, names
        elif rule.mode == 'BOTH':
            deleted = set()
            for c in children:
                deleted |= child_part(c)[0]
            yield tuple(sorted(deleted)), None, names
        else:
            if rule.child_position >= len(children):
                return
            code = codes[children[rule.child_position]]
            for c in children:
                if codes[c] != code:
                    continue
                deleted, edge = child_part(c)
                contracted = edge if rule.contracts else None
                yield tuple(sorted(deleted)), contracted, dict(names, child=c)

    def _bind_tree(self, rule: TreeRule, v: int, tree: DualTree,
                   codes: Dict[int, str]) -> Optional[ReductionStep]:
        if rule.shape is not None and rooted_short_shape(tree, v) != rule.shape:
            return None
        pool = tuple(sorted(tree.subtree_vertices(v)))
        for deleted, contracted, names in self._tree_deletions(rule, v, tree, codes):
            step = ReductionStep(
                rule_id=rule.rule_id,
                claim=rule.claim,
                deleted=deleted,
                contracted=contracted,
                augment_if_merged=(),
                augment_otherwise=(),
                budget=rule.budget,
                pool=pool,
                n_before=self.m.n,
                k_before=self.k,
                binding=tuple(sorted(names.items())),
            )
            reduced = self._reduce(step)
            if reduced is None:
                continue
            applied, k1 = reduced
            step = replace(step, n_after=applied.mop.n, k_after=k1)
            if applied.mop.n < SMALL_MIN:
                found = self._terminal(step, [], (), None)
                if found is not None:
                    return found
                continue

            slack = min(MAX_BUDGET, self.bound - disjunctive_bound(applied.mop.n, k1))
            if rule.augment_otherwise is not None:
                if slack < rule.budget:
                    continue
                self._check_k_drop(rule, applied.mop)
                return replace(
                    step,
                    augment_if_merged=tuple(sorted(names[x] for x in rule.augment_if_merged)),
                    augment_otherwise=tuple(sorted(names[x] for x in rule.augment_otherwise)),
                )
            if slack < 1:
                continue
            cert = self._certificate(deleted, pool, slack)
            if cert is None:
                if self.deferred is None:
                    self.deferred = (rule, replace(step, budget=slack), applied.mop)
                continue
            self._check_k_drop(rule, applied.mop)
            merged = cert
            if contracted is not None:
                for extra in (set(contracted), {contracted[0]}, set()):
                    if len(set(cert) | extra) <= slack + 1:
                        merged = tuple(sorted(set(cert) | extra))
                        break
            return replace(step, augment_if_merged=merged, augment_otherwise=cert, budget=slack)
        return None


def find_applicable_reduction(m: Mop) -> Optional[Tuple[ReductionStep, Dict[str, int]]]:
    if m.n < REDUCTION_MIN:
        raise InvalidMopError(f"reductions apply from n=13, got n={m.n}")
    return ReductionFinder(m).find()


def _preimage(m: Mop, step: ReductionStep, sub_solution: Iterable[int]) -> Tuple[set, bool]:
    applied = step.apply(m)
    chosen = set(sub_solution)
    for v in chosen:
        if not 0 <= v < applied.mop.n:
            raise LiftError(f"sub-solution vertex {v} out of range for n={applied.mop.n}")
    endpoints = set(step.contracted or ())
    base = {v for v, i in applied.index_map.items() if i in chosen and v not in endpoints}
    merged_in = applied.merged is not None and applied.merged in chosen
    return base, merged_in


def _lift(m: Mop, step: ReductionStep, sub_solution: Iterable[int]) -> Tuple[DisjunctiveSet, Tuple[int, ...]]:
    base, merged_in = _preimage(m, step, sub_solution)
    augment = step.augment_if_merged if merged_in else step.augment_otherwise
    if is_2dd_set(m, base | set(augment)):
        return DisjunctiveSet.of(base | set(augment), verified=True), tuple(augment)

    limit = step.budget + (1 if merged_in else 0)
    for r in range(0, limit + 1):
        for combo in combinations(step.pool, r):
            if is_2dd_set(m, base | set(combo)):
                logger.debug(f"{step.rule_id}: augmentation {combo} found in the region pool")
                return DisjunctiveSet.of(base | set(combo), verified=True), combo
    raise LiftError(f"{step.rule_id} lift is not a 2DD-set on n={m.n}")


def apply_and_lift(m: Mop, step: ReductionStep, sub_solution: Iterable[int]) -> DisjunctiveSet:
    return _lift(m, step, sub_solution)[0]


def _fallback(m: Mop, exact_limit: int = EXACT_SOFT_LIMIT) -> Tuple[str, DisjunctiveSet]:
    if m.n <= exact_limit:
        return 'EXACT-FALLBACK', exact_gamma2d(m).witness
    return 'GREEDY-FALLBACK', greedy_2dd(m)


def construct_bounded_2dd(m: Mop, exact_limit: int = EXACT_SOFT_LIMIT) -> ConstructionTrace:
    """Reduce, solve the base case, lift back. Fallbacks run the exact solver up to `exact_limit`, greedy beyond."""
    start_time = time.time()
    require_valid(m)
    if m.n < SMALL_MIN:
        raise InvalidMopError(f"the bound needs n >= 7, got n={m.n}")

    k = degree_two_count(m)
    bound = disjunctive_bound(m.n, k)
    anomalies: List[Anomaly] = []
    steps: List[ReductionStep] = []
    levels = [m]
    used_fallback = False
    bound_proven = True

    # Phase 1: reduce until a base case
    current = m
    while True:
        if current.n <= SMALL_MAX:
            try:
                base_case, base_set = f"SMALL-{current.n}", construct_small(current)
            except SmallCaseError as e:
                anomalies.append(Anomaly(current.n, 'small-case', str(e)))
                logger.warning(f"anomaly {anomalies[-1]}")
                base_case, base_set = _fallback(current, exact_limit)
                used_fallback = True
            break

        finder = ReductionFinder(current)
        found = finder.find()
        anomalies.extend(finder.anomalies)
        if found is None:
            anomalies.append(Anomaly(current.n, 'no-rule', "no reduction applies"))
            logger.warning(f"anomaly {anomalies[-1]}")
            base_case, base_set = _fallback(current, exact_limit)
            used_fallback = True
            bound_proven = base_case != 'GREEDY-FALLBACK'
            break

        step, _ = found
        steps.append(step)
        if step.is_terminal:
            base_case, base_set = 'REMAINDER', DisjunctiveSet.of(step.terminal_set, verified=True)
            break
        current = step.apply(current).mop
        levels.append(current)

    # Phase 2: lift back through every non-terminal step
    augments: List[Optional[Tuple[int, ...]]] = [None] * len(steps)
    if steps and steps[-1].is_terminal:
        augments[-1] = steps[-1].terminal_set
    reducing = len(steps) - (1 if steps and steps[-1].is_terminal else 0)

    solution = base_set
    for i in reversed(range(reducing)):
        level = levels[i]
        try:
            solution, augments[i] = _lift(level, steps[i], solution)
        except LiftError as e:
            anomalies.append(Anomaly(level.n, 'lift', str(e)))
            logger.warning(f"anomaly {anomalies[-1]}")
            tag, solution = _fallback(level, exact_limit)
            used_fallback = True
            if tag == 'GREEDY-FALLBACK':
                bound_proven = False
        level_bound = disjunctive_bound(level.n, degree_two_count(level))
        if solution.size > level_bound and bound_proven:
            anomalies.append(Anomaly(level.n, 'over-bound', f"{solution.size} > {level_bound} after {steps[i].rule_id}"))
            logger.warning(f"anomaly {anomalies[-1]}")

    final_set = DisjunctiveSet.of(solution, verified=is_2dd_set(m, solution))
    if not final_set.verified:
        logger.error(f"constructed set {final_set.vertices} is not a 2DD-set of {m!r}")

    execution_time_ms = round((time.time() - start_time) * 1000, 2)
    logger.debug(f"n={m.n} k={k}: {len(steps)} steps, base {base_case}, "
                 f"size {final_set.size}/{bound} in {execution_time_ms}ms")

    return ConstructionTrace(
        steps=steps,
        augments=augments,
        base_case=base_case,
        base_set=base_set,
        final_set=final_set,
        bound=bound,
        used_fallback=used_fallback,
        bound_proven=bound_proven,
        anomalies=anomalies,
        execution_time_ms=execution_time_ms,
        exact_limit=exact_limit,
    )


def replay_trace(m: Mop, trace: ConstructionTrace) -> DisjunctiveSet:
    """Re-apply the recorded reductions and lifts; reproduces trace.final_set."""
    levels = [m]
    reducing = [s for s in trace.steps if not s.is_terminal]
    for step in reducing:
        levels.append(step.apply(levels[-1]).mop)

    solution: Iterable[int] = trace.base_set
    for i in reversed(range(len(reducing))):
        augment = trace.augments[i]
        if augment is None:
            solution = _fallback(levels[i], trace.exact_limit)[1]
            continue
        base, _ = _preimage(levels[i], reducing[i], solution)
        solution = base | set(augment)
    return DisjunctiveSet.of(solution, verified=is_2dd_set(m, solution))


def trace_lines(trace: ConstructionTrace) -> List[str]:
    """JSON lines: one per step, then a summary line."""
    lines = []
    for step, augment in zip(trace.steps, trace.augments):
        lines.append(TraceLine(
            rule_id=step.rule_id,
            claim=step.claim,
            deleted=list(step.deleted),
            contracted=list(step.contracted) if step.contracted else None,
            augment=list(augment) if augment is not None else None,
            terminal=step.is_terminal,
            n_before=step.n_before,
            n_after=step.n_after,
            k_before=step.k_before,
            k_after=step.k_after,
            budget=step.budget,
        ).model_dump_json())
    lines.append(TraceSummary(
        base_case=trace.base_case,
        base_set=list(trace.base_set),
        final_set=list(trace.final_set),
        bound=trace.bound,
        used_fallback=trace.used_fallback,
        bound_proven=trace.bound_proven,
        anomalies=[str(a) for a in trace.anomalies],
    ).model_dump_json())
    return lines
