"""
Static catalogue of reduction rules.

Each rule deletes a vertex set, may contract one outer edge of what is left,
and says how to lift a solution of the smaller mop back: add
`augment_if_merged` (in place of the merged vertex) when the merged vertex is
in the sub-solution, otherwise add `augment_otherwise`.

Leaf-chain rules are written on the u-names of a walk leaving a leaf of the
dual tree (see dual_tree.name_walk). Tree rules are written on a matched
rooted pattern: v1, v2 close the pattern's region and v3 is the apex of the
pattern root's triangle.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from mopdom.dual_tree import TREE_PATTERNS, TreePattern
from mopdom.mop_core import (
    Mop, contract_outer_edge, contraction_map, delete_ear_region, degree_two_count,
    normalize_pair,
)

logger = logging.getLogger(__name__)

MAX_BUDGET = 3


@dataclass(frozen=True)
class LeafChainPattern:
    """
    t2..t_deg2_upto must have tree degree 2, t_branch_at (if set) degree 3,
    and the walk pivots must equal `pivots`.
    """
    deg2_upto: int
    branch_at: Optional[int]
    pivots: Tuple[Tuple[int, int], ...]

    @property
    def walk_length(self) -> int:
        return max([self.deg2_upto + 1] + [i for i, _ in self.pivots])


@dataclass(frozen=True)
class RuleTemplate:
    rule_id: str
    claim: str
    budget: int
    n_drop: int
    k_drop: int

    def budget_is_sound(self) -> bool:
        # bound(G1) + budget <= bound(G) whenever n and k fall by the quoted amounts
        return 2 * (self.n_drop + self.k_drop) >= 9 * self.budget


@dataclass(frozen=True)
class LeafChainRule(RuleTemplate):
    pattern: LeafChainPattern = None
    deleted: Tuple[int, ...] = ()
    contracted: Optional[Tuple[int, int]] = None
    augment_if_merged: Tuple[int, ...] = ()
    augment_otherwise: Tuple[int, ...] = ()
    # sets tried directly on G when the reduced mop has fewer than 7 vertices
    small_sets: Tuple[Tuple[int, ...], ...] = ()
    small_anchor: Optional[int] = None
    small_extra: Tuple[int, ...] = ()


@dataclass(frozen=True)
class TreeRule(RuleTemplate):
    pattern_id: str = ''
    mode: str = 'FULL'
    child_position: Optional[int] = None
    # fixed lift sets on v-names; None means resolved when the rule binds
    augment_if_merged: Optional[Tuple[str, ...]] = None
    augment_otherwise: Optional[Tuple[str, ...]] = None
    # short-leg shape (H9..H13) the matched subtree must have
    shape: Optional[str] = None

    @property
    def contracts(self) -> bool:
        return self.mode.endswith('-C')


@dataclass(frozen=True)
class AppliedReduction:
    mop: Mop
    index_map: Dict[int, int]
    merged: Optional[int]


@dataclass(frozen=True)
class ReductionStep:
    """One instantiated rewrite on concrete vertex indices of the mop it was bound on."""
    rule_id: str
    claim: str
    deleted: Tuple[int, ...]
    contracted: Optional[Tuple[int, int]]
    augment_if_merged: Tuple[int, ...]
    augment_otherwise: Tuple[int, ...]
    budget: int
    pool: Tuple[int, ...] = ()
    n_before: int = 0
    n_after: int = 0
    k_before: int = 0
    k_after: int = 0
    terminal_set: Optional[Tuple[int, ...]] = None
    binding: Tuple[Tuple[str, int], ...] = field(default=(), compare=False)

    @property
    def is_terminal(self) -> bool:
        return self.terminal_set is not None

    def apply(self, m: Mop) -> AppliedReduction:
        reduced, index_map = delete_ear_region(m, self.deleted)
        if self.contracted is None:
            return AppliedReduction(reduced, dict(index_map), None)
        a, b = self.contracted
        x, y = index_map[a], index_map[b]
        contracted = contract_outer_edge(reduced, normalize_pair(x, y))
        second = contraction_map(reduced.n, (x, y))
        composite = {v: second[i] for v, i in index_map.items()}
        return AppliedReduction(contracted, composite, composite[a])


def _chain(deg2_upto: int, branch_at: Optional[int], **pivots: int) -> LeafChainPattern:
    return LeafChainPattern(
        deg2_upto, branch_at,
        tuple(sorted((int(k[1:]), v) for k, v in pivots.items()))
    )


def _leaf_chain_rules() -> List[LeafChainRule]:
    rules = [
        LeafChainRule('LEM1-3DIST-A', 'lem1:3-dist', 1, 4, 1,
                      pattern=_chain(3, 4, p4=2), deleted=(1, 3, 4), contracted=(2, 5),
                      augment_if_merged=(2, 5), augment_otherwise=(2,)),
        LeafChainRule('LEM1-3DIST-B', 'lem1:3-dist', 1, 4, 1,
                      pattern=_chain(3, 4, p4=4), deleted=(1, 2, 3), contracted=(4, 5),
                      augment_if_merged=(4, 5), augment_otherwise=(2,)),
        LeafChainRule('LEM1-NOTF4-A', 'lem1:notf4', 1, 5, 0,
                      pattern=_chain(4, None, p4=2, p5=2), deleted=(1, 3, 4, 5), contracted=(2, 6),
                      augment_if_merged=(2, 6), augment_otherwise=(2,)),
        LeafChainRule('LEM1-NOTF4-B', 'lem1:notf4', 1, 5, 0,
                      pattern=_chain(4, None, p4=2, p5=5), deleted=(1, 2, 3, 4), contracted=(5, 6),
                      augment_if_merged=(5, 6), augment_otherwise=(2,)),
        LeafChainRule('LEM1-4DIST-A', 'lem1:4-dist', 1, 4, 1,
                      pattern=_chain(4, 5, p4=4, p5=4), deleted=(1, 2, 3, 5),
                      augment_otherwise=(2,)),
        LeafChainRule('LEM1-4DIST-B', 'lem1:4-dist', 1, 4, 1,
                      pattern=_chain(4, 5, p4=4, p5=5), deleted=(1, 2, 3, 4),
                      augment_otherwise=(2,)),
        LeafChainRule('LEM1-5DIST', 'lem1:5-dist', 1, 5, 0,
                      pattern=_chain(5, None, p4=4, p6=6), deleted=(1, 2, 3, 4, 5),
                      augment_otherwise=(2,)),
    ]
    for c in (5, 8, 7, 4):
        rules.append(LeafChainRule(
            f'LEM1-7DIST-P{c}', 'lem1:7-dist', 2, 8, 1,
            pattern=_chain(7, 8, p4=4, p8=c),
            deleted=tuple(i for i in range(1, 9) if i != c), contracted=(c, 9),
            augment_if_merged=(2, c, 9), augment_otherwise=(2, c),
            small_sets=((2, c, 10), (2, 9, 10)), small_anchor=c, small_extra=(2,),
        ))
    for case, c in enumerate((5, 9, 8, 7, 4), start=1):
        rules.append(LeafChainRule(
            f'LEM1-CASE{case}', f'lem1:case{case}', 2, 9, 0,
            pattern=_chain(8, None, p4=4, p9=c),
            deleted=tuple(i for i in range(1, 10) if i != c), contracted=(c, 10),
            augment_if_merged=(2, c, 10), augment_otherwise=(2, c),
            small_anchor=c, small_extra=(2,),
        ))
    return rules


def _child_codes(pattern: TreePattern) -> List[str]:
    """Child codes of the pattern root, in bracket-sorted order."""
    code = pattern.codes[0][1:-1]
    children, depth, start = [], 0, 0
    for i, ch in enumerate(code):
        depth += 1 if ch == '(' else -1
        if depth == 0:
            children.append(code[start:i + 1])
            start = i + 1
    return children


def _static_budget(n_drop: int, k_drop: int) -> int:
    return min(MAX_BUDGET, (2 * (n_drop + k_drop)) // 9)


def _tree_rules_for(pattern: TreePattern, number: int) -> List[TreeRule]:
    children = _child_codes(pattern)
    candidates = []
    candidates.append(('FULL', None, pattern.size, pattern.leaves - 1))
    if len(children) == 2:
        candidates.append(('BOTH', None, pattern.size - 1, pattern.leaves - 1))
    for pos, code in enumerate(children):
        candidates.append(('CHILD', pos, code.count('('), code.count('()') - 1))
    candidates.append(('FULL-C', None, pattern.size + 1, pattern.leaves - 1))
    for pos, code in enumerate(children):
        candidates.append(('CHILD-C', pos, code.count('(') + 1, code.count('()') - 1))

    rules = []
    seen = set()
    for mode, pos, n_drop, k_drop in candidates:
        budget = _static_budget(n_drop, k_drop)
        if budget == 0:
            continue
        # identical children give identical templates
        key = (mode, children[pos] if pos is not None else None)
        if key in seen:
            continue
        seen.add(key)
        suffix = mode if pos is None else f"{mode}{pos + 1}"
        rules.append(TreeRule(f"TREE{number}-{suffix}", f"tree{number}", budget, n_drop, k_drop,
                              pattern_id=pattern.pattern_id, mode=mode, child_position=pos))

    if rules:
        # the first template of a pattern carries the bare pattern id
        rules[0] = TreeRule(f"TREE{number}", rules[0].claim, rules[0].budget, rules[0].n_drop,
                            rules[0].k_drop, pattern_id=rules[0].pattern_id, mode=rules[0].mode,
                            child_position=rules[0].child_position)
    return rules


def _tree_rules() -> List[TreeRule]:
    rules: List[TreeRule] = []
    for number, pattern in enumerate(TREE_PATTERNS, start=1):
        rules.extend(_tree_rules_for(pattern, number))
    # the cherry: delete {v3,v4,v5}, contract v1v2
    rules = [
        TreeRule('TREE1', 'tree1', 1, 4, 1, pattern_id='T1', mode='FULL-C',
                 augment_if_merged=('v1', 'v2'), augment_otherwise=('v3',))
        if r.rule_id == 'TREE1' else r
        for r in rules
    ]
    # T' over an H9 region: delete everything below v1v2, add the apex back
    rules.insert(0, TreeRule('CL-H9', 'cl3to10', 1, 4, 1, pattern_id='T2', mode='FULL', shape='H9',
                             augment_if_merged=('v3',), augment_otherwise=('v3',)))
    return rules


LEAF_CHAIN_RULES: List[LeafChainRule] = _leaf_chain_rules()
TREE_RULES: List[TreeRule] = _tree_rules()
TREE_RULES_BY_PATTERN: Dict[str, List[TreeRule]] = {}
for _rule in TREE_RULES:
    TREE_RULES_BY_PATTERN.setdefault(_rule.pattern_id, []).append(_rule)


def reduction_catalogue() -> List[Tuple[object, RuleTemplate]]:
    """Every (pattern, template) pair in firing order: leaf-chain rules, then tree rules."""
    patterns = {p.pattern_id: p for p in TREE_PATTERNS}
    entries: List[Tuple[object, RuleTemplate]] = [(r.pattern, r) for r in LEAF_CHAIN_RULES]
    entries.extend((patterns[r.pattern_id], r) for r in TREE_RULES)
    return entries


def k_drop(before: Mop, after: Mop) -> int:
    return degree_two_count(before) - degree_two_count(after)
