"""Cyclic critical pairs, their diagrams, and the confluence verdict.

A layered, rank non-increasing system is confluent when each of its
cyclic critical pairs is either unrealizable or closed by a decreasing
diagram whose two ends are congruent modulo the pair's cyclic rules.  A
non-confluence verdict always comes with a concrete term and two reducts
that are provably not joinable.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .cyclic import CongruenceClosure, CyclicUnifier, canonical_cyclic_unifier
from .layering import OverlapReport, RankCheck, Ranker, check_dlo, check_rank_nonincreasing
from .rewriting import Reach, Step, one_step, reach
from .subrewriting import sub_rewrite
from .terms import (App, Position, Subst, Term, Var, apply, format_position, fpos, iter_subterms,
                    replace_at, subterm_at, variables)
from .trs import Rule, Trs
from .unification import Problem, SolvedForm, solve

CONFLUENT = "CONFLUENT"
NON_CONFLUENT = "NON-CONFLUENT"
MAYBE = "MAYBE"


@dataclass(frozen=True)
class AnalysisConfig:
    eq_depth: int = 6
    diagram_depth: int = 8
    realizer_depth: int = 6
    node_bound: int = 50000
    nf_depth: int = 12
    realizer_candidates: int = 200
    assume_rank_nonincreasing: bool = False
    # reserved for the refined cyclic-joinability condition; not implemented
    refined_joinability: bool = False

    def __post_init__(self):
        for name in ("eq_depth", "diagram_depth", "realizer_depth", "node_bound", "nf_depth",
                     "realizer_candidates"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.refined_joinability:
            raise NotImplementedError("the refined joinability condition is not implemented")


# -- cyclic critical pairs ---------------------------------------------------------

@dataclass(frozen=True)
class CriticalPeak:
    outer: int
    inner: int
    position: Position
    outer_rule: Rule
    inner_rule: Rule
    solved: SolvedForm
    unifier: CyclicUnifier

    @property
    def i(self) -> int:
        return self.outer_rule.index

    @property
    def j(self) -> int:
        return self.inner_rule.index

    @property
    def top(self) -> Term:
        return apply(self.outer_rule.lhs, self.unifier.eta)

    @property
    def inner_top(self) -> Term:
        l = self.outer_rule.lhs
        return apply(replace_at(l, self.position, self.inner_rule.lhs), self.unifier.eta)

    @property
    def left(self) -> Term:
        return apply(self.outer_rule.rhs, self.unifier.eta)

    @property
    def right(self) -> Term:
        l = self.outer_rule.lhs
        return apply(replace_at(l, self.position, self.inner_rule.rhs), self.unifier.eta)

    @property
    def context_has_vars(self) -> bool:
        hole = replace_at(self.outer_rule.lhs, self.position, App("□", ()))
        return bool(variables(hole))

    def middle_equations(self) -> List[Tuple[Term, Term]]:
        return self.unifier.rs.equations(self.unifier.eta)

    def variables(self) -> set:
        return variables(self.outer_rule.lhs, self.inner_rule.lhs)

    def describe(self) -> str:
        return (f"rule {self.inner + 1} into rule {self.outer + 1} at "
                f"{format_position(self.position)}: ⟨{self.left}, {self.right}⟩")


def overlap_triples(trs: Trs):
    """(outer, position, inner) candidates, root overlaps taken once per rule pair."""
    for k, r in enumerate(trs.rules):
        for p in fpos(r.lhs):
            for m in range(len(trs.rules)):
                if not p and m <= k:
                    continue
                yield k, p, m


def cyclic_critical_pairs(trs: Trs) -> List[CriticalPeak]:
    peaks = []
    for k, p, m in overlap_triples(trs):
        outer = trs.rules[k]
        inner = trs.rules[m].renamed(variables(outer.lhs))
        sf = solve(Problem(((subterm_at(outer.lhs, p), inner.lhs),)))
        if sf is None:
            continue
        peaks.append(CriticalPeak(k, m, p, outer, inner, sf, canonical_cyclic_unifier(sf)))
    return peaks


# -- decreasingness -----------------------------------------------------------------

def _advance(phase: Optional[str], e: int, mine: int, other: int, cap: Optional[int]) -> Optional[str]:
    """Automaton for one side: 'A' while steps are below ``mine``, then at
    most one facing step equal to ``other``, then steps below max(mine, other).
    Every index must also stay below ``cap`` when one is given."""
    if phase is None or (cap is not None and e >= cap):
        return None
    top = max(mine, other)
    if phase == "A":
        if e < mine:
            return "A"
        if e == other or e < top:
            return "D"
        return None
    return "D" if e < top else None


def _side_ok(seq: Sequence[int], mine: int, other: int, cap: Optional[int]) -> bool:
    phase: Optional[str] = "A"
    for e in seq:
        phase = _advance(phase, e, mine, other, cap)
    return phase is not None


def check_decreasing(I: Sequence[int], J: Sequence[int], i: int, j: int, context_has_vars: bool) -> bool:
    cap = i if context_has_vars else None
    return _side_ok(I, i, j, cap) and _side_ok(J, j, i, cap)


# -- diagrams -------------------------------------------------------------------------

@dataclass(frozen=True)
class LabelledStep:
    source: Term
    position: Position
    rule: int
    index: int
    rank: Optional[int]
    result: Term


@dataclass(frozen=True)
class DiagramEvidence:
    left_steps: Tuple[LabelledStep, ...]
    right_steps: Tuple[LabelledStep, ...]
    s: Term
    t: Term
    equations: Tuple[Tuple[Term, Term], ...]

    @property
    def I(self) -> List[int]:
        return [st.index for st in self.left_steps]

    @property
    def J(self) -> List[int]:
        return [st.index for st in self.right_steps]


@dataclass(frozen=True)
class DiagramFailure:
    reason: str
    explored: int


def _side_search(start: Term, trs: Trs, mine: int, other: int, cap: Optional[int], depth: int, nodes: int):
    """BFS over (term, phase); returns parent pointers and the reached states."""
    parent: Dict[Tuple[Term, str], Optional[Tuple[Tuple[Term, str], Step]]] = {(start, "A"): None}
    dist = {(start, "A"): 0}
    queue = deque([(start, "A")])
    while queue:
        state = queue.popleft()
        if dist[state] >= depth:
            continue
        term, phase = state
        for st in one_step(term, trs):
            nxt = _advance(phase, trs.rules[st.rule].index, mine, other, cap)
            if nxt is None:
                continue
            key = (st.result, nxt)
            if key in parent or (nxt == "D" and (st.result, "A") in parent):
                continue
            if len(parent) >= nodes:
                queue.clear()
                break
            parent[key] = (state, st)
            dist[key] = dist[state] + 1
            queue.append(key)
    return parent, dist


def _replay(parent, key, ranker) -> Tuple[LabelledStep, ...]:
    steps = []
    while parent[key] is not None:
        prev, st = parent[key]
        steps.append(st)
        key = prev
    steps.reverse()
    return tuple(_label(st, ranker) for st in steps)


def _label(st: Step, ranker, trs: Optional[Trs] = None) -> LabelledStep:
    rules = ranker.trs.rules if ranker is not None else trs.rules
    rk = ranker(subterm_at(st.source, st.position)) if ranker is not None else None
    return LabelledStep(st.source, st.position, st.rule, rules[st.rule].index, rk, st.result)


def find_diagram(peak: CriticalPeak, trs: Trs, config: AnalysisConfig = AnalysisConfig(),
                 ranker: Optional[Ranker] = None):
    """Search a cyclic-joinable decreasing diagram for ``peak``."""
    if ranker is None:
        ranker = _LabelOnly(trs)
    cap = peak.i if peak.context_has_vars else None
    eqs = tuple(peak.middle_equations())
    lp, ld = _side_search(peak.left, trs, peak.i, peak.j, cap, config.diagram_depth, config.node_bound)
    rp, rd = _side_search(peak.right, trs, peak.j, peak.i, cap, config.diagram_depth, config.node_bound)
    cc = CongruenceClosure(eqs, [key[0] for key in ld] + [key[0] for key in rd])
    groups: Dict[Term, Tuple[int, str, Tuple[Term, str]]] = {}
    for key, d in rd.items():
        root = cc.find(key[0])
        cand = (d, str(key[0]), key)
        if root not in groups or cand[:2] < groups[root][:2]:
            groups[root] = cand
    best = None
    for key, d in sorted(ld.items(), key=lambda kv: (kv[1], str(kv[0][0]))):
        hit = groups.get(cc.find(key[0]))
        if hit is not None and (best is None or d + hit[0] < best[0]):
            best = (d + hit[0], key, hit[2])
    if best is None:
        return DiagramFailure(
            f"no congruent pair among {len(ld)} left and {len(rd)} right reducts "
            f"within depth {config.diagram_depth}", len(ld) + len(rd))
    _, lkey, rkey = best
    return DiagramEvidence(_replay(lp, lkey, ranker), _replay(rp, rkey, ranker), lkey[0], rkey[0], eqs)


class _LabelOnly:
    """Stand-in ranker for unlayered systems: labels carry no rank."""

    def __init__(self, trs):
        self.trs = trs

    def __call__(self, t):
        return None


# -- realizability -------------------------------------------------------------------------

@dataclass(frozen=True)
class Unrealizable:
    rule: Tuple[str, Term]
    path: Position
    symbols: Tuple[str, ...]

    def describe(self) -> str:
        y, v = self.rule
        syms = ", ".join(self.symbols)
        return (f"inert symbol{'s' if len(self.symbols) > 1 else ''} {syms} on the path from the root of "
                f"{v} to {y}: no term s is joinable with {apply(v, {y: Var('s')})}")


@dataclass(frozen=True)
class Realizer:
    gamma: Dict[str, Term]
    joins: Tuple[Tuple[str, Term], ...]     # cyclic variable and common reduct


def inert_symbols(trs: Trs) -> set:
    """Symbols that head no lefthand and no righthand side, when no rule collapses.

    A term headed by an inert symbol only rewrites to terms with the same
    head, and a term with another head never acquires it.
    """
    if any(type(r.rhs) is Var for r in trs.rules):
        return set()
    heads = {r.lhs.name for r in trs.rules} | {r.rhs.name for r in trs.rules}
    syms = set(trs.signature)
    return syms - heads


def frozen_symbols(trs: Trs) -> set:
    """Symbols heading no lefthand side: a term headed by one keeps its head."""
    return set(trs.signature) - {r.lhs.name for r in trs.rules}


def unrealizability(peak: CriticalPeak, trs: Trs) -> Optional[Unrealizable]:
    inert = inert_symbols(trs)
    if not inert:
        return None
    for y, v in peak.unifier.rs.rules:
        for pos, s in iter_subterms(v):
            if type(s) is not Var or s.name != y:
                continue
            syms = []
            cur = v
            for i in pos:
                syms.append(cur.name)
                cur = cur.args[i - 1]
            if syms and all(f in inert for f in syms):
                return Unrealizable((y, v), pos, tuple(syms))
    return None


def _fresh_constant(trs: Trs) -> App:
    n = 0
    while f"k{n}" in trs.signature:
        n += 1
    return App(f"k{n}", ())


def realizer_candidates(trs: Trs, config: AnalysisConfig) -> List[Term]:
    seeds = set()
    for r in trs.rules:
        for side in (r.lhs, r.rhs):
            for _, s in iter_subterms(side):
                if not variables(s):
                    seeds.add(s)
    pool = set(seeds)
    for s in sorted(seeds, key=lambda t: (len(str(t)), str(t))):
        pool.update(reach(s, trs, config.realizer_depth, config.realizer_candidates).terms)
    pool.add(_fresh_constant(trs))
    ordered = sorted(pool, key=lambda t: (len(str(t)), str(t)))
    return ordered[: config.realizer_candidates]


class _Joiner:
    def __init__(self, trs: Trs, depth: int, nodes: int):
        self.trs, self.depth, self.nodes = trs, depth, nodes
        self.cache: Dict[Term, Reach] = {}

    def reach(self, t: Term) -> Reach:
        r = self.cache.get(t)
        if r is None:
            r = self.cache[t] = reach(t, self.trs, self.depth, self.nodes)
        return r

    def common(self, a: Term, b: Term) -> Optional[Term]:
        ra, rb = self.reach(a), self.reach(b)
        hits = [t for t in ra.terms if t in rb]
        if not hits:
            return None
        return min(hits, key=lambda t: (ra.depth[t] + rb.depth[t], str(t)))


def find_realizer(peak: CriticalPeak, trs: Trs, config: AnalysisConfig = AnalysisConfig(),
                  budget: int = 20000) -> Optional[Realizer]:
    rules = peak.unifier.rs.equations(peak.unifier.eta)
    if not rules:
        return Realizer({}, ())
    order: List[str] = []
    for y, v in rules:
        for x in [y.name] + sorted(variables(v)):
            if x not in order:
                order.append(x)
    cands = realizer_candidates(trs, config)
    joiner = _Joiner(trs, config.realizer_depth, 500)
    checks = [0]

    def ready(eq, gamma):
        return variables(*eq) <= set(gamma)

    def search(idx: int, gamma: Dict[str, Term], joins: Dict[str, Term]):
        if idx == len(order):
            return dict(gamma), dict(joins)
        x = order[idx]
        for c in cands:
            gamma[x] = c
            new = {}
            ok = True
            for y, v in rules:
                if y.name in joins or not ready((y, v), gamma):
                    continue
                checks[0] += 1
                if checks[0] > budget:
                    del gamma[x]
                    return None
                w = joiner.common(apply(y, gamma), apply(v, gamma))
                if w is None:
                    ok = False
                    break
                new[y.name] = w
            if ok:
                joins.update(new)
                got = search(idx + 1, gamma, joins)
                if got is not None:
                    return got
                for k in new:
                    del joins[k]
            del gamma[x]
        return None

    got = search(0, {}, {})
    if got is None:
        return None
    gamma, joins = got
    return Realizer(gamma, tuple((y.name, joins[y.name]) for y, _ in rules))


# -- non-confluence witnesses ------------------------------------------------------------

@dataclass(frozen=True)
class Separation:
    kind: str                 # "root-clash" or "disjoint-reach"
    detail: str
    left_size: int = 0
    right_size: int = 0


@dataclass(frozen=True)
class Witness:
    top: Term
    left_steps: Tuple[Step, ...]
    right_steps: Tuple[Step, ...]
    v: Term
    w: Term
    separation: Separation


def root_clash(v: Term, w: Term, frozen: set) -> Optional[Tuple[Position, str, str]]:
    """A position where v and w carry different frozen symbols on a frozen path."""
    stack = [((), v, w)]
    while stack:
        pos, a, b = stack.pop()
        if type(a) is not App or type(b) is not App:
            continue
        if a.name not in frozen or b.name not in frozen:
            continue
        if a.name != b.name or a.arity != b.arity:
            return pos, a.name, b.name
        for i, (x, y) in enumerate(zip(a.args, b.args), 1):
            stack.append((pos + (i,), x, y))
    return None


def separate(v: Term, w: Term, trs: Trs, config: AnalysisConfig) -> Optional[Separation]:
    """A proof that v and w have no common reduct, if one is found."""
    clash = root_clash(v, w, frozen_symbols(trs))
    if clash is not None:
        pos, f, g = clash
        return Separation("root-clash", f"{f} ≠ {g} at {format_position(pos)}, neither heads a lefthand side")
    rv = reach(v, trs, config.nf_depth, config.node_bound)
    if not rv.complete:
        return None
    rw = reach(w, trs, config.nf_depth, config.node_bound)
    if not rw.complete:
        return None
    if any(t in rw for t in rv.terms):
        return None
    return Separation("disjoint-reach", f"{len(rv.parent)} and {len(rw.parent)} reachable terms, none shared",
                      len(rv.parent), len(rw.parent))


def witness_nonconfluence(peak: CriticalPeak, realizer: Realizer, trs: Trs,
                          config: AnalysisConfig = AnalysisConfig(), limit: int = 8) -> Optional[Witness]:
    gamma = realizer.gamma
    tops = []
    for t in (apply(peak.top, gamma), apply(peak.inner_top, gamma)):
        if t not in tops:
            tops.append(t)
    for top in tops:
        lefts = sub_rewrite(top, trs, peak.outer, (), config.eq_depth, limit=limit)
        rights = sub_rewrite(top, trs, peak.inner, peak.position, config.eq_depth, limit=limit)
        for a, b in product(lefts, rights):
            sep = separate(a.result, b.result, trs, config)
            if sep is not None:
                return Witness(top, tuple(a.derivation()), tuple(b.derivation()), a.result, b.result, sep)
    return None


# -- verdict ---------------------------------------------------------------------------

@dataclass
class PeakResult:
    peak: CriticalPeak
    status: str                       # "diagram", "unrealizable", "witness", "open"
    diagram: Optional[DiagramEvidence] = None
    unrealizable: Optional[Unrealizable] = None
    realizer: Optional[Realizer] = None
    witness: Optional[Witness] = None
    note: str = ""


@dataclass
class Analysis:
    trs: Trs
    config: AnalysisConfig
    dlo: OverlapReport
    rank_check: Optional[RankCheck]
    results: List[PeakResult]
    verdict: str
    reason: str
    warnings: List[str] = field(default_factory=list)


def analyze_peak(peak: CriticalPeak, trs: Trs, config: AnalysisConfig, ranker) -> PeakResult:
    notes = []
    if ranker is not None:
        d = find_diagram(peak, trs, config, ranker)
        if isinstance(d, DiagramEvidence):
            return PeakResult(peak, "diagram", diagram=d)
        notes.append(d.reason)
    un = unrealizability(peak, trs)
    if un is not None:
        return PeakResult(peak, "unrealizable", unrealizable=un)
    real = find_realizer(peak, trs, config)
    if real is None:
        notes.append("realizability unknown within bounds")
        return PeakResult(peak, "open", note="; ".join(notes))
    wit = witness_nonconfluence(peak, real, trs, config)
    if wit is not None:
        return PeakResult(peak, "witness", realizer=real, witness=wit)
    notes.append("realizable, but no non-joinability certificate within bounds")
    return PeakResult(peak, "open", realizer=real, note="; ".join(notes))


def analyze(trs: Trs, config: AnalysisConfig = AnalysisConfig()) -> Analysis:
    dlo = check_dlo(trs)
    warnings = []
    rank_check = check_rank_nonincreasing(trs) if dlo.layered else None
    ranker = Ranker(trs, check=False) if dlo.layered else None
    results = [analyze_peak(pk, trs, config, ranker) for pk in cyclic_critical_pairs(trs)]
    if config.assume_rank_nonincreasing:
        warnings.append("rank non-increase ASSUMED, not verified")
    witnesses = [n for n, r in enumerate(results, 1) if r.status == "witness"]
    if witnesses:
        verdict, reason = NON_CONFLUENT, f"cyclic critical pair {witnesses[0]} yields a non-joinable peak"
    elif not dlo.layered:
        verdict, reason = MAYBE, "not layered: " + dlo.violations[0].describe(trs)
    elif not rank_check.ok and not config.assume_rank_nonincreasing:
        rules = ", ".join(str(k + 1) for k in rank_check.failing_rules())
        verdict, reason = MAYBE, f"rank check failed for rule{'s' if ',' in rules else ''} {rules}"
    else:
        open_ = [n for n, r in enumerate(results, 1) if r.status == "open"]
        if open_:
            verdict, reason = MAYBE, f"cyclic critical pair {open_[0]} unresolved: {results[open_[0] - 1].note}"
        else:
            verdict = CONFLUENT
            reason = (f"layered, rank non-increasing, {len(results)} cyclic critical "
                      f"pair{'' if len(results) == 1 else 's'} closed")
    return Analysis(trs, config, dlo, rank_check, results, verdict, reason, warnings)
