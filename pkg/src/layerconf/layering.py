"""Layered systems: linearized overlaps, rank, and rank non-increase.

Quantifications over ground substitutions are decided by unifiability of
variable-disjoint terms over finite trees.  This is exact because the
signature always has ground terms (a fresh constant can be added).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Tuple

from .terms import (App, Position, Subst, Term, Var, apply, below, format_position, fpos, is_instance,
                    is_prefix, iter_subterms, linearize, match, replace_at, subterm_at, variables)
from .trs import Rule, Trs
from .unification import Problem, solve


class NotLayered(ValueError):
    pass


def _salted(t: Term, salt: str) -> Term:
    return linearize(t, salt).term


def _rename(t: Term, salt: str) -> Term:
    return apply(t, {x: Var(f"{x}@{salt}") for x in variables(t)})


def finite_unifier(*eqs: Tuple[Term, Term]) -> Optional[Subst]:
    """Most general finite unifier of a conjunction, or None."""
    sf = solve(Problem(tuple(eqs)))
    if sf is None or sf.cyclic:
        return None
    return dict(sf.finite)


def linear_overlap(u: Term, g: Term) -> Optional[Subst]:
    """Most general σ with uσ = gσ for variable-disjoint linear terms."""
    return finite_unifier((u, g))


# -- overlap freeness ------------------------------------------------------------

def overlapping_rules(v: Term, trs: Trs, o: Position = ()) -> List[int]:
    """Rules whose linearized lefthand side overlaps the linearization of v at o."""
    vl = _salted(v, "v")
    s = subterm_at(vl, o)
    if type(s) is Var:
        return []
    return [k for k, r in enumerate(trs.rules) if linear_overlap(s, _salted(r.lhs, "g")) is not None]


def is_of(v: Term, trs: Trs) -> bool:
    return all(not overlapping_rules(v, trs, o) for o in fpos(v))


def is_sof(u: Term, trs: Trs) -> bool:
    return all(is_of(subterm_at(u, q), trs) for q in fpos(u) if q)


def sof_failures(u: Term, trs: Trs) -> List[Tuple[Position, int]]:
    """(position q, rule) pairs refuting SOF(u)."""
    out = []
    for q in fpos(u):
        if not q:
            continue
        sub = subterm_at(u, q)
        for o in fpos(sub):
            for k in overlapping_rules(sub, trs, o):
                out.append((q + o, k))
    return out


@dataclass(frozen=True)
class Violation:
    outer: int
    position: Position
    inner: int
    predicate: str          # "SOF(l|p)" or "SOF(g)" rendered with the term
    witness: Dict[str, Term]

    def describe(self, trs: Trs) -> str:
        return (f"rule {self.outer + 1} at {format_position(self.position)} overlapped by rule "
                f"{self.inner + 1}: {self.predicate} fails")


@dataclass(frozen=True)
class OverlapReport:
    violations: Tuple[Violation, ...] = ()
    overlay: bool = True
    strongly_non_overlapping: bool = True

    @property
    def layered(self) -> bool:
        return not self.violations


def check_dlo(trs: Trs) -> OverlapReport:
    violations = []
    sno = True
    for k, r in enumerate(trs.rules):
        lbar = _salted(r.lhs, "l")
        for p in fpos(r.lhs):
            for m, g in enumerate(trs.rules):
                if k == m and not p:
                    continue
                sigma = linear_overlap(subterm_at(lbar, p), _salted(g.lhs, "g"))
                if sigma is None:
                    continue
                sno = False
                lp = subterm_at(r.lhs, p)
                for u in (lp, g.lhs):
                    if not is_sof(u, trs):
                        violations.append(Violation(k, p, m, f"SOF({u})", sigma))
                        break
    return OverlapReport(tuple(violations), is_overlay(trs), sno)


def is_overlay(trs: Trs) -> bool:
    """No plain (finite) overlap below the root."""
    for k, r in enumerate(trs.rules):
        for p in fpos(r.lhs):
            if not p:
                continue
            for g in trs.rules:
                if finite_unifier((subterm_at(r.lhs, p), _rename(g.lhs, "g"))) is not None:
                    return False
    return True


def is_layered(trs: Trs) -> bool:
    return check_dlo(trs).layered


# -- rank ----------------------------------------------------------------------------

class Ranker:
    """Rank of terms for one layered system, memoized structurally."""

    def __init__(self, trs: Trs, check: bool = True):
        if check:
            report = check_dlo(trs)
            if not report.layered:
                raise NotLayered(report.violations[0].describe(trs))
        self.trs = trs
        self.lins = [linearize(r.lhs).term for r in trs.rules]
        self.memo: Dict[Term, int] = {}

    def matches(self, t: Term) -> List[Tuple[int, Subst]]:
        out = []
        if type(t) is not App:
            return out
        for k, lb in enumerate(self.lins):
            if lb.name == t.name:
                sigma = match(lb, t)
                if sigma is not None:
                    out.append((k, sigma))
        return out

    def rank_subst(self, sigma: Subst) -> int:
        return max((self(u) for u in sigma.values()), default=0)

    def __call__(self, t: Term) -> int:
        got = self.memo.get(t)
        if got is not None:
            return got
        if type(t) is Var:
            return 0
        ms = self.matches(t)
        if ms:
            r = 1 + max(self.rank_subst(s) for _, s in ms)
        else:
            r = max((self(a) for a in t.args), default=0)
        self.memo[t] = r
        return r


def rank(t: Term, trs: Trs) -> int:
    return Ranker(trs)(t)


# -- rank non-increase -----------------------------------------------------------------

@dataclass(frozen=True)
class RankIssue:
    rule: int
    condition: str      # "i" or "ii"
    detail: str


@dataclass(frozen=True)
class RankCheck:
    issues: Tuple[RankIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def failing_rules(self) -> List[int]:
        return sorted({i.rule for i in self.issues})


def _below_variables(q: Position, p: Position, l: Term) -> bool:
    """q lies strictly below p and at or below a variable position of l at p."""
    if not below(q, p) and q != p:
        return False
    rel = q[len(p):]
    for o, s in iter_subterms(l):
        if type(s) is Var and is_prefix(o, rel):
            return True
    return False


def check_rank_nonincreasing(trs: Trs) -> RankCheck:
    issues: List[RankIssue] = []
    lins = [_salted(r.lhs, "l") for r in trs.rules]
    lins2 = [_salted(r.lhs, "m") for r in trs.rules]
    for gi, rule in enumerate(trs.rules):
        d = rule.rhs
        # (i) no nested pair of linearized redexes in d, one below the variables of the other
        found = None
        for p in fpos(d):
            for k, lb in enumerate(lins):
                if linear_overlap(subterm_at(d, p), lb) is None:
                    continue
                for q in fpos(d):
                    if not _below_variables(q, p, trs.rules[k].lhs):
                        continue
                    for m, lb2 in enumerate(lins2):
                        if finite_unifier((subterm_at(d, p), lb), (subterm_at(d, q), lins2[m])) is not None:
                            found = (p, k, q, m)
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                break
        if found:
            p, k, q, m = found
            issues.append(RankIssue(gi, "i", (
                f"{subterm_at(d, p)} at {format_position(p)} unifies with {linearize(trs.rules[k].lhs).term} "
                f"while {subterm_at(d, q)} at {format_position(q)} unifies with "
                f"{linearize(trs.rules[m].lhs).term}")))
        # (ii) d overlapping a strict subterm of a linearized lhs must leave an lhs instance above it
        for k, lb in enumerate(lins):
            for p in fpos(lb):
                if not p:
                    continue
                if finite_unifier((d, subterm_at(lb, p))) is None:
                    continue
                hole = Var("□@hole")
                above = replace_at(lb, p, hole)
                if not any(is_instance(above, lb2) for lb2 in lins2):
                    issues.append(RankIssue(gi, "ii", (
                        f"{d} overlaps {subterm_at(linearize(trs.rules[k].lhs).term, p)} at "
                        f"{format_position(p)} of rule {k + 1}, and {replace_at(linearize(trs.rules[k].lhs).term, p, Var('□'))} "
                        f"is an instance of no linearized lefthand side")))
    return RankCheck(tuple(issues))


# -- empirical rank probe --------------------------------------------------------------

@dataclass(frozen=True)
class RankProbe:
    terms: int
    steps: int
    exhaustive: bool
    violations: Tuple[Tuple[Term, Term, int, int], ...] = ()   # (t, t', rank t, rank t')

    @property
    def ok(self) -> bool:
        return not self.violations


def ground_terms(sig: Dict[str, int], depth: int, limit: int) -> Optional[List[Term]]:
    """All ground terms of depth at most ``depth``, or None past ``limit``."""
    total = 0
    for _ in range(depth):
        total = sum(total ** n for n in sig.values())
        if total > limit:
            return None
    consts = [App(f, ()) for f, n in sorted(sig.items()) if n == 0]
    everything = list(consts)
    fresh = set(consts)
    for _ in range(depth - 1):
        nxt = []
        for f, n in sorted(sig.items()):
            if n:
                nxt.extend(App(f, args) for args in product(everything, repeat=n)
                           if any(a in fresh for a in args))
        fresh = set(nxt)
        everything += nxt
    return everything


def _random_ground(rng: random.Random, sig: Dict[str, int], depth: int) -> Term:
    if depth <= 1:
        return App(rng.choice([f for f, n in sorted(sig.items()) if n == 0]), ())
    f = rng.choice(sorted(sig))
    return App(f, tuple(_random_ground(rng, sig, depth - 1) for _ in range(sig[f])))


def rank_probe(trs: Trs, depth: int = 5, limit: int = 20000, samples: int = 20000,
               seed: int = 0) -> RankProbe:
    """Search ground terms of depth ≤ ``depth`` for a step that raises the rank.

    Exhaustive when there are at most ``limit`` such terms, otherwise a
    seeded random sample of ``samples`` terms.
    """
    from .rewriting import one_step

    ranker = Ranker(trs)
    sig = dict(trs.signature)
    if not any(n == 0 for n in sig.values()):
        sig["#0"] = 0
    terms = ground_terms(sig, depth, limit)
    exhaustive = terms is not None
    if terms is None:
        rng = random.Random(seed)
        terms = [_random_ground(rng, sig, rng.randint(1, depth)) for _ in range(samples)]
    bad = []
    steps = 0
    for t in terms:
        rt = ranker(t)
        for st in one_step(t, trs):
            steps += 1
            ru = ranker(st.result)
            if ru > rt:
                bad.append((t, st.result, rt, ru))
    return RankProbe(len(terms), steps, exhaustive, tuple(bad))
