"""Plain rewriting: single steps, bounded reachability, normal forms.

Variables of the terms being rewritten behave as constants: matching never
instantiates them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .terms import App, Position, Term, apply, iter_subterms, match, replace_at, subterm_at
from .trs import Rule, Trs


class NoMatch(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    """One rewrite step ``source ->[position, rule] result``.

    ``rule`` is the 0-based number of the rule in its system.
    """
    source: Term
    position: Position
    rule: int
    result: Term


def rewrite_step(t: Term, rule: Rule, p: Position) -> Term:
    """Contract the ``rule`` redex at ``p``; raise NoMatch when there is none."""
    sigma = match(rule.lhs, subterm_at(t, p))
    if sigma is None:
        raise NoMatch(f"{rule.lhs} does not match {subterm_at(t, p)}")
    return replace_at(t, p, apply(rule.rhs, sigma))


def labelled_step(t: Term, rule: Rule, p: Position,
                  rank_of: Callable[[Term], int]) -> Tuple[Term, Tuple[int, int]]:
    """Like rewrite_step, also returning the label (rank of the redex, rule index)."""
    result = rewrite_step(t, rule, p)
    return result, (rank_of(subterm_at(t, p)), rule.index)


def redexes(t: Term, trs: Trs) -> Iterator[Tuple[Position, int, dict]]:
    """All ``(position, rule number, matcher)`` triples, preorder then rule order."""
    for p, s in iter_subterms(t):
        if type(s) is not App:
            continue
        for k, r in enumerate(trs.rules):
            if r.lhs.name != s.name:
                continue
            sigma = match(r.lhs, s)
            if sigma is not None:
                yield p, k, sigma


def one_step(t: Term, trs: Trs) -> List[Step]:
    out = []
    for p, k, sigma in redexes(t, trs):
        out.append(Step(t, p, k, replace_at(t, p, apply(trs.rules[k].rhs, sigma))))
    return out


def is_normal(t: Term, trs: Trs) -> bool:
    return next(redexes(t, trs), None) is None


@dataclass
class Reach:
    """Result of a bounded breadth-first exploration from ``start``.

    ``parent`` maps every visited term to the step that first reached it
    (None for the start).  ``complete`` is true when the exploration ended
    because nothing new was reachable, not because a bound was hit.
    """
    start: Term
    parent: Dict[Term, Optional[Step]]
    depth: Dict[Term, int]
    complete: bool

    @property
    def terms(self):
        return self.parent.keys()

    def __contains__(self, t):
        return t in self.parent

    def derivation(self, t: Term) -> List[Step]:
        steps = []
        while self.parent[t] is not None:
            st = self.parent[t]
            steps.append(st)
            t = st.source
        steps.reverse()
        return steps


def reach(t: Term, trs: Trs, depth_bound: int = 12, node_bound: int = 50000) -> Reach:
    parent: Dict[Term, Optional[Step]] = {t: None}
    depth = {t: 0}
    queue = deque([t])
    complete = True
    while queue:
        u = queue.popleft()
        fresh = [st for st in one_step(u, trs) if st.result not in parent]
        if not fresh:
            continue
        if depth[u] >= depth_bound or len(parent) >= node_bound:
            complete = False
            continue
        for st in fresh:
            if st.result in parent:
                continue
            if len(parent) >= node_bound:
                complete = False
                break
            parent[st.result] = st
            depth[st.result] = depth[u] + 1
            queue.append(st.result)
    return Reach(t, parent, depth, complete)


def normal_forms(t: Term, trs: Trs, depth_bound: int = 12, node_bound: int = 50000):
    """Normal forms reachable within the bounds, and the completeness flag."""
    r = reach(t, trs, depth_bound, node_bound)
    nfs = frozenset(u for u in r.terms if is_normal(u, trs))
    return nfs, r.complete
