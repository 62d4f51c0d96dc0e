"""Sub-rewriting: equalize the variable instances of a lefthand side, then fire.

A step at position p with rule l -> r first rewrites strictly below the
non-variable positions of l (only inside the instances of its variables)
until a genuine l-redex appears, then contracts it.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Tuple

from .rewriting import Step, reach
from .terms import (Position, Subst, Term, apply, iter_subterms, linearize, match, replace_at,
                    subterm_at)
from .trs import Trs

DEFAULT_EQ_DEPTH = 6


@dataclass(frozen=True)
class SubRewriteStep:
    source: Term
    position: Position
    rule: int
    equalization: Tuple[Step, ...]
    fired_redex: Term
    result: Term
    label: Optional[Tuple[int, int]] = None

    def derivation(self) -> List[Step]:
        """The plain rewrite derivation from source to result."""
        fired = self.source
        for st in self.equalization:
            fired = st.result
        return list(self.equalization) + [Step(fired, self.position, self.rule, self.result)]


def _occurrences(l: Term):
    """(variable, position) pairs of l in left-to-right order."""
    return [(s.name, o) for o, s in iter_subterms(l) if type(s).__name__ == "Var"]


def _lift(steps: List[Step], outer: Term, at: Position) -> Tuple[List[Step], Term]:
    lifted = []
    cur = outer
    for st in steps:
        nxt = replace_at(cur, at, st.result)
        lifted.append(Step(cur, at + st.position, st.rule, nxt))
        cur = nxt
    return lifted, cur


def sub_rewrite(u: Term, trs: Trs, rule: int, p: Position, eq_depth: int = DEFAULT_EQ_DEPTH,
                node_bound: int = 2000, limit: int = 64,
                rank_of: Optional[Callable[[Term], int]] = None) -> List[SubRewriteStep]:
    """Sub-rewriting steps of ``u`` at ``p`` with the given rule.

    Each occurrence instance of a variable is explored up to ``eq_depth``
    steps; every common reduct of all occurrences of every variable gives
    an equalizer.  At most ``limit`` steps are returned.
    """
    r = trs.rules[rule]
    target = subterm_at(u, p)
    lin = linearize(r.lhs, "eq")
    theta = match(lin.term, target)
    if theta is None:
        return []
    occs = _occurrences(r.lhs)
    lin_names = [s.name for _, s in iter_subterms(lin.term) if type(s).__name__ == "Var"]
    by_var: Dict[str, List[Tuple[str, Position]]] = {}
    for (x, o), xl in zip(occs, lin_names):
        by_var.setdefault(x, []).append((xl, o))
    # candidate common reducts per variable, with the reach sets to replay them
    choices = []
    for x, group in by_var.items():
        reaches = [reach(theta[xl], trs, eq_depth if len(group) > 1 else 0, node_bound) for xl, _ in group]
        common = [t for t in reaches[0].terms if all(t in rc for rc in reaches[1:])]
        common.sort(key=lambda t: (sum(rc.depth[t] for rc in reaches), str(t)))
        if not common:
            return []
        choices.append([(x, group, reaches, t) for t in common])
    label = None
    if rank_of is not None:
        label = (rank_of(target), r.index)
    out = []
    for combo in product(*choices):
        cur = u
        eq_steps: List[Step] = []
        sigma: Subst = {}
        for x, group, reaches, t in combo:
            sigma[x] = t
            for (xl, o), rc in zip(group, reaches):
                lifted, cur = _lift(rc.derivation(t), cur, p + o)
                eq_steps.extend(lifted)
        fired = apply(r.lhs, sigma)
        result = replace_at(cur, p, apply(r.rhs, sigma))
        out.append(SubRewriteStep(u, p, rule, tuple(eq_steps), fired, result, label))
        if len(out) >= limit:
            break
    return out


def sub_rewrites_at(u: Term, trs: Trs, p: Position, **kw) -> List[SubRewriteStep]:
    out = []
    for k in range(len(trs.rules)):
        out.extend(sub_rewrite(u, trs, k, p, **kw))
    return out


def all_sub_rewrites(u: Term, trs: Trs, **kw) -> List[SubRewriteStep]:
    out = []
    for p, _ in iter_subterms(u):
        out.extend(sub_rewrites_at(u, trs, p, **kw))
    return out


def decompose_redex(step: SubRewriteStep, trs: Trs) -> Tuple[Subst, Subst]:
    """(θ over the linearized lefthand side, equalizer σ) of a step."""
    r = trs.rules[step.rule]
    theta = match(linearize(r.lhs).term, subterm_at(step.source, step.position))
    sigma = match(r.lhs, step.fired_redex)
    return theta, sigma
