"""Unification over rational trees by rule-based transformation.

A problem is a tuple of oriented equations.  The nine transformation rules
never perform an occur check, so a problem fails only on a symbol clash;
cyclic equations survive into the solved form.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .terms import App, Term, Var, apply, size, variables

Equation = Tuple[Term, Term]

RULES = ("Remove", "Decomp", "Conflict", "Coalesce", "Merge", "Replace", "Choose", "Swap", "Merep")


class RuleNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class Problem:
    eqs: Tuple[Equation, ...] = ()
    failed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eqs", tuple(self.eqs))

    def variables(self) -> set:
        return variables(*(t for e in self.eqs for t in e))

    def __str__(self):
        if self.failed:
            return "⊥"
        if not self.eqs:
            return "⊤"
        return " ∧ ".join(f"{s}={t}" for s, t in self.eqs)


BOTTOM = Problem((), True)


def problem(*pairs: Equation) -> Problem:
    return Problem(tuple(pairs))


@dataclass(frozen=True)
class SolvedForm:
    finite: Tuple[Tuple[str, Term], ...]
    cyclic: Tuple[Tuple[str, Term], ...]
    parameters: FrozenSet[str]

    def equations(self) -> List[Tuple[str, Term]]:
        return list(self.finite) + list(self.cyclic)

    @property
    def is_tree(self) -> bool:
        return not self.cyclic

    def as_problem(self) -> Problem:
        return Problem(tuple((Var(x), u) for x, u in self.equations()))

    def __str__(self):
        parts = [f"{x}={u}" for x, u in self.equations()]
        return " ∧ ".join(parts) if parts else "⊤"


# -- rule application ---------------------------------------------------------

def _rest_vars(eqs: Sequence[Equation], skip: Iterable[int]) -> set:
    skip = set(skip)
    return variables(*(t for k, e in enumerate(eqs) if k not in skip for t in e))


def _subst_rest(eqs, keep: Iterable[int], sigma) -> Tuple[Equation, ...]:
    keep = set(keep)
    return tuple(e if k in keep else (apply(e[0], sigma), apply(e[1], sigma)) for k, e in enumerate(eqs))


def _is_var(t) -> bool:
    return type(t) is Var


def applicable(p: Problem, rule: str, k: int, m: Optional[int] = None) -> bool:
    """Side condition of ``rule`` on equation ``k`` (and ``m`` for Merge/Merep)."""
    if p.failed or not 0 <= k < len(p.eqs):
        return False
    s, t = p.eqs[k]
    if rule == "Remove":
        return s == t
    if rule == "Decomp":
        return type(s) is App and type(t) is App and s.name == t.name and s.arity == t.arity
    if rule == "Conflict":
        return type(s) is App and type(t) is App and (s.name != t.name or s.arity != t.arity)
    if rule == "Choose":
        # y = x  ->  x = y   if x not in Var(P), y in Var(P)
        if not (_is_var(s) and _is_var(t)) or s == t:
            return False
        rest = _rest_vars(p.eqs, [k])
        return t.name not in rest and s.name in rest
    if rule == "Coalesce":
        if not (_is_var(s) and _is_var(t)) or s == t:
            return False
        rest = _rest_vars(p.eqs, [k])
        return s.name in rest and t.name in rest
    if rule == "Swap":
        return not _is_var(s) and _is_var(t)
    if rule == "Replace":
        if not _is_var(s) or _is_var(t) or s.name in variables(t):
            return False
        return s.name in _rest_vars(p.eqs, [k])
    if rule == "Merge":
        # x = s ∧ x = t -> x = s ∧ s = t   if 0 < |s| <= |t|, both non-variables
        if m is None or m == k or not 0 <= m < len(p.eqs):
            return False
        s2, t2 = p.eqs[m]
        return (_is_var(s) and s == s2 and not _is_var(t) and not _is_var(t2)
                and size(t) <= size(t2))
    if rule == "Merep":
        # y = x ∧ x = s -> y = s ∧ x = s   if x in Var(s), s not a variable,
        # y not in Var(s, P), and no other rule applies
        if m is None or m == k or not 0 <= m < len(p.eqs):
            return False
        x, s2 = p.eqs[m]
        if not (_is_var(s) and _is_var(t) and t == x) or _is_var(s2):
            return False
        if x.name not in variables(s2) or s == x:
            return False
        if s.name in variables(s2) | _rest_vars(p.eqs, [k, m]):
            return False
        return not any(applicable(p, r, a, b) for r, a, b in _candidates(p) if r != "Merep")
    raise ValueError(f"unknown rule {rule}")


def _candidates(p: Problem):
    n = len(p.eqs)
    for r in RULES:
        if r in ("Merge", "Merep"):
            for a in range(n):
                for b in range(n):
                    if a != b:
                        yield r, a, b
        else:
            for a in range(n):
                yield r, a, None


def apply_rule(p: Problem, rule: str, k: int, m: Optional[int] = None) -> Problem:
    if not applicable(p, rule, k, m):
        raise RuleNotApplicable(f"{rule} does not apply to {p}")
    eqs = p.eqs
    s, t = eqs[k]
    if rule == "Remove":
        return Problem(eqs[:k] + eqs[k + 1:])
    if rule == "Decomp":
        return Problem(eqs[:k] + tuple(zip(s.args, t.args)) + eqs[k + 1:])
    if rule == "Conflict":
        return BOTTOM
    if rule in ("Choose", "Swap"):
        return Problem(eqs[:k] + ((t, s),) + eqs[k + 1:])
    if rule in ("Coalesce", "Replace"):
        return Problem(_subst_rest(eqs, [k], {s.name: t}))
    if rule == "Merge":
        t2 = eqs[m][1]
        new = list(eqs)
        new[m] = (t, t2)
        return Problem(tuple(new))
    if rule == "Merep":
        s2 = eqs[m][1]
        new = list(eqs)
        new[k] = (s, s2)
        return Problem(tuple(new))
    raise ValueError(rule)


def successors(p: Problem):
    """Every applicable ``(rule, k, m, result)``, in strategy order."""
    for r, a, b in _candidates(p):
        if applicable(p, r, a, b):
            yield r, a, b, apply_rule(p, r, a, b)


def step(p: Problem):
    """The deterministic strategy: first applicable rule, first target."""
    return next(successors(p), None)


def normalize_problem(p: Problem, trace: Optional[list] = None) -> Problem:
    while True:
        nxt = step(p)
        if nxt is None:
            return p
        if trace is not None:
            trace.append(nxt)
        p = nxt[3]
        if p.failed:
            return p


# -- solved forms ---------------------------------------------------------------

def classify(p: Problem, original_vars: Optional[set] = None) -> SolvedForm:
    """Split a normal form into finite and cyclic equations."""
    if p.failed:
        raise ValueError("cannot classify ⊥")
    if any(not _is_var(s) for s, _ in p.eqs):
        raise ValueError(f"{p} is not a conjunction of x = s equations")
    lhs = [s.name for s, _ in p.eqs]
    allv = set(original_vars) if original_vars is not None else p.variables()
    allv |= p.variables()
    params = frozenset(allv - set(lhs))
    finite, cyclic = [], []
    for s, t in p.eqs:
        (finite if variables(t) <= params else cyclic).append((s.name, t))
    return SolvedForm(tuple(finite), tuple(cyclic), params)


def solve(p: Problem, trace: Optional[list] = None) -> Optional[SolvedForm]:
    """Solved form of ``p``, or None for ⊥."""
    nf = normalize_problem(p, trace)
    if nf.failed:
        return None
    return classify(nf, p.variables())


def unify(s: Term, t: Term) -> Optional[SolvedForm]:
    return solve(problem((s, t)))


def solved_form_violations(sf: SolvedForm, original_vars: Optional[set] = None) -> List[str]:
    """Structural check of the solved-form clauses; empty when all hold."""
    out = []
    lhs = [x for x, _ in sf.equations()]
    if len(set(lhs)) != len(lhs):
        out.append("lefthand variables are not distinct")
    if original_vars is not None:
        everything = set(original_vars) | variables(*(u for _, u in sf.equations()))
        if sf.parameters != frozenset(everything - set(lhs)):
            out.append("parameters differ from Var(P) minus lefthand variables")
    ys = {y for y, _ in sf.cyclic}
    for x, u in sf.finite:
        if not variables(u) <= sf.parameters:
            out.append(f"finite equation {x}={u} mentions non-parameters")
    for y, v in sf.cyclic:
        vs = variables(v)
        if not vs <= sf.parameters | ys:
            out.append(f"cyclic equation {y}={v} mentions finite variables")
        if not vs & ys:
            out.append(f"cyclic equation {y}={v} mentions no cyclic variable")
        if _is_var(v):
            out.append(f"cyclic equation {y}={v} has a variable righthand side")
    return out


def mgu(s: Term, t: Term) -> Optional[Dict[str, Term]]:
    """Most general finite unifier, or None when only infinite ones exist."""
    sf = unify(s, t)
    if sf is None or sf.cyclic:
        return None
    return dict(sf.finite)


# -- termination measure ----------------------------------------------------------

@dataclass(frozen=True, order=False)
class Measure:
    nu: int
    sizes: Tuple[int, ...]      # sorted descending; a multiset
    nvre: int
    nvle: int

    def __gt__(self, other: "Measure") -> bool:
        if self.nu != other.nu:
            return self.nu > other.nu
        if Counter(self.sizes) != Counter(other.sizes):
            return multiset_greater(self.sizes, other.sizes)
        if self.nvre != other.nvre:
            return self.nvre > other.nvre
        return self.nvle > other.nvle

    def __str__(self):
        return f"⟨{self.nu}, {{{', '.join(map(str, self.sizes))}}}, {self.nvre}, {self.nvle}⟩"


def multiset_greater(m: Iterable[int], n: Iterable[int]) -> bool:
    """Multiset extension of > on naturals."""
    a, b = Counter(m), Counter(n)
    common = a & b
    a, b = a - common, b - common
    if not a:
        return False
    return all(any(x > y for x in a) for y in b)


def solved_variables(p: Problem) -> set:
    out = set()
    for k, (s, t) in enumerate(p.eqs):
        if _is_var(s) and s.name not in variables(t) | _rest_vars(p.eqs, [k]):
            out.add(s.name)
    return out


def measure(p: Problem) -> Measure:
    if p.failed:
        return Measure(0, (), 0, 0)
    nu = len(p.variables() - solved_variables(p))
    sizes = tuple(sorted((max(size(s), size(t)) for s, t in p.eqs), reverse=True))
    nvre = sum(1 for s, t in p.eqs if not _is_var(s) and _is_var(t))
    nvle = sum(1 for s, t in p.eqs if _is_var(s) and not _is_var(t))
    return Measure(nu, sizes, nvre, nvle)
