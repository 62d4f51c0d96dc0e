"""Cyclic rewrite systems, congruence closure and cyclic unifiers.

Variables occurring in cyclic rules and in congruence queries are treated
as constants throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .terms import App, Subst, Term, Var, apply, fresh_name, iter_subterms, match, normalize, variables
from .unification import Problem, SolvedForm, solve


class NotAnInstance(ValueError):
    pass


@dataclass(frozen=True)
class CyclicRewriteSystem:
    rules: Tuple[Tuple[str, Term], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def __bool__(self):
        return bool(self.rules)

    def __len__(self):
        return len(self.rules)

    def lhs(self) -> List[str]:
        return [y for y, _ in self.rules]

    def equations(self, eta: Optional[Subst] = None) -> List[Tuple[Term, Term]]:
        """The rules as ground equations, righthand sides instantiated by ``eta``."""
        return [(Var(y), apply(v, eta or {})) for y, v in self.rules]

    def __str__(self):
        return "{" + ", ".join(f"{y}→{v}" for y, v in self.rules) + "}"


@dataclass(frozen=True)
class CyclicUnifier:
    eta: Dict[str, Term]
    rs: CyclicRewriteSystem

    def __str__(self):
        eta = "{" + ", ".join(f"{x}↦{u}" for x, u in sorted(self.eta.items())) + "}"
        return f"⟨{eta}, {self.rs}⟩"


def canonical_cyclic_unifier(sf: SolvedForm) -> CyclicUnifier:
    return CyclicUnifier(dict(sf.finite), CyclicRewriteSystem(sf.cyclic))


def crs_church_rosser_check(rs: CyclicRewriteSystem) -> bool:
    """Lefthand sides are pairwise distinct constants, hence no overlaps."""
    names = rs.lhs()
    return len(set(names)) == len(names)


# -- congruence closure ---------------------------------------------------------

class CongruenceClosure:
    """Ground congruence closure over a finite subterm-closed universe."""

    def __init__(self, eqs: Iterable[Tuple[Term, Term]] = (), terms: Iterable[Term] = ()):
        self.parent: Dict[Term, Term] = {}
        self.uses: Dict[Term, List[Term]] = {}
        self.sig: Dict[tuple, Term] = {}
        self.pending: List[Tuple[Term, Term]] = []
        for t in terms:
            self.add(t)
        for s, t in eqs:
            self.merge(s, t)

    def add(self, t: Term) -> Term:
        if t in self.parent:
            return t
        if type(t) is App:
            for a in t.args:
                self.add(a)
        self.parent[t] = t
        self.uses[t] = []
        if type(t) is App and t.args:
            for a in t.args:
                self.uses[self.find(a)].append(t)
            key = self._signature(t)
            other = self.sig.get(key)
            if other is None:
                self.sig[key] = t
            else:
                self.pending.append((t, other))
                self._propagate()
        return t

    def find(self, t: Term) -> Term:
        root = t
        while self.parent[root] is not root:
            root = self.parent[root]
        while self.parent[t] is not root:
            self.parent[t], t = root, self.parent[t]
        return root

    def _signature(self, t: App) -> tuple:
        return (t.name, tuple(self.find(a) for a in t.args))

    def merge(self, s: Term, t: Term) -> None:
        self.add(s)
        self.add(t)
        self.pending.append((s, t))
        self._propagate()

    def _propagate(self) -> None:
        while self.pending:
            s, t = self.pending.pop()
            a, b = self.find(s), self.find(t)
            if a is b:
                continue
            if len(self.uses[a]) > len(self.uses[b]):
                a, b = b, a
            self.parent[a] = b
            moved = self.uses.pop(a)
            for u in moved:
                key = self._signature(u)
                other = self.sig.get(key)
                if other is None:
                    self.sig[key] = u
                elif self.find(other) is not self.find(u):
                    self.pending.append((u, other))
            self.uses[b].extend(moved)

    def equivalent(self, s: Term, t: Term) -> bool:
        self.add(s)
        self.add(t)
        return self.find(s) is self.find(t)

    def classes(self) -> Dict[Term, List[Term]]:
        out: Dict[Term, List[Term]] = {}
        for t in self.parent:
            out.setdefault(self.find(t), []).append(t)
        return out


def congruent(u: Term, v: Term, eqs: Iterable[Tuple[Term, Term]] = ()) -> bool:
    """``u =cc v`` modulo the ground equations ``eqs``."""
    if u == v:
        return True
    return CongruenceClosure(eqs).equivalent(u, v)


# -- cyclic unifiers ---------------------------------------------------------------

@dataclass
class Verification:
    ok: bool
    violations: List[str] = field(default_factory=list)
    clause_ii: str = "checked"

    def __bool__(self):
        return self.ok


def _problem_eqs(p) -> Sequence[Tuple[Term, Term]]:
    return p.eqs if isinstance(p, Problem) else tuple(p)


def _freeze(vs: Iterable[str], taken: set) -> Dict[str, Term]:
    out = {}
    for x in sorted(vs):
        name = fresh_name(f"#{x}", taken)
        taken.add(name)
        out[x] = App(name, ())
    return out


def clause_ii_holds(rs: CyclicRewriteSystem, p) -> bool:
    """Whether P and P ∧ R have the same solutions.

    Solutions of P ∧ R are solutions of P.  Conversely, in a solved form of
    P every non-parameter is determined by the parameters, so every
    solution of P satisfies R iff R is consistent with the solved form once
    the parameters are frozen into fresh constants.
    """
    eqs = _problem_eqs(p)
    pv = variables(*(t for e in eqs for t in e))
    sf = solve(Problem(tuple(eqs)))
    with_r = Problem(tuple(eqs) + tuple(rs.equations()))
    if sf is None:
        return True
    taken = {s.name for e in with_r.eqs for t in e for _, s in iter_subterms(t) if type(s) is App}
    frozen = _freeze(sf.parameters & pv, taken)
    base = [(Var(x), apply(u, frozen)) for x, u in sf.equations()]
    extra = [(apply(Var(y), frozen), apply(v, frozen)) for y, v in rs.rules]
    return solve(Problem(tuple(base + extra))) is not None


def verify_cyclic_unifier(cu: CyclicUnifier, p) -> Verification:
    eqs = _problem_eqs(p)
    pv = variables(*(t for e in eqs for t in e))
    ys = set(cu.rs.lhs())
    eta = normalize(cu.eta)
    out = []
    dom = set(eta)
    ran = variables(*eta.values())
    if not dom <= pv - ys:
        out.append(f"(i) Dom(η) = {sorted(dom)} not within Var(P) minus cyclic variables")
    if ran & ys:
        out.append(f"(i) Ran(η) meets cyclic variables {sorted(ran & ys)}")
    if ran & dom:
        out.append(f"(i) Ran(η) meets Dom(η) at {sorted(ran & dom)}")
    if not crs_church_rosser_check(cu.rs):
        out.append("not a cyclic rewrite system: repeated lefthand sides")
    if not clause_ii_holds(cu.rs, eqs):
        out.append("(ii) P ∧ R has fewer solutions than P")
    cc = CongruenceClosure(cu.rs.equations(eta))
    for u, v in eqs:
        a, b = apply(u, eta), apply(v, eta)
        if not cc.equivalent(a, b):
            out.append(f"(iii) {a} and {b} are not congruent modulo Rη")
    return Verification(not out, out)


def clause_iii_holds(cu: CyclicUnifier, p) -> bool:
    eta = normalize(cu.eta)
    cc = CongruenceClosure(cu.rs.equations(eta))
    return all(cc.equivalent(apply(u, eta), apply(v, eta)) for u, v in _problem_eqs(p))


def instance_of(candidate: CyclicUnifier, canonical: CyclicUnifier, vars_: Iterable[str]) -> Dict[str, Term]:
    """ρ with ``candidate.eta = canonical.eta ρ`` on ``vars_``."""
    if candidate.rs != canonical.rs:
        raise NotAnInstance("cyclic rewrite systems differ")
    vs = sorted(set(vars_) | set(candidate.eta) | set(canonical.eta))
    pattern = App("#", tuple(apply(Var(x), canonical.eta) for x in vs))
    subject = App("#", tuple(apply(Var(x), candidate.eta) for x in vs))
    rho = match(pattern, subject)
    if rho is None:
        raise NotAnInstance(f"{candidate} is not an instance of {canonical}")
    return normalize(rho)
