"""First-order terms, positions, substitutions, linearization and matching.

Terms are immutable.  Positions are tuples of 1-based argument indexes, the
empty tuple being the root.  Substitutions are plain dicts mapping variable
names to terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

Position = Tuple[int, ...]
Subst = Dict[str, "Term"]

ROOT: Position = ()


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("V", self.name)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    name: str
    args: Tuple["Term", ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_hash", hash((self.name, self.args)))

    def __hash__(self):
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


Term = Var | App


class InvalidPosition(ValueError):
    pass


def const(name: str) -> App:
    return App(name, ())


def fun(name: str, *args: Term) -> App:
    return App(name, tuple(args))


def is_var(t: Term) -> bool:
    return type(t) is Var


def size(t: Term) -> int:
    """Node count, variables included."""
    if type(t) is Var:
        return 1
    return 1 + sum(size(a) for a in t.args)


def depth(t: Term) -> int:
    if type(t) is Var or not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def var_list(t: Term, acc: Optional[List[str]] = None) -> List[str]:
    """Variables of ``t`` in left-to-right first-occurrence order."""
    if acc is None:
        acc = []
    if type(t) is Var:
        if t.name not in acc:
            acc.append(t.name)
    else:
        for a in t.args:
            var_list(a, acc)
    return acc


def variables(*ts: Term) -> set:
    out: set = set()
    for t in ts:
        _collect_vars(t, out)
    return out


def _collect_vars(t: Term, out: set) -> None:
    if type(t) is Var:
        out.add(t.name)
    else:
        for a in t.args:
            _collect_vars(a, out)


def is_ground(t: Term) -> bool:
    return not variables(t)


def is_linear(t: Term) -> bool:
    seen: set = set()
    for _, s in iter_subterms(t):
        if type(s) is Var:
            if s.name in seen:
                return False
            seen.add(s.name)
    return True


def iter_subterms(t: Term, pos: Position = ROOT) -> Iterator[Tuple[Position, Term]]:
    """Preorder walk yielding ``(position, subterm)``."""
    yield pos, t
    if type(t) is App:
        for i, a in enumerate(t.args, 1):
            yield from iter_subterms(a, pos + (i,))


def positions(t: Term) -> List[Position]:
    return [p for p, _ in iter_subterms(t)]


def fpos(t: Term) -> List[Position]:
    """Non-variable positions of ``t`` in preorder."""
    return [p for p, s in iter_subterms(t) if type(s) is App]


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if type(t) is Var or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {format_position(p)} not in {t}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    if type(t) is Var or not 1 <= p[0] <= len(t.args):
        raise InvalidPosition(f"position {format_position(p)} not in {t}")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], u)
    return App(t.name, tuple(args))


def is_prefix(p: Position, q: Position) -> bool:
    """``p <= q`` in the prefix order (q is at or below p)."""
    return q[: len(p)] == p


def below(q: Position, p: Position) -> bool:
    """``q > p``: q strictly below p."""
    return len(q) > len(p) and q[: len(p)] == p


def disjoint(p: Position, q: Position) -> bool:
    return not is_prefix(p, q) and not is_prefix(q, p)


def maximal(ps) -> List[Position]:
    ps = list(ps)
    return [p for p in ps if not any(below(q, p) for q in ps)]


def set_geq(P, Q, strict: bool = False) -> bool:
    """Set extension of the position order: every p in P is (strictly)
    below or equal to some maximal element of Q."""
    mq = maximal(Q)
    if strict:
        return all(any(below(p, q) for q in mq) for p in P)
    return all(any(is_prefix(q, p) for q in mq) for p in P)


def format_position(p: Position) -> str:
    return "Λ" if not p else ".".join(str(i) for i in p)


def parse_position(text: str) -> Position:
    text = text.strip()
    if text in ("", "Λ", "root", "e", "eps"):
        return ROOT
    try:
        out = tuple(int(x) for x in text.split("."))
    except ValueError:
        raise InvalidPosition(f"bad position {text!r}") from None
    if any(i < 1 for i in out):
        raise InvalidPosition(f"bad position {text!r}")
    return out


# -- substitutions -----------------------------------------------------------

def apply(t: Term, sigma: Subst) -> Term:
    if not sigma:
        return t
    return _apply(t, sigma)


def _apply(t: Term, sigma: Subst) -> Term:
    if type(t) is Var:
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.name, tuple(_apply(a, sigma) for a in t.args))


def normalize(sigma: Subst) -> Subst:
    """Drop identity bindings."""
    return {x: t for x, t in sigma.items() if not (type(t) is Var and t.name == x)}


def compose(sigma: Subst, tau: Subst) -> Subst:
    """Substitution ``sigma tau`` (apply sigma first, then tau)."""
    out = {x: apply(t, tau) for x, t in sigma.items()}
    for x, t in tau.items():
        out.setdefault(x, t)
    return normalize(out)


def domain(sigma: Subst) -> set:
    return set(normalize(sigma))


def range_vars(sigma: Subst) -> set:
    return variables(*normalize(sigma).values())


def rename_vars(t: Term, mapping: Dict[str, str]) -> Term:
    return apply(t, {x: Var(y) for x, y in mapping.items()})


def fresh_name(base: str, taken) -> str:
    name = base + "'"
    while name in taken:
        name += "'"
    return name


# -- linearization -----------------------------------------------------------

@dataclass(frozen=True)
class Linearized:
    term: Term
    origin: Dict[str, str]

    def erase(self) -> Term:
        return rename_vars(self.term, self.origin)


def linearize(t: Term, salt: str = "") -> Linearized:
    """Rename every occurrence of a repeated variable apart (x^1, x^2, ...).

    Without a salt, variables occurring once keep their name, so a linear
    term is its own linearization.  A non-empty salt tags every variable,
    which keeps linearizations with different salts variable-disjoint.
    """
    counts: Dict[str, int] = {}
    for _, s in iter_subterms(t):
        if type(s) is Var:
            counts[s.name] = counts.get(s.name, 0) + 1
    seen: Dict[str, int] = {}
    origin: Dict[str, str] = {}

    def go(s: Term) -> Term:
        if type(s) is Var:
            k = seen[s.name] = seen.get(s.name, 0) + 1
            if counts[s.name] == 1 and not salt:
                name = s.name
            else:
                name = f"{s.name}^{k}"
                if salt:
                    name += f"@{salt}"
            origin[name] = s.name
            return Var(name)
        if not s.args:
            return s
        return App(s.name, tuple(go(a) for a in s.args))

    return Linearized(go(t), origin)


# -- matching ----------------------------------------------------------------

def match(pattern: Term, subject: Term, sigma: Optional[Subst] = None) -> Optional[Subst]:
    """Return sigma with ``pattern sigma == subject`` or None.

    Subject variables are treated as constants.
    """
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if type(p) is Var:
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif type(s) is Var or p.name != s.name or len(p.args) != len(s.args):
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sigma


def is_instance(s: Term, t: Term) -> bool:
    """``s`` is an instance of ``t`` (s = t theta)."""
    return match(t, s) is not None
