"""Independent re-validation of a JSON report.

Nothing here searches.  Each recorded step is replayed with a separate
matcher, congruences are re-derived by a naive closure, pair coverage is
re-established with a union-find unifier over rational trees, and
decreasingness is re-checked by enumerating all decompositions.  Only the
parser and the term datatypes are shared with the analyzer, plus the
layering decision procedures for the premises of a positive verdict.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .terms import App, Term, Var, parse_position
from .trs import Rule, Trs, parse_term, parse_trs


class Rejected(Exception):
    pass


# -- small independent term utilities -------------------------------------------------

def _sub(t: Term, pos) -> Term:
    for i in pos:
        if type(t) is not App or not 1 <= i <= len(t.args):
            raise Rejected(f"position {pos} not in {t}")
        t = t.args[i - 1]
    return t


def _put(t: Term, pos, u: Term) -> Term:
    if not pos:
        return u
    args = list(t.args)
    args[pos[0] - 1] = _put(args[pos[0] - 1], pos[1:], u)
    return App(t.name, tuple(args))


def _inst(t: Term, s: Dict[str, Term]) -> Term:
    if type(t) is Var:
        return s.get(t.name, t)
    return App(t.name, tuple(_inst(a, s) for a in t.args))


def _match(p: Term, t: Term, s: Dict[str, Term]) -> bool:
    if type(p) is Var:
        if p.name in s:
            return s[p.name] == t
        s[p.name] = t
        return True
    if type(t) is not App or p.name != t.name or len(p.args) != len(t.args):
        return False
    return all(_match(a, b, s) for a, b in zip(p.args, t.args))


def _vars(t: Term, acc=None) -> set:
    acc = set() if acc is None else acc
    if type(t) is Var:
        acc.add(t.name)
    else:
        for a in t.args:
            _vars(a, acc)
    return acc


def _subterms(t: Term, acc: set) -> None:
    if t in acc:
        return
    acc.add(t)
    if type(t) is App:
        for a in t.args:
            _subterms(a, acc)


def _fpos(t: Term, pos=()):
    if type(t) is App:
        yield pos
        for i, a in enumerate(t.args, 1):
            yield from _fpos(a, pos + (i,))


def _successors(t: Term, trs: Trs, pos=()):
    if type(t) is not App:
        return
    for k, r in enumerate(trs.rules):
        s: Dict[str, Term] = {}
        if _match(r.lhs, t, s):
            yield _inst(r.rhs, s)
    for i, a in enumerate(t.args, 1):
        for b in _successors(a, trs):
            args = list(t.args)
            args[i - 1] = b
            yield App(t.name, tuple(args))


# -- congruence by naive saturation -----------------------------------------------------

def naive_congruent(u: Term, v: Term, eqs: Sequence[Tuple[Term, Term]]) -> bool:
    universe: set = set()
    for t in [u, v] + [x for e in eqs for x in e]:
        _subterms(t, universe)
    cls = {t: i for i, t in enumerate(universe)}

    def union(a, b):
        ca, cb = cls[a], cls[b]
        if ca == cb:
            return False
        for t in cls:
            if cls[t] == cb:
                cls[t] = ca
        return True

    for a, b in eqs:
        union(a, b)
    apps = [t for t in universe if type(t) is App and t.args]
    changed = True
    while changed:
        changed = False
        for a, b in combinations(apps, 2):
            if (cls[a] != cls[b] and a.name == b.name and len(a.args) == len(b.args)
                    and all(cls[x] == cls[y] for x, y in zip(a.args, b.args))):
                changed |= union(a, b)
    return cls[u] == cls[v]


# -- unification over rational trees by union-find ---------------------------------------

class _RationalUnifier:
    def __init__(self):
        self.parent: Dict[Term, Term] = {}

    def find(self, t: Term) -> Term:
        self.parent.setdefault(t, t)
        while self.parent[t] != t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def unify(self, a: Term, b: Term) -> bool:
        todo = [(a, b)]
        while todo:
            x, y = todo.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if type(rx) is Var:
                self.parent[rx] = ry
            elif type(ry) is Var:
                self.parent[ry] = rx
            else:
                if rx.name != ry.name or len(rx.args) != len(ry.args):
                    return False
                self.parent[rx] = ry
                todo.extend(zip(rx.args, ry.args))
        return True


def rationally_unifiable(a: Term, b: Term) -> bool:
    return _RationalUnifier().unify(a, b)


def _implied(eqs: Sequence[Tuple[Term, Term]], a: Term, b: Term) -> bool:
    """a = b holds in every rational solution of eqs (vacuously if none)."""
    u = _RationalUnifier()
    for x, y in eqs:
        if not u.unify(x, y):
            return True
    return _bisimilar(u, a, b)


def _bisimilar(u: _RationalUnifier, a: Term, b: Term) -> bool:
    """Equality of the rational trees denoted by a and b.

    A class keeps a variable as root only while it has no application
    member, so such classes stand for distinct unconstrained atoms.
    """
    seen = set()
    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        nx, ny = u.find(x), u.find(y)
        if nx == ny or (nx, ny) in seen:
            continue
        seen.add((nx, ny))
        if type(nx) is Var or type(ny) is Var:
            return False
        if nx.name != ny.name or len(nx.args) != len(ny.args):
            return False
        todo.extend(zip(nx.args, ny.args))
    return True


# -- decreasingness by enumeration ----------------------------------------------------------

def decreasing_by_enumeration(I, J, i, j, ctx) -> bool:
    top = max(i, j)

    def side(seq, mine, other):
        n = len(seq)
        for a in range(n + 1):
            if not all(e < mine for e in seq[:a]):
                continue
            rest = seq[a:]
            if all(e < top for e in rest):
                return True
            if rest and rest[0] == other and all(e < top for e in rest[1:]):
                return True
        return False

    if ctx and any(e >= i for e in list(I) + list(J)):
        return False
    return side(list(I), i, j) and side(list(J), j, i)


# -- the checker -----------------------------------------------------------------------------

def _replay(start: Term, steps, trs: Trs, terms) -> Term:
    cur = start
    for st in steps:
        if terms(st["from"]) != cur:
            raise Rejected(f"step starts from {st['from']}, expected {cur}")
        rule = trs.rules[st["rule"] - 1]
        pos = parse_position(st["position"])
        s: Dict[str, Term] = {}
        if not _match(rule.lhs, _sub(cur, pos), s):
            raise Rejected(f"rule {st['rule']} does not apply to {cur} at {st['position']}")
        nxt = _put(cur, pos, _inst(rule.rhs, s))
        if terms(st["to"]) != nxt:
            raise Rejected(f"step result {st['to']} differs from {nxt}")
        if "index" in st and st["index"] != rule.index:
            raise Rejected(f"step label index {st['index']} is not the index of rule {st['rule']}")
        cur = nxt
    return cur


def _variant(a: Rule, b: Rule) -> bool:
    s: Dict[str, Term] = {}
    t: Dict[str, Term] = {}
    pa, pb = App("#", (a.lhs, a.rhs)), App("#", (b.lhs, b.rhs))
    return (a.index == b.index and _match(pa, pb, s) and _match(pb, pa, t)
            and all(type(x) is Var for x in s.values()))


def _inert(trs: Trs) -> set:
    if any(type(r.rhs) is Var for r in trs.rules):
        return set()
    heads = {r.lhs.name for r in trs.rules} | {r.rhs.name for r in trs.rules}
    return set(trs.signature) - heads


def _frozen(trs: Trs) -> set:
    return set(trs.signature) - {r.lhs.name for r in trs.rules}


def _clash(v: Term, w: Term, frozen: set) -> bool:
    if type(v) is not App or type(w) is not App or v.name not in frozen or w.name not in frozen:
        return False
    if v.name != w.name or len(v.args) != len(w.args):
        return True
    return any(_clash(a, b, frozen) for a, b in zip(v.args, w.args))


def _closure(t: Term, trs: Trs, limit: int) -> Optional[set]:
    seen = {t}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for v in _successors(u, trs):
            if v not in seen:
                if len(seen) >= limit:
                    return None
                seen.add(v)
                queue.append(v)
    return seen


def _check_pair(p: Dict, trs: Trs) -> None:
    vs = p["variables"]
    term = lambda s: parse_term(s, vs)   # noqa: E731
    outer = _rule(p["outer_rule"], vs)
    inner = _rule(p["inner_rule"], vs)
    if not _variant(outer, trs.rules[p["outer"] - 1]) or not _variant(inner, trs.rules[p["inner"] - 1]):
        raise Rejected(f"pair {p['id']}: rules are not renamings of the system's rules")
    if _vars(outer.lhs) & _vars(inner.lhs):
        raise Rejected(f"pair {p['id']}: rules share variables")
    pos = parse_position(p["position"])
    eta = {x: term(u) for x, u in p["unifier"]["eta"].items()}
    rs = [(Var(y), term(v)) for y, v in p["unifier"]["rs"]]
    ys = {y.name for y, _ in rs}
    if len(ys) != len(rs):
        raise Rejected(f"pair {p['id']}: repeated cyclic variable")
    pv = _vars(outer.lhs) | _vars(inner.lhs)
    ran = set().union(*(_vars(u) for u in eta.values())) if eta else set()
    if not set(eta) <= pv - ys or ran & ys or ran & set(eta):
        raise Rejected(f"pair {p['id']}: unifier violates the domain and range conditions")
    problem = [(_sub(outer.lhs, pos), inner.lhs)]
    r_eta = [(y, _inst(v, eta)) for y, v in rs]
    for a, b in problem:
        if not naive_congruent(_inst(a, eta), _inst(b, eta), r_eta):
            raise Rejected(f"pair {p['id']}: {a} and {b} not congruent under the recorded unifier")
    # the unifier must be most general: each of its equations holds in every solution
    for x, u in list(eta.items()) + [(y.name, v) for y, v in rs]:
        if not _implied(problem, Var(x), u):
            raise Rejected(f"pair {p['id']}: {x}={u} is not implied by the overlap")
    pk = p["peak"]
    if term(pk["left"]) != _inst(outer.rhs, eta):
        raise Rejected(f"pair {p['id']}: left side is not rη")
    if term(pk["right"]) != _inst(_put(outer.lhs, pos, inner.rhs), eta):
        raise Rejected(f"pair {p['id']}: right side is not l[d]η")
    ctx = bool(_vars(_put(outer.lhs, pos, App("□", ()))))
    if pk["context_has_vars"] != ctx or pk["i"] != outer.index or pk["j"] != inner.index:
        raise Rejected(f"pair {p['id']}: peak labels misrecorded")
    ev = p["evidence"]
    kind = ev["kind"]
    if kind == "diagram":
        s = _replay(term(pk["left"]), ev["left_steps"], trs, term)
        t = _replay(term(pk["right"]), ev["right_steps"], trs, term)
        if s != term(ev["s"]) or t != term(ev["t"]):
            raise Rejected(f"pair {p['id']}: diagram ends differ from the recorded s and t")
        I = [trs.rules[st["rule"] - 1].index for st in ev["left_steps"]]
        J = [trs.rules[st["rule"] - 1].index for st in ev["right_steps"]]
        if I != ev["I"] or J != ev["J"]:
            raise Rejected(f"pair {p['id']}: index sequences misrecorded")
        if not decreasing_by_enumeration(I, J, outer.index, inner.index, ctx):
            raise Rejected(f"pair {p['id']}: diagram is not decreasing")
        if not naive_congruent(s, t, r_eta):
            raise Rejected(f"pair {p['id']}: {s} and {t} are not congruent modulo the cyclic rules")
    elif kind == "unrealizable":
        y, v = ev["rule"]
        v = term(v)
        if (Var(y), v) not in rs:
            raise Rejected(f"pair {p['id']}: unrealizability cites a rule not in R_S")
        path = parse_position(ev["path"])
        if _sub(v, path) != Var(y) or not path:
            raise Rejected(f"pair {p['id']}: path does not lead to {y}")
        inert = _inert(trs)
        cur = v
        for i in path:
            if cur.name not in inert:
                raise Rejected(f"pair {p['id']}: {cur.name} is not inert")
            cur = cur.args[i - 1]
    elif kind == "witness":
        _check_witness(ev["witness"], trs, term, p["id"])
    else:
        raise Rejected(f"pair {p['id']}: status {kind} carries no evidence")


def _rule(text: str, vs) -> Rule:
    lhs, rest = text.split(" ->", 1)
    idx, rhs = rest.split(" ", 1)
    return Rule(parse_term(lhs, vs), parse_term(rhs, vs), int(idx or 1))


def _check_witness(w: Dict, trs: Trs, term, ident) -> None:
    top = term(w["top"])
    v = _replay(top, w["left_steps"], trs, term)
    u = _replay(top, w["right_steps"], trs, term)
    if v != term(w["v"]) or u != term(w["w"]):
        raise Rejected(f"witness {ident}: derivations do not end in the recorded terms")
    if _clash(v, u, _frozen(trs)):
        return
    rv = _closure(v, trs, 200000)
    ru = _closure(u, trs, 200000)
    if rv is None or ru is None:
        raise Rejected(f"witness {ident}: reachable sets could not be exhausted")
    if rv & ru:
        raise Rejected(f"witness {ident}: {v} and {u} are joinable")


def check_report(report: Dict, allow_assumptions: bool = False) -> List[str]:
    """Problems found in ``report``; an empty list means it re-checks."""
    problems: List[str] = []
    try:
        trs = parse_trs(report["trs"])
    except Exception as e:      # a report with an unreadable system cannot be trusted
        return [f"cannot parse embedded system: {e}"]
    verdict = report["verdict"]
    pairs = report["pairs"]
    if verdict == "NON-CONFLUENT":
        ok = False
        for p in pairs:
            if p["evidence"]["kind"] != "witness":
                continue
            try:
                _check_witness(p["evidence"]["witness"], trs, lambda s, vs=p["variables"]: parse_term(s, vs), p["id"])
                ok = True
            except Rejected as e:
                problems.append(str(e))
        if not ok:
            problems.append("no valid non-confluence witness")
        return problems
    if verdict != "CONFLUENT":
        return problems
    from .layering import check_dlo, check_rank_nonincreasing
    if not check_dlo(trs).layered:
        problems.append("system is not layered")
        return problems
    if report["rank_check"]["assumed"]:
        if not allow_assumptions:
            problems.append("rank non-increase was assumed, not established")
    elif not check_rank_nonincreasing(trs).ok:
        problems.append("rank check fails")
    # coverage: every rationally unifiable overlap must be listed
    listed = {(p["outer"], parse_position(p["position"]), p["inner"]) for p in pairs}
    for k, r in enumerate(trs.rules):
        for pos in _fpos(r.lhs):
            for m, g in enumerate(trs.rules):
                if not pos and m <= k:
                    continue
                ren = {x: Var(x + "'" * 8) for x in _vars(g.lhs)}
                if rationally_unifiable(_sub(r.lhs, pos), _inst(g.lhs, ren)) and (k + 1, pos, m + 1) not in listed:
                    problems.append(f"overlap of rule {m + 1} into rule {k + 1} at {pos} is not listed")
    for p in pairs:
        if p["evidence"]["kind"] not in ("diagram", "unrealizable"):
            problems.append(f"pair {p['id']} is not closed")
            continue
        try:
            _check_pair(p, trs)
        except Rejected as e:
            problems.append(str(e))
    return problems
