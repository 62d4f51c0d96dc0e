import pytest

from conftest import NKH
from gen import ground, seeded, system
from layerconf.layering import (NotLayered, Ranker, check_dlo, check_rank_nonincreasing, ground_terms,
                                is_of, is_overlay, is_sof, rank, rank_probe)
from layerconf.rewriting import one_step
from layerconf.terms import App, Var, apply, linearize, variables
from layerconf.trs import parse_term, parse_trs

LNO = parse_trs("(VAR x y) (RULES h(f(x,y)) -> a f(x,c(x)) -> b)")
L3 = parse_trs("(VAR x) (RULES h(f(x,x)) -> a f(x,c(x)) -> b g -> c(g))")
NL = parse_trs("(VAR x) (RULES f(h(x)) -> x h(a) -> a a -> b)")
FIB = parse_trs("(VAR x) (RULES fib(0) -> 0 fib(S(0)) -> S(0) fib(S(S(x))) -> plus(fib(S(x)),fib(x)))")


def test_layeredness_table():
    nkh = check_dlo(NKH)
    assert nkh.layered and nkh.overlay
    lno = check_dlo(LNO)
    assert lno.layered and not lno.overlay
    assert check_dlo(L3).layered
    nl = check_dlo(NL)
    assert not nl.layered
    assert any(v.predicate == "SOF(h(a))" for v in nl.violations)
    assert nl.violations[0].describe(NL) == "rule 1 at 1 overlapped by rule 2: SOF(h(a)) fails"


def test_of_and_sof():
    assert is_of(parse_term("c(y)", ["y"]), NKH)
    assert not is_of(parse_term("f(y,y)", ["y"]), NKH)
    assert is_sof(parse_term("f(x,c(x))", ["x"]), NKH)
    assert not is_sof(parse_term("h(a)"), NL)


def test_overlay():
    assert is_overlay(NKH)
    assert not is_overlay(LNO)


def test_rank_values():
    assert rank(parse_term("f(c(g),c(g))"), NKH) == 2
    assert rank(parse_term("f(g,g)"), NKH) == 2
    assert rank(parse_term("g"), NKH) == 1
    assert rank(parse_term("a"), NKH) == 0
    assert rank(parse_term("c(c(a))"), NKH) == 0


def test_rank_requires_layered():
    with pytest.raises(NotLayered):
        Ranker(NL)


def _layered_systems(rng, n):
    out = [NKH, LNO, L3, FIB]
    while len(out) < n:
        trs = system(rng, rng.randint(1, 3), 5, {"a": 0, "b": 0, "c": 1, "h": 1, "f": 2})
        if check_dlo(trs).layered:
            out.append(trs)
    return out


def test_rank_of_redex_is_one_plus_rank_of_substitution():
    rng = seeded(31)
    systems = _layered_systems(rng, 30)
    count = 0
    while count < 1000:
        trs = rng.choice(systems)
        ranker = Ranker(trs, check=False)
        rule = rng.choice(trs.rules)
        lbar = linearize(rule.lhs).term
        sig = dict(trs.signature)
        sig.setdefault("a", 0)
        sigma = {x: ground(rng, rng.randint(1, 6), sig) for x in variables(lbar)}
        t = apply(lbar, sigma)
        assert ranker(t) == 1 + max((ranker(u) for u in sigma.values()), default=0), (trs, t)
        count += 1


def test_rank_check_on_known_systems():
    assert check_rank_nonincreasing(NKH).ok
    dxx = parse_trs("(VAR x) (RULES d(x,x) -> 0 f(x) -> d(x,f(x)) c -> f(c))")
    assert 1 in check_rank_nonincreasing(dxx).failing_rules()
    assert not check_rank_nonincreasing(parse_trs("(VAR x) (RULES f(x) -> f(f(x)))")).ok


def test_rank_nonincrease_holds_on_systems_passing_the_check():
    rng = seeded(32)
    passing = 0
    attempts = 0
    while passing < 40:
        attempts += 1
        trs = system(rng, rng.randint(1, 3), 5, {"a": 0, "b": 0, "c": 1, "h": 1, "f": 2})
        if not check_dlo(trs).layered or not check_rank_nonincreasing(trs).ok:
            continue
        passing += 1
        probe = rank_probe(trs, depth=5, limit=3000, samples=1000, seed=passing)
        assert probe.ok, (trs, probe.violations[:1])
    assert attempts < 5000


def test_rank_nonincrease_exhaustively_at_small_depth():
    rng = seeded(33)
    sig = {"a": 0, "c": 1, "f": 2}
    checked = 0
    while checked < 15:
        trs = system(rng, rng.randint(1, 3), 4, sig)
        if not check_dlo(trs).layered or not check_rank_nonincreasing(trs).ok:
            continue
        probe = rank_probe(trs, depth=4, limit=10 ** 6)
        assert probe.exhaustive and probe.ok, (trs, probe.violations[:1])
        checked += 1


def test_fibonacci_fails_the_check_but_not_the_probe():
    rc = check_rank_nonincreasing(FIB)
    assert not rc.ok
    probe = rank_probe(FIB, depth=5)
    assert probe.ok and probe.steps > 0


def test_probe_finds_increase_when_there_is_one():
    probe = rank_probe(parse_trs("(VAR x) (RULES f(x) -> f(f(x)))"), depth=3)
    assert not probe.ok
    t, u, before, after = probe.violations[0]
    assert after > before


def test_ground_terms_counts():
    assert len(ground_terms({"a": 0, "c": 1, "f": 2}, 3, 10 ** 6)) == 13
    assert ground_terms({"a": 0, "f": 2}, 6, 100) is None
