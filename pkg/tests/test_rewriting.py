from conftest import NKH
from layerconf.rewriting import NoMatch, is_normal, normal_forms, one_step, reach, rewrite_step
from layerconf.trs import parse_term, parse_trs
import pytest


def test_rewrite_step():
    r = NKH.rules[1]
    assert rewrite_step(parse_term("h(f(a,c(a)))"), r, (1,)) == parse_term("h(b)")
    with pytest.raises(NoMatch):
        rewrite_step(parse_term("f(a,a)"), r, ())


def test_one_step_and_normal():
    succ = {st.result for st in one_step(parse_term("f(g,g)"), NKH)}
    assert succ == {parse_term("a"), parse_term("f(c(g),g)"), parse_term("f(g,c(g))")}
    assert is_normal(parse_term("a"), NKH)


def test_reach_derivation_replays():
    rc = reach(parse_term("f(g,g)"), NKH, depth_bound=3)
    assert not rc.complete
    assert parse_term("b") in rc
    cur = rc.start
    for st in rc.derivation(parse_term("b")):
        assert st.source == cur
        cur = st.result
    assert cur == parse_term("b")


def test_normal_forms():
    trs = parse_trs("(RULES a -> b a -> c b -> d)")
    nfs, complete = normal_forms(parse_term("a"), trs)
    assert complete and nfs == {parse_term("c"), parse_term("d")}
    nfs, complete = normal_forms(parse_term("g"), NKH, depth_bound=6)
    assert nfs == frozenset() and not complete
