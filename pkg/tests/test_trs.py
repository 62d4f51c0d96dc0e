import glob
import os

import pytest

from conftest import CORPUS
from layerconf.terms import App, Var
from layerconf.trs import (ArityConflict, IllFormedRule, Rule, TrsSyntaxError, format_trs, parse_term,
                           parse_trs)


def test_parse_indexed_rules():
    trs = parse_trs("(VAR x)\n(RULES\n  f(x,x) ->2 a(x,x)\n  g ->0 c(g)\n  b(x) -> e(x)\n)")
    assert [r.index for r in trs.rules] == [2, 0, 1]
    assert trs.rules[0].lhs == App("f", (Var("x"), Var("x")))
    assert trs.signature == {"f": 2, "a": 2, "g": 0, "c": 1, "b": 1, "e": 1}


def test_var_block_after_rules():
    trs = parse_trs("(RULES f(x) -> x) (VAR x)")
    assert trs.rules[0].rhs == Var("x")


def test_comment_is_free_text():
    trs = parse_trs("(COMMENT anything; even -> (nested) text)\n(RULES a -> b)")
    assert len(trs) == 1


def test_sig_block():
    trs = parse_trs("(SIG (f 1) (k 0)) (RULES f(a) -> a)")
    assert trs.signature["k"] == 0


def test_empty_rules():
    assert len(parse_trs("(RULES)")) == 0


@pytest.mark.parametrize("text,error,line,col", [
    ("(VAR x y)\n(RULES\n  f(x) -> y\n)", IllFormedRule, 3, 3),
    ("(VAR x)\n(RULES\n  x -> a\n)", IllFormedRule, 3, 3),
    ("(RULES\n  f(a) -> a\n  f(a,b) -> a\n)", ArityConflict, None, None),
    ("(RULES\n  f(a) -> a | a == b\n)", TrsSyntaxError, 2, 13),
    ("(STRATEGY INNERMOST)", TrsSyntaxError, 1, 2),
    ("(RULES\n  f(a) => a\n)", TrsSyntaxError, 2, 9),
    ("(RULES f(a -> a)", TrsSyntaxError, None, None),
    ("(FOO)", TrsSyntaxError, 1, 2),
])
def test_rejections_are_positioned(text, error, line, col):
    with pytest.raises(error) as info:
        parse_trs(text)
    if line is not None:
        assert (info.value.line, info.value.col) == (line, col)


def test_rule_validation():
    with pytest.raises(IllFormedRule):
        Rule(Var("x"), Var("x"))
    with pytest.raises(IllFormedRule):
        Rule(App("f", (Var("x"),)), Var("y"))
    assert str(Rule(App("g", ()), App("c", (App("g", ()),)), 0)) == "g ->0 c(g)"


def test_round_trip_on_corpus():
    files = glob.glob(os.path.join(CORPUS, "*.trs"))
    assert files
    for f in files:
        with open(f, encoding="utf-8") as fh:
            once = parse_trs(fh.read())
        twice = parse_trs(format_trs(once))
        assert twice.rules == once.rules
        assert format_trs(twice) == format_trs(once)


def test_parse_term_with_primes_and_digits():
    u = parse_term("d(x',0)", ["x'"])
    assert u == App("d", (Var("x'"), App("0", ())))
    with pytest.raises(TrsSyntaxError):
        parse_term("f(a))")


def test_undeclared_names_are_constants():
    trs = parse_trs("(VAR x) (RULES f(x) -> y)")
    assert trs.rules[0].rhs == App("y", ())


def test_stray_equals_sign():
    with pytest.raises(TrsSyntaxError):
        parse_trs("(RULES a = b)")
