import pytest

from gen import seeded, term
from layerconf.terms import (App, InvalidPosition, Var, apply, below, compose, const, depth, disjoint,
                             format_position, fpos, fun, is_ground, is_instance, is_linear, linearize,
                             match, maximal, parse_position, positions, replace_at, set_geq, size,
                             subterm_at, variables)
from layerconf.trs import parse_term

x, y = Var("x"), Var("y")
a, b = const("a"), const("b")


def t(s):
    return parse_term(s, ["x", "y", "z"])


def test_size_depth_variables():
    u = t("f(x,c(y))")
    assert size(u) == 4
    assert depth(u) == 3
    assert variables(u) == {"x", "y"}
    assert not is_ground(u) and is_ground(t("f(a,b)"))


def test_positions():
    u = t("f(x,c(x))")
    assert positions(u) == [(), (1,), (2,), (2, 1)]
    assert fpos(u) == [(), (2,)]
    assert subterm_at(u, (2, 1)) == x
    assert replace_at(u, (2,), b) == t("f(x,b)")
    with pytest.raises(InvalidPosition):
        subterm_at(u, (3,))


def test_position_order():
    assert below((1, 2), (1,)) and not below((1,), (1,))
    assert disjoint((1,), (2, 1)) and not disjoint((1,), (1, 1))
    assert maximal([(1,), (1, 2), (2,)]) == [(1, 2), (2,)]
    assert set_geq([(1, 2)], [(1,)]) and set_geq([(1,)], [(1,)])
    assert not set_geq([(1,)], [(1,)], strict=True)
    assert set_geq([(1, 2)], [(1,)], strict=True)


def test_position_text_round_trip():
    for p in [(), (1,), (2, 1, 3)]:
        assert parse_position(format_position(p)) == p
    with pytest.raises(InvalidPosition):
        parse_position("1.0")


def test_substitution_apply_compose():
    s = {"x": fun("c", y)}
    tau = {"y": a}
    u = t("f(x,y)")
    assert apply(apply(u, s), tau) == apply(u, compose(s, tau))


def test_linearize():
    lin = linearize(t("f(x,c(x))"))
    assert lin.term == App("f", (Var("x^1"), App("c", (Var("x^2"),))))
    assert lin.erase() == t("f(x,c(x))")
    assert is_linear(lin.term) and not is_linear(t("f(x,x)"))
    assert linearize(t("f(x,y)")).term == t("f(x,y)")
    salted = linearize(t("f(x,y)"), "s").term
    assert variables(salted) == {"x^1@s", "y^1@s"}


def test_match_treats_subject_variables_as_constants():
    assert match(t("f(x,x)"), t("f(y,y)")) == {"x": y}
    assert match(t("f(x,x)"), t("f(a,b)")) is None
    assert match(t("c(a)"), x) is None
    assert is_instance(t("f(a,a)"), t("f(x,x)"))
    assert not is_instance(t("f(x,x)"), t("f(a,y)"))


def test_match_property():
    rng = seeded(1)
    for _ in range(300):
        p = term(rng, 6)
        sigma = {v: term(rng, 4) for v in variables(p)}
        s = apply(p, sigma)
        m = match(p, s)
        assert m is not None and apply(p, m) == s


def test_terms_are_hashable_values():
    assert hash(t("f(x,c(a))")) == hash(t("f(x,c(a))"))
    assert {t("c(a)"): 1}[fun("c", a)] == 1
    assert str(t("f(x,c(a))")) == "f(x,c(a))"
