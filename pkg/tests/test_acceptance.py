"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary ends
with one PASS/FAIL line per criterion.
"""
import glob
import json
import os
import time

import pytest

import test_analysis
import test_cyclic
import test_layering
import test_unification
from conftest import CORPUS
from layerconf.analysis import CONFLUENT, MAYBE, NON_CONFLUENT, analyze
from layerconf.cyclic import CyclicRewriteSystem, CyclicUnifier, instance_of, verify_cyclic_unifier
from layerconf.layering import check_dlo, check_rank_nonincreasing, rank, rank_probe
from layerconf.recheck import check_report
from layerconf.report import render_json
from layerconf.rewriting import normal_forms
from layerconf.trs import load_trs, parse_term, parse_trs
from layerconf.unification import problem, solve


def load(name):
    return load_trs(os.path.join(CORPUS, name + ".trs"))


def timed(trs):
    start = time.perf_counter()
    a = analyze(trs)
    return a, time.perf_counter() - start


@pytest.mark.criterion(1, "golden verdicts under default bounds, each below 1 s")
def test_golden_verdicts():
    a, dt = timed(load("nkh"))
    assert a.verdict == NON_CONFLUENT and dt < 1
    w = next(r.witness for r in a.results if r.witness is not None)
    assert {str(w.v), str(w.w)} == {"a", "b"}
    for side in (w.v, w.w):
        nfs, complete = normal_forms(side, a.trs)
        assert complete and nfs == {side}

    a, dt = timed(load("indexed"))
    assert a.verdict == CONFLUENT and dt < 1
    assert len(a.results) == 3 and all(r.status == "diagram" for r in a.results)

    a, dt = timed(parse_trs("(VAR x) (RULES f(x,x) -> a f(x,c(x)) -> b g -> d(g))"))
    assert a.verdict == CONFLUENT and dt < 1
    assert [r.status for r in a.results] == ["unrealizable"]
    assert json.loads(render_json(a))["pairs"][0]["evidence"]["criterion"] == "inert-symbol"

    a, dt = timed(parse_trs("(VAR x) (RULES d(x,x) -> 0 f(x) -> d(x,f(x)) c -> f(c))"))
    assert a.verdict == MAYBE and dt < 1
    assert a.reason.startswith("rank check failed") and 1 in a.rank_check.failing_rules()
    assert "rules 2" in a.reason


@pytest.mark.criterion(2, "layeredness table")
def test_layeredness_table():
    nkh = check_dlo(load("nkh"))
    assert nkh.layered and nkh.overlay
    lno = check_dlo(parse_trs("(VAR x y) (RULES h(f(x,y)) -> a f(x,c(x)) -> b)"))
    assert lno.layered and not lno.overlay
    assert check_dlo(parse_trs("(VAR x) (RULES h(f(x,x)) -> a f(x,c(x)) -> b g -> c(g))")).layered
    nl = check_dlo(parse_trs("(VAR x) (RULES f(h(x)) -> x h(a) -> a a -> b)"))
    assert not nl.layered
    assert any(v.predicate == "SOF(h(a))" for v in nl.violations)


@pytest.mark.criterion(3, "rank values and rank(l̄σ) = 1 + rk(σ) on 1000 redexes")
def test_rank_values():
    nkh = load("nkh")
    assert rank(parse_term("f(c(g),c(g))"), nkh) == 2
    assert rank(parse_term("g"), nkh) == 1
    assert rank(parse_term("a"), nkh) == 0
    test_layering.test_rank_of_redex_is_one_plus_rank_of_substitution()


@pytest.mark.criterion(4, "cyclic unification: NKH solved form and the two unifiers of f(x,z,z) = f(a,y,c(y))")
def test_cyclic_unification():
    t = lambda s: parse_term(s, ["x", "y", "z"])     # noqa: E731
    sf = solve(problem((t("f(x,x)"), t("f(y,c(y))"))))
    assert dict(sf.cyclic) == {"x": t("c(y)"), "y": t("c(y)")}
    assert sf.finite == () and sf.parameters == frozenset()

    p = problem((t("f(x,z,z)"), t("f(a,y,c(y))")))
    cu1 = CyclicUnifier({"x": t("a")}, CyclicRewriteSystem((("y", t("c(z)")), ("z", t("c(z)")))))
    cu2 = CyclicUnifier({"x": t("a")}, CyclicRewriteSystem((("z", t("c(y)")), ("y", t("c(y)")))))
    assert verify_cyclic_unifier(cu1, p).ok
    assert verify_cyclic_unifier(cu2, p).ok
    solution = CyclicUnifier({"x": t("a"), "y": t("a"), "z": t("c(a)")}, cu1.rs)
    assert instance_of(solution, cu1, ["x", "y", "z"]) == {"y": t("a"), "z": t("c(a)")}


@pytest.mark.criterion(5, "property suites, each at least 1000 cases, below 60 s in total")
def test_property_suites():
    start = time.perf_counter()
    test_unification.test_measure_decreases_on_every_rule_application()
    test_unification.test_solved_forms_satisfy_all_clauses()
    test_cyclic.test_congruence_matches_brute_force_closure()
    test_analysis.test_decreasing_matches_brute_force_on_one_side()
    test_analysis.test_decreasing_matches_brute_force_on_pairs()
    test_layering.test_rank_nonincrease_holds_on_systems_passing_the_check()
    test_layering.test_rank_nonincrease_exhaustively_at_small_depth()
    test_cyclic.test_unifiers_are_invariant_under_every_rule()
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(6, "every definite corpus verdict passes the independent re-checker")
def test_evidence_revalidation():
    files = sorted(glob.glob(os.path.join(CORPUS, "*.trs")))
    definite = 0
    for f in files:
        d = json.loads(render_json(analyze(load_trs(f))))
        if d["verdict"] in (CONFLUENT, NON_CONFLUENT):
            definite += 1
            assert check_report(d) == [], f
    assert definite > 0


@pytest.mark.criterion(7, "Fibonacci: the sufficient rank check fails, the depth-5 probe finds no increase")
def test_fibonacci_probe():
    fib = load("fib")
    assert not check_rank_nonincreasing(fib).ok
    probe = rank_probe(fib, depth=5)
    assert probe.ok and probe.terms >= 1000
