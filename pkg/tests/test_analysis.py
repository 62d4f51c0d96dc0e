import glob
import os
from itertools import product

import pytest

from conftest import CORPUS, NKH
from gen import seeded
from layerconf.analysis import (CONFLUENT, MAYBE, NON_CONFLUENT, AnalysisConfig, DiagramEvidence,
                                DiagramFailure, analyze, check_decreasing, cyclic_critical_pairs,
                                find_diagram, inert_symbols, unrealizability)
from layerconf.cyclic import congruent
from layerconf.layering import Ranker
from layerconf.report import render_json, render_text
from layerconf.trs import load_trs, parse_term, parse_trs


# -- decreasingness -------------------------------------------------------------------

def _side(seq, mine, other):
    """Brute force: seq = alpha + facing? + delta."""
    top = max(mine, other)
    for a in range(len(seq) + 1):
        for f in (0, 1):
            alpha, facing, delta = seq[:a], seq[a:a + f], seq[a + f:]
            if len(facing) < f:
                continue
            if all(e < mine for e in alpha) and all(e == other for e in facing) \
                    and all(e < mine or e < other for e in delta):
                return True
    return False


def _oracle(I, J, i, j, ctx):
    if ctx and any(e >= i for e in I + J):
        return False
    return _side(I, i, j) and _side(J, j, i)


def _sequences(n, alphabet=range(4)):
    for k in range(n + 1):
        yield from (list(s) for s in product(alphabet, repeat=k))


def test_decreasing_examples():
    assert check_decreasing([1], [1], 2, 2, False)
    assert check_decreasing([1, 1, 2], [], 2, 3, False)
    assert not check_decreasing([2], [], 2, 1, True)
    assert check_decreasing([], [2, 1], 2, 3, False)
    assert not check_decreasing([3], [], 2, 2, False)


def test_decreasing_matches_brute_force_on_one_side():
    seqs = list(_sequences(5))
    for I in seqs:
        for i, j, ctx in product(range(4), range(4), (False, True)):
            assert check_decreasing(I, [], i, j, ctx) == _oracle(I, [], i, j, ctx), (I, i, j, ctx)
            assert check_decreasing([], I, i, j, ctx) == _oracle([], I, i, j, ctx), (I, i, j, ctx)


def test_decreasing_matches_brute_force_on_pairs():
    rng = seeded(51)
    seqs = list(_sequences(5))
    for _ in range(20000):
        I, J = rng.choice(seqs), rng.choice(seqs)
        i, j, ctx = rng.randrange(4), rng.randrange(4), rng.random() < 0.5
        assert check_decreasing(I, J, i, j, ctx) == _oracle(I, J, i, j, ctx), (I, J, i, j, ctx)


# -- critical pairs and diagrams ---------------------------------------------------------

def test_nkh_has_one_cyclic_pair_and_no_diagram(corpus):
    peaks = cyclic_critical_pairs(NKH)
    assert len(peaks) == 1
    pk = peaks[0]
    assert (pk.left, pk.right) == (parse_term("a"), parse_term("b"))
    d = find_diagram(pk, NKH, AnalysisConfig(), Ranker(NKH))
    assert isinstance(d, DiagramFailure)


def test_indexed_diagrams(corpus):
    trs = corpus("indexed")
    peaks = cyclic_critical_pairs(trs)
    assert len(peaks) == 3
    ranker = Ranker(trs)
    for pk in peaks:
        d = find_diagram(pk, trs, AnalysisConfig(), ranker)
        assert isinstance(d, DiagramEvidence)
        assert check_decreasing(d.I, d.J, pk.i, pk.j, pk.context_has_vars)
        assert congruent(d.s, d.t, d.equations)
        cur = pk.left
        for st in d.left_steps:
            assert st.source == cur and st.rank == ranker(st.source)
            cur = st.result
        assert cur == d.s
    first = find_diagram(peaks[0], trs, AnalysisConfig(), ranker)
    assert (first.I, first.J) == ([1], [1])
    assert (str(first.s), str(first.t)) == ("e(x)", "e(c(x'))")


def test_identical_sides_give_an_empty_diagram():
    trs = parse_trs("(VAR x) (RULES f(x) -> a f(x) -> a)")
    pk = cyclic_critical_pairs(trs)[0]
    d = find_diagram(pk, trs)
    assert isinstance(d, DiagramEvidence) and d.I == [] and d.J == []


def test_context_variables_bound_both_sides_by_the_outer_index():
    # the right side needs a step of index 2, which is not below i = 1
    trs = parse_trs("(VAR x) (RULES h(f(x)) ->1 a(x) f(x) ->3 g(x) h(g(x)) ->2 a(x))")
    pk = next(p for p in cyclic_critical_pairs(trs) if p.position == (1,))
    assert not pk.context_has_vars
    d = find_diagram(pk, trs)
    assert isinstance(d, DiagramEvidence)
    trs = parse_trs("(VAR x y) (RULES h(f(x),y) ->1 a(x) f(x) ->3 g(x) h(g(x),y) ->2 a(x))")
    pk = next(p for p in cyclic_critical_pairs(trs) if p.position == (1,))
    assert pk.context_has_vars
    assert isinstance(find_diagram(pk, trs), DiagramFailure)


# -- realizability ---------------------------------------------------------------------

def test_inert_symbols():
    nkhd = parse_trs("(VAR x) (RULES f(x,x) -> a f(x,c(x)) -> b g -> d(g))")
    assert inert_symbols(nkhd) == {"c"}
    assert inert_symbols(NKH) == set()
    collapsing = parse_trs("(VAR x) (RULES f(x,x) -> a f(x,c(x)) -> b k(x) -> x)")
    assert inert_symbols(collapsing) == set()
    un = unrealizability(cyclic_critical_pairs(nkhd)[0], nkhd)
    assert un is not None and un.symbols == ("c",)


# -- verdicts --------------------------------------------------------------------------

@pytest.mark.parametrize("name,verdict", [
    ("nkh", NON_CONFLUENT), ("indexed", CONFLUENT), ("nkh_d", CONFLUENT), ("dxx", MAYBE),
    ("empty", CONFLUENT), ("nkh_no_g", CONFLUENT), ("nkh_joined", CONFLUENT), ("fib", MAYBE),
    ("not_layered", NON_CONFLUENT), ("choice", NON_CONFLUENT), ("diamond", CONFLUENT),
])
def test_verdicts(corpus, name, verdict):
    assert analyze(corpus(name)).verdict == verdict


def test_corpus_expectations():
    for f in glob.glob(os.path.join(CORPUS, "*.trs")):
        with open(f, encoding="utf-8") as fh:
            expected = fh.read().split("expected:")[1].split(")")[0].strip()
        assert analyze(load_trs(f)).verdict == expected, f


def test_dxx_reason_names_rule_2(corpus):
    a = analyze(corpus("dxx"))
    assert a.reason.startswith("rank check failed for rules 2")


def test_assumed_rank_is_flagged(corpus):
    a = analyze(corpus("nest"), AnalysisConfig(assume_rank_nonincreasing=True))
    assert a.verdict == CONFLUENT
    assert any("ASSUMED" in w for w in a.warnings)


def test_nkh_witness(corpus):
    a = analyze(corpus("nkh"))
    w = a.results[0].witness
    assert {str(w.v), str(w.w)} == {"a", "b"}
    assert "g" in str(w.top)


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(diagram_depth=0)
    with pytest.raises(NotImplementedError):
        AnalysisConfig(refined_joinability=True)


def test_reports_are_deterministic(corpus):
    for name in ("nkh", "indexed", "nkh_d"):
        trs = corpus(name)
        assert render_json(analyze(trs)) == render_json(analyze(corpus(name)))
        assert render_text(analyze(trs)) == render_text(analyze(trs))


def test_larger_bounds_never_flip_a_definite_verdict():
    small = AnalysisConfig(eq_depth=2, diagram_depth=2, realizer_depth=2, nf_depth=4, node_bound=500)
    large = AnalysisConfig(eq_depth=8, diagram_depth=10, realizer_depth=7, nf_depth=14)
    for f in sorted(glob.glob(os.path.join(CORPUS, "*.trs"))):
        trs = load_trs(f)
        a, b = analyze(trs, small).verdict, analyze(trs, large).verdict
        if a != MAYBE:
            assert a == b, f
