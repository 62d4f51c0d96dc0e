import os

import pytest

from layerconf.trs import load_trs, parse_trs

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir, "corpus")


@pytest.fixture
def corpus():
    def load(name):
        return load_trs(os.path.join(CORPUS, name + ".trs"))
    return load


NKH = parse_trs("(VAR x) (RULES f(x,x) -> a f(x,c(x)) -> b g -> c(g))")


# -- acceptance summary: one line per criterion ------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    ok = call.excinfo is None
    if call.when == "call" or not ok:
        prev = _CRITERIA.get(n, (text, True))[1]
        _CRITERIA[n] = (text, prev and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        text, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
