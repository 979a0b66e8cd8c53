import numpy as np
import pytest
from hypothesis import strategies as st

from cotkit import DiscreteMeasure

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        prev = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}")


def random_measure(rng, n_max=8, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    return DiscreteMeasure.from_weights(rng.random(n), rng.exponential(size=n) + 1e-3)


@st.composite
def measures(draw, max_atoms=8):
    n = draw(st.integers(1, max_atoms))
    pos = draw(st.lists(st.floats(0, 1, exclude_max=True), min_size=n, max_size=n))
    w = draw(st.lists(st.floats(0.01, 10), min_size=n, max_size=n))
    return DiscreteMeasure.from_weights(pos, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
