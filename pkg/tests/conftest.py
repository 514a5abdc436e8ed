import pytest
from hypothesis import settings

from needlab.syntax import I, OMEGA
from needlab.typesys import ANS, abs_, app, ax, val

# first calls warm caches, so per-example deadlines only produce noise
settings.register_profile("needlab", deadline=None, max_examples=100)
settings.load_profile("needlab")


@pytest.fixture
def phi_k():
    """|- \\x.\\y.x : [a] -> [] -> a"""
    return abs_("x", abs_("y", ax("x", ANS)))


@pytest.fixture
def phi_kio(phi_k):
    """|- K I Omega : a, with Omega untyped."""
    return app(app(phi_k, I, [val(I)]), OMEGA, [])


# ---------------------------------------------------------------------------
# acceptance report: one line per criterion at the end of the run

_RESULTS = {}
_NOTES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or rep.failed:
        prev = _RESULTS.get(n, (title, True))
        _RESULTS[n] = (title, prev[1] and rep.passed)


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the current test's criterion."""
    mark = request.node.get_closest_marker("criterion")

    def add(text):
        _NOTES.setdefault(mark.args[0], []).append(text)
    return add


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok = _RESULTS[n]
        extra = "; ".join(_NOTES.get(n, []))
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{extra}]" if extra else ""))
