import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from canodual.bundled import load_example
from canodual.problem import SolverConfig

settings.register_profile(
    "canodual", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("canodual")


@pytest.fixture(scope="session")
def examples():
    return {i: load_example(i) for i in (1, 2, 3, 4)}


@pytest.fixture(scope="session")
def ex1(examples):
    return examples[1]


@pytest.fixture(scope="session")
def ex2(examples):
    return examples[2]


@pytest.fixture(scope="session")
def ex3(examples):
    return examples[3]


@pytest.fixture(scope="session")
def ex4(examples):
    return examples[4]


@pytest.fixture(scope="session")
def reports(examples):
    from canodual.report import solve

    return {i: solve(p) for i, p in examples.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def cfg_for(p, **kw):
    return SolverConfig.for_problem(p, **kw)


# acceptance criteria report: test_acceptance records one line per criterion
ACCEPTANCE: dict = {}
_SESSION = {}


def pytest_sessionstart(session):
    import time

    _SESSION["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time

    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    elapsed = time.perf_counter() - _SESSION.get("start", time.perf_counter())
    tr.write_line(f"suite runtime: {elapsed:.1f} s (target < 60 s) {'PASS' if elapsed < 60 else 'FAIL'}")


@pytest.fixture
def acceptance(capsys):
    """record(k, ok, detail): store and echo a criterion result."""

    def record(k, ok, detail):
        ACCEPTANCE[k] = (bool(ok), detail)
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return record
