import functools
import json
import time
from pathlib import Path

import pytest

from fracbessel.characteristic import find_roots
from fracbessel.equation import validate

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"


def load_spec(name: str):
    return validate(json.loads((SPECS_DIR / f"{name}.json").read_text()))


def make_spec(ds, alphas, beta, nu2):
    return validate({"terms": [{"d": d, "alpha": a} for d, a in zip(ds, alphas)], "beta": beta, "nu2": nu2})


@functools.lru_cache(maxsize=None)
def cached_roots(spec):
    """find_roots with the default window, memoized (specs are immutable)."""
    return tuple(find_roots(spec))


def valid_roots(spec):
    return [r for r in cached_roots(spec) if r.is_valid]


GOLDEN = [
    "example_2_1",
    "example_7_1",
    "example_7_2",
    "example_7_3",
    "example_7_4",
    "example_7_5",
    "example_7_6",
    "example_7_7",
    "example_7_8",
]


@pytest.fixture(scope="session")
def golden():
    return {name: load_spec(name) for name in GOLDEN}


_criteria: dict[int, list[str]] = {}
_SUITE_LIMIT = 60.0  # seconds, part of criterion 11
_started = [0.0]


def pytest_sessionstart(session):
    _started[0] = time.perf_counter()


def pytest_runtest_logreport(report):
    marker = "test_criterion_"
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith(marker):
        return
    number = int(name[len(marker):len(marker) + 2])
    _criteria.setdefault(number, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    elapsed = time.perf_counter() - _started[0]
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcomes = _criteria[number]
        ok = all(o == "passed" for o in outcomes)
        if number == 11:
            ok = ok and elapsed < _SUITE_LIMIT
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
    terminalreporter.write_line(f"suite time: {elapsed:.1f} s (limit {_SUITE_LIMIT:g} s)")
