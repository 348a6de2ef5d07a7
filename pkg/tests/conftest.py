from __future__ import annotations

import pytest

from evlogic.goldens import corpus_path
from evlogic.model import Kind, Literal, PropVar, Theory, TimeLabel
from evlogic.parser import parse_file, parse_theory


def lit(name: str, positive: bool = True, kind: Kind = Kind.SIMPLE) -> Literal:
    return Literal(PropVar(name, kind), positive)


def dlit(name: str, positive: bool = True) -> Literal:
    return lit(name, positive, Kind.DERIVED)


def times(*names: str) -> list[TimeLabel]:
    return [TimeLabel(n, i) for i, n in enumerate(names)]


def theory_of(*formulas, time_names=("t1", "t2")) -> Theory:
    """A theory holding exactly `formulas`, alphabets filled in loosely."""
    return Theory(agents=set(), times=times(*time_names), formulas=set(formulas))


def parse(body: str, agents="a1, a2, a3", time_names="t1, t2") -> Theory:
    return parse_theory(f"agents {agents}; times {time_names};\n{body}")


@pytest.fixture(scope="session")
def dnc() -> Theory:
    return parse_file(corpus_path("dnc.el"))


@pytest.fixture(scope="session")
def attribution() -> Theory:
    return parse_file(corpus_path("attribution.el"))


# Acceptance criteria get one PASS/FAIL line each at the end of the run.
_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    from tests.test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, label in CRITERIA.items():
        status = _criteria.get(name, "NOT RUN")
        terminalreporter.write_line(f"{status}  {label}")
