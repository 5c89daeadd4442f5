import pytest

from xcomkit.samples import EVEN_LIST, UNKNOWN_TYPE
from xcomkit.syntax import parse_program


@pytest.fixture
def even_list():
    return parse_program(EVEN_LIST)


@pytest.fixture
def unknown_type():
    return parse_program(UNKNOWN_TYPE)


# one summary line per acceptance criterion, whatever the verbosity
_criteria: dict[int, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rpartition("::")[2]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        number = int(name.split("_")[2])
        if report.when == "call" or report.failed:
            _criteria[number] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_criteria):
            terminalreporter.write_line(f"criterion {number}: {_criteria[number]}")
