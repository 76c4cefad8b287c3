import numpy as np
import pytest

from kaczrank.io import parse_comparisons

# Five observations on four items whose only consistent order is 1 > 2 > 3 > 0.
WORKED_EXAMPLE = """\
n=4
0,1
2,1
0,2
3,2
0,3
"""


@pytest.fixture
def worked_example():
    return parse_comparisons(WORKED_EXAMPLE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if not item.nodeid.split("::")[0].endswith("test_acceptance.py"):
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
        _criteria[item.name] = ("PASS" if report.passed else "FAIL", doc, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_criteria):
        status, doc, detail = _criteria[name]
        line = f"{status}  {doc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
