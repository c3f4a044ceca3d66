import pytest
from hypothesis import settings

from g2flow import make_bryant_salamon, make_linear_example

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def bs():
    return make_bryant_salamon()


@pytest.fixture(scope="session")
def lin():
    return make_linear_example(1.0)


ACCEPTANCE_TITLES = {
    "01": "curvature routes agree exactly on rational data",
    "02": "flat connections have exactly zero curvature",
    "03": "one-parameter family matches its closed form",
    "04": "zero-limit member matches its closed form",
    "05": "boundary linearization spectra",
    "06": "profile ODE residuals below 1e-8 on both structures",
    "07": "proven-region trajectories stay in the unit square to t=50",
    "08": "series boundary coefficients vs numerical differentiation",
    "09": "rescaled concentrating profiles approach the model bubble",
    "10": "members approach the zero-limit member at rate 1/x1",
    "11": "linear example closed forms",
    "12": "abelian decay exponents 2 and -4",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    seen = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_" not in nodeid:
                continue
            num = nodeid.split("::test_")[1][:2]
            if num in ACCEPTANCE_TITLES:
                seen[num] = status
    if not seen:
        return
    tw = terminalreporter
    tw.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_TITLES):
        if num not in seen:
            continue
        verdict = "PASS" if seen[num] == "passed" else "FAIL"
        tw.write_line("%s %s %s" % (verdict, num, ACCEPTANCE_TITLES[num]))
