import warnings

import pytest

from isomass.errors import QuadratureWarning

# (criterion number, passed, detail) filled in by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(autouse=True)
def _quiet_quadrature():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureWarning)
        yield


@pytest.fixture
def record():
    def log(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
