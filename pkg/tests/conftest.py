import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


def expm_amplitude(h, source, target, times):
    """Independent propagator: scipy matrix exponential per time point."""
    h = np.asarray(h)
    return np.array([expm(-1j * h * t)[target - 1, source - 1] for t in np.atleast_1d(times)])


def random_hermitian(rng, n, complex_=True):
    a = rng.normal(size=(n, n))
    if complex_:
        a = a + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _ACCEPTANCE:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}")
