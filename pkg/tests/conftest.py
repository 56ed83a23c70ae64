import pytest

from solarshare.pv import PVProfile, PVSample

_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)


def flat_profile(voltage=0.0, current=0.0, temperature=30.0):
    return PVProfile([PVSample(0.0, voltage, current, temperature)])


@pytest.fixture
def zero_pv():
    return flat_profile()
