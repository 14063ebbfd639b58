import functools

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from toeplitz_dpii.opuc import szego_sequence
from toeplitz_dpii.symbolcore import SymbolParams, fourier_table
from toeplitz_dpii.toeplitz import determinant_sequence

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

REFERENCE_CASES = {
    1: ("3",),
    2: ("3", "1.2"),
    3: ("3", "1.2", "2.6"),
}


@functools.lru_cache(maxsize=None)
def numeric_chain(big_n, thetas, n_max, bits=256):
    """(params, table, determinants, opuc) for one parameter set, cached."""
    params = SymbolParams(big_n, thetas, bits)
    table = fourier_table(params, n_max)
    return params, table, determinant_sequence(table, n_max), szego_sequence(table, n_max)


@pytest.fixture(autouse=True)
def _default_precision():
    # tests compare against mpmath values; keep the ambient precision high
    with mpmath.workprec(320):
        yield


# -- one summary line per acceptance criterion ----------------------------------
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    k = dict(report.user_properties).get("criterion")
    if k is None:
        return
    ok, names = _CRITERIA.get(k, (True, []))
    _CRITERIA[k] = (ok and report.passed, names + [report.nodeid.split("::")[-1]])


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        record_property("criterion", marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, names = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({len(names)} checks)")
