import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qswap.channels import make_channel

SWEEP_C = (0.2811, 0.3790)
SWEEP_D = (0.3220, 0.2064)


def sweep_channel(c0=0.5, d0=0.5):
    c3 = math.sqrt(1 - c0**2 - sum(v * v for v in SWEEP_C))
    d4 = math.sqrt(1 - d0**2 - sum(v * v for v in SWEEP_D))
    return make_channel(4, 5, [c0, *SWEEP_C, c3], [d0, *SWEEP_D, 0.0, d4])


def _unit(raw, mask):
    v = np.array([0.0 if z else x for x, z in zip(raw, mask)])
    if not np.any(v > 0):
        v[int(np.argmax(raw))] = max(raw)
    return v / np.linalg.norm(v)


@st.composite
def channels(draw, dims_a=(2, 3, 4), dim_b_max=5):
    """Random normalized channel pairs, some coefficients exactly zero."""
    a = draw(st.sampled_from(dims_a))
    b = draw(st.integers(a, dim_b_max))
    coeff = st.floats(0.05, 1.0, allow_nan=False)
    c = _unit(draw(st.lists(coeff, min_size=a, max_size=a)), draw(st.lists(st.booleans(), min_size=a, max_size=a)))
    d = _unit(draw(st.lists(coeff, min_size=b, max_size=b)), draw(st.lists(st.booleans(), min_size=b, max_size=b)))
    return make_channel(a, b, c, d)


@st.composite
def gamma_profiles(draw, max_dim=6):
    """Normalized nonnegative fiducial vectors, possibly with zeros and ties."""
    n = draw(st.integers(2, max_dim))
    pool = draw(st.lists(st.floats(0.05, 1.0, allow_nan=False), min_size=1, max_size=3))
    raw = [draw(st.sampled_from(pool + [0.0])) for _ in range(n)]
    if not any(raw):
        raw[0] = pool[0]
    v = np.array(raw)
    return v / np.linalg.norm(v)


# -- acceptance summary ---------------------------------------------------------

_criteria: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marks = getattr(report, "criterion", None)
    if marks is not None:
        _criteria.setdefault(marks, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(_criteria[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(_criteria[n])} checks)")
