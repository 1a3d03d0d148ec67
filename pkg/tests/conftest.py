import functools

import pytest

from pinwheel import generate_patch, histogram_from_patch


@functools.lru_cache(maxsize=None)
def patch_at(depth):
    return generate_patch(depth)


@functools.lru_cache(maxsize=None)
def hist_at(depth, r_max_sq, window, margin):
    return histogram_from_patch(patch_at(depth), r_max_sq, window=window, margin=margin)


@pytest.fixture(scope="session")
def patch():
    return patch_at


@pytest.fixture(scope="session")
def hist():
    return hist_at


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
