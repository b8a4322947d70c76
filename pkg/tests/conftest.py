import pytest

from patricia_lab import rng
from patricia_lab.bitstreams import sample_string


@pytest.fixture
def sample():
    """sample(spec, n, seed=0) -> n strings with ids 0..n-1."""
    def _sample(spec, n, seed=0):
        return [sample_string(spec, rng.derive_key(seed, j), j) for j in range(n)]
    return _sample


def find_key(spec, predicate, start=0, limit=100_000):
    for key in range(start, start + limit):
        s = sample_string(spec, key)
        if predicate(s):
            return key, s
    raise AssertionError("no key found")


CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
