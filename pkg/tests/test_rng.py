from collections import Counter

import pytest

from patricia_lab import rng


def test_mix64_reference_value():
    # first output of SplitMix64 seeded with 0
    assert rng.mix64(0) == 0xE220A8397B1DCDAF


def test_draws_are_pure_functions_of_key_and_index():
    assert [rng.draw(5, i) for i in range(4)] == [rng.draw(5, i) for i in range(4)]
    assert rng.draw(5, 0) != rng.draw(6, 0)
    assert rng.derive_key(1, 2, 3) != rng.derive_key(1, 3, 2)


@pytest.mark.parametrize("upper", [1, 2, 3, 7, 4096])
def test_uniform_int_range(upper):
    vals = [rng.uniform_int(rng.derive_key(9, i), upper) for i in range(2000)]
    assert min(vals) >= 1 and max(vals) <= upper
    if upper <= 7:
        assert set(vals) == set(range(1, upper + 1))


def test_uniform_int_is_flat():
    counts = Counter(rng.uniform_int(rng.derive_key(3, i), 4) for i in range(40_000))
    for v in range(1, 5):
        # sd of each count is ~87
        assert abs(counts[v] - 10_000) < 4 * 87


def test_geometric_half_frequencies():
    n = 40_000
    counts = Counter(rng.geometric_half(rng.derive_key(11, i)) for i in range(n))
    for k in range(1, 6):
        p = 2.0 ** -k
        se = (p * (1 - p) / n) ** 0.5
        assert abs(counts[k] / n - p) < 4 * se
