import math
import warnings

import pytest
from hypothesis import given, strategies as st

from patricia_lab.bounds import (
    BoundInputs,
    chernoff_enk_bound,
    devroye_tail,
    distinct_lower_bound,
    okamoto_bound,
    proportion_se,
    thm2_height_floor,
)


def test_chernoff_examples():
    assert chernoff_enk_bound(100, 3, 0.1) == pytest.approx(8 * math.exp(-5))
    assert chernoff_enk_bound(100, 3, 0.1) == pytest.approx(0.05390, abs=5e-6)
    assert chernoff_enk_bound(1000, 3, 0.2) == pytest.approx(2.98e-43, rel=1e-3)


def test_okamoto_examples():
    assert okamoto_bound(100, 10) == pytest.approx(0.006738, rel=1e-4)
    assert okamoto_bound(4096, 64) == pytest.approx(1.27e-14, rel=1e-2)


def test_okamoto_small_alpha_warns():
    with pytest.warns(UserWarning):
        v = okamoto_bound(10, 4)
    assert v == pytest.approx(math.exp(-10 / 8))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        okamoto_bound(10, 8)


def test_devroye_examples():
    assert devroye_tail(100, 0) == 1.0
    assert devroye_tail(2, 2) == pytest.approx(math.exp(-1))
    assert devroye_tail(64, 16) == pytest.approx(0.1353, abs=1e-4)


def test_distinct_lower_bound_examples():
    assert distinct_lower_bound(50, 100) == 49.875
    for N in (1, 7, 1000):
        assert distinct_lower_bound(N, N) == N - 0.5
        assert distinct_lower_bound(N, N) >= N - 1
    assert distinct_lower_bound(1, 1) == 0.5


def test_height_floor_examples():
    assert thm2_height_floor(4096, 64) == 64
    assert thm2_height_floor(10**6, 1000) == 1000
    assert thm2_height_floor(1000, 1000) == 1


@pytest.mark.parametrize("call", [
    lambda: chernoff_enk_bound(0, 3, 0.1),
    lambda: chernoff_enk_bound(10, 0, 0.1),
    lambda: chernoff_enk_bound(10, 3, 0.0),
    lambda: chernoff_enk_bound(10, 3, 1.0),
    lambda: okamoto_bound(100, 0),
    lambda: okamoto_bound(0, 10),
    lambda: devroye_tail(0, 1),
    lambda: devroye_tail(10, -1),
    lambda: devroye_tail(10, math.inf),
    lambda: distinct_lower_bound(0, 5),
    lambda: distinct_lower_bound(5, 0),
    lambda: thm2_height_floor(10, 0),
    lambda: thm2_height_floor(10, math.nan),
    lambda: chernoff_enk_bound(True, 3, 0.1),
])
def test_domain_errors(call):
    with pytest.raises(ValueError):
        call()


def test_bound_inputs_validation():
    BoundInputs(n=10, k=2, eps=0.1, alpha_n=8.0, t=1.0, N=3)
    for bad in ({"n": 0}, {"eps": 1.0}, {"alpha_n": 0.5}, {"t": -1.0}, {"t": math.inf},
                {"N": 0}, {"k": 1.5}):
        with pytest.raises(ValueError):
            BoundInputs(**bad)


def test_proportion_se():
    assert proportion_se(0.0, 100) == 0.0
    assert proportion_se(0.5, 100) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        proportion_se(0.5, 0)


ns = st.integers(1, 10**6)
ks = st.integers(1, 60)
epss = st.floats(0.001, 0.999)
ts = st.floats(0, 1e4)


@given(ns, ns, ks, epss)
def test_chernoff_decreasing_in_n(n1, n2, k, eps):
    lo, hi = sorted((n1, n2))
    assert chernoff_enk_bound(hi, k, eps) <= chernoff_enk_bound(lo, k, eps)


@given(ns, ks, ks, epss, epss)
def test_chernoff_monotone_in_k_and_eps(n, k1, k2, e1, e2):
    klo, khi = sorted((k1, k2))
    elo, ehi = sorted((e1, e2))
    assert chernoff_enk_bound(n, klo, e1) <= chernoff_enk_bound(n, khi, e1)
    assert chernoff_enk_bound(n, k1, ehi) <= chernoff_enk_bound(n, k1, elo)


@given(ns, ns, ts, ts)
def test_devroye_monotone_and_bounded(n1, n2, t1, t2):
    tlo, thi = sorted((t1, t2))
    nlo, nhi = sorted((n1, n2))
    assert devroye_tail(n1, thi) <= devroye_tail(n1, tlo)
    assert devroye_tail(nlo, t1) <= devroye_tail(nhi, t1)
    assert 0 <= devroye_tail(n1, t1) <= 1


@given(ns, st.floats(1, 1e9))
def test_okamoto_in_unit_interval(n, alpha):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert 0 <= okamoto_bound(n, alpha) <= 1


@given(st.integers(1, 10**5), st.integers(1, 10**5), st.integers(1, 10**5))
def test_distinct_lower_bound_increasing_in_N(n, N1, N2):
    lo, hi = sorted((N1, N2))
    assert distinct_lower_bound(n, lo) <= distinct_lower_bound(n, hi) <= n
