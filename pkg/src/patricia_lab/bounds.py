"""Closed-form bounds on PATRICIA heights and the counts behind them.

All functions are pure and evaluate in double precision. Whether ``n`` is
large enough for a bound to be meaningful is left to the caller.
"""

import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundInputs:
    n: int = 1
    k: int = 1
    eps: float = 0.5
    alpha_n: float = 8.0
    t: float = 0.0
    N: int = 1

    def __post_init__(self):
        for name in ("n", "k", "N"):
            _positive_int(name, getattr(self, name))
        for name in ("eps", "alpha_n", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.alpha_n < 1:
            raise ValueError("alpha_n must be >= 1")
        if self.t < 0:
            raise ValueError("t must be >= 0")


def _positive_int(name, v):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {v!r}")


def _positive(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be positive and finite, got {v!r}")


def chernoff_enk_bound(n, k, eps):
    """2^k exp(-eps n / 2): some k-prefix class holds >= 2 eps n of n strings."""
    _positive_int("n", n)
    _positive_int("k", k)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.exp(k * math.log(2) - eps * n / 2)


def okamoto_bound(n, alpha_n):
    """exp(-n / (2 alpha_n)), bounding P(X_n < 2n / alpha_n).

    The derivation assumes alpha_n >= 8; smaller values warn.
    """
    _positive_int("n", n)
    _positive("alpha_n", alpha_n)
    if alpha_n < 8:
        warnings.warn(f"okamoto_bound used with alpha_n={alpha_n} < 8", stacklevel=2)
    return math.exp(-n / (2 * alpha_n))


def devroye_tail(n, t):
    """exp(-t^2 / (2n)), bounding P(H_n <= E[H_n] - t) for every diffuse law."""
    _positive_int("n", n)
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and >= 0")
    return math.exp(-t * t / (2 * n))


def distinct_lower_bound(n, N):
    """n - n^2 / (2 N^2), a lower bound on the expected number of distinct first-one positions."""
    _positive_int("n", n)
    _positive_int("N", N)
    return n - n * n / (2 * N * N)


def thm2_height_floor(n, alpha_n):
    """n / alpha_n, the eventual floor on the mean height under the mixture law."""
    _positive_int("n", n)
    _positive("alpha_n", alpha_n)
    return n / alpha_n


def proportion_se(p_hat, trials):
    """Standard error of an empirical proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    return math.sqrt(max(p_hat * (1 - p_hat), 0.0) / trials)
