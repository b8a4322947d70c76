"""String laws, lazily sampled infinite binary strings, and exact prefix laws.

Four laws are supported:

* ``Bernoulli(p)``: i.i.d. bits with P(bit = 1) = p.
* ``BadMuN(N)``: first one at T ~ Uniform{1..N^2}, zeros before it, fair coins
  after it.
* ``BadMixture(alpha, a_cap)``: first one at G ~ Geometric(1/2), then a
  ``BadMuN(min(A(G), a_cap))`` string, where A is the generalized inverse of
  ``beta_n = max(1, floor(log2 alpha_n) - 2)``.
* ``NuForAlpha(alpha, a_cap)``: the mixture over the sequence
  ``max(1, log2 alpha_n)``.

Bit positions are 1-based. A sampled string never stores its long zero runs:
it keeps the positions of its structural ones and a coin tail whose 64-bit
chunks are drawn on demand.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence, Union

from . import rng

DEFAULT_A_CAP = 1 << 20
DEFAULT_MAX_DEPTH = 1 << 20
A_SATURATION = 1 << 62
MAX_ENUMERATION_K = 24
MAX_POSITION = 1 << 63


class DepthGuardError(RuntimeError):
    """A scan ran past ``max_depth`` coins, or two strings could not be told apart."""


# ---------------------------------------------------------------------------
# alpha sequences


class AlphaSpec:
    """A nondecreasing sequence alpha_n -> infinity, evaluated in log2 space."""

    def log2_value(self, n: int) -> float:
        raise NotImplementedError

    def value(self, n: int) -> float:
        l = self.log2_value(n)
        return 2.0 ** l if l < 1000 else math.inf

    def beta(self, n: int) -> int:
        return beta_of(self, n)

    def a(self, k: int) -> int:
        return a_of(self, k)


@dataclass(frozen=True)
class Power(AlphaSpec):
    """alpha_n = n ** eps, 0 < eps <= 1."""

    eps: float

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ValueError(f"Power needs 0 < eps <= 1, got {self.eps}")

    def log2_value(self, n):
        return self.eps * math.log2(n)


@dataclass(frozen=True)
class LogPower(AlphaSpec):
    """alpha_n = c * log2(n + 1)."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"LogPower needs c > 0, got {self.c}")

    def log2_value(self, n):
        return math.log2(self.c * math.log2(n + 1))


@dataclass(frozen=True)
class Exp2Power(AlphaSpec):
    """alpha_n = 2 ** (n ** eps); only its logarithm is ever formed."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"Exp2Power needs eps > 0, got {self.eps}")

    def log2_value(self, n):
        return float(n) ** self.eps


@dataclass(frozen=True)
class Log2Of(AlphaSpec):
    """alpha'_n = max(1, log2 alpha_n) for an inner sequence alpha."""

    inner: AlphaSpec

    def log2_value(self, n):
        return math.log2(max(1.0, self.inner.log2_value(n)))


@dataclass(frozen=True)
class Table(AlphaSpec):
    """alpha_1..alpha_L from ``values``, then the parametric ``continuation``."""

    values: tuple
    continuation: AlphaSpec | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("Table needs at least one value")
        if any(not (v > 0 and math.isfinite(v)) for v in vals):
            raise ValueError("Table values must be positive and finite")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("Table values must be nondecreasing")
        if self.continuation is None:
            raise ValueError("Table must declare a divergent continuation")
        if isinstance(self.continuation, Table):
            raise ValueError("Table continuation must be a parametric family")
        if self.continuation.value(len(vals) + 1) < vals[-1]:
            raise ValueError("Table continuation drops below the last value")

    def log2_value(self, n):
        if n <= len(self.values):
            return math.log2(self.values[n - 1])
        return self.continuation.log2_value(n)


def beta_of(alpha: AlphaSpec, n: int) -> int:
    """max(1, floor(log2 alpha_n) - 2)."""
    if n < 1:
        raise ValueError("n must be positive")
    return max(1, math.floor(alpha.log2_value(n)) - 2)


@lru_cache(maxsize=4096)
def a_of(alpha: AlphaSpec, k: int) -> int:
    """Generalized inverse max{m : beta_m <= k}, saturating at 2**62.

    If no m qualifies (beta_1 > k) the result is 1.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if beta_of(alpha, 1) > k:
        return 1
    hi = 2
    while beta_of(alpha, hi) <= k:
        if hi >= A_SATURATION:
            return A_SATURATION
        hi *= 2
    lo = hi // 2  # beta_lo <= k < beta_hi
    if beta_of(alpha, lo) > k:
        raise ValueError("alpha is not monotone")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if beta_of(alpha, mid) <= k:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# string laws


@dataclass(frozen=True)
class Bernoulli:
    p: float = 0.5
    law = "bernoulli"

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"Bernoulli needs 0 < p < 1, got {self.p}")


@dataclass(frozen=True)
class BadMuN:
    N: int
    law = "mu_n"

    def __post_init__(self):
        if not isinstance(self.N, int) or not 1 <= self.N <= 1 << 31:
            raise ValueError(f"BadMuN needs 1 <= N <= 2**31, got {self.N}")


@dataclass(frozen=True)
class BadMixture:
    alpha: AlphaSpec
    a_cap: int = DEFAULT_A_CAP
    law = "mixture"

    def __post_init__(self):
        if not isinstance(self.alpha, AlphaSpec):
            raise ValueError("BadMixture needs an AlphaSpec")
        if not isinstance(self.a_cap, int) or not 2 <= self.a_cap <= 1 << 31:
            raise ValueError(f"a_cap must be in [2, 2**31], got {self.a_cap}")

    def inner_n(self, g: int) -> int:
        return min(a_of(self.alpha, g), self.a_cap)


@dataclass(frozen=True)
class NuForAlpha:
    alpha: AlphaSpec
    a_cap: int = DEFAULT_A_CAP
    law = "nu"

    def __post_init__(self):
        nu_spec(self.alpha, self.a_cap)

    def mixture(self) -> BadMixture:
        return nu_spec(self.alpha, self.a_cap)


DistributionSpec = Union[Bernoulli, BadMuN, BadMixture, NuForAlpha]


def nu_spec(alpha: AlphaSpec, a_cap: int = DEFAULT_A_CAP) -> BadMixture:
    """The mixture law over alpha'_n = max(1, log2 alpha_n).

    Its expected height is at least n / log2(alpha_n) for large n, which
    outgrows n / alpha_n.
    """
    if not isinstance(alpha, AlphaSpec):
        raise ValueError("nu_spec needs an AlphaSpec")
    return BadMixture(Log2Of(alpha), a_cap)


def as_mixture(spec) -> BadMixture | None:
    if isinstance(spec, NuForAlpha):
        return spec.mixture()
    if isinstance(spec, BadMixture):
        return spec
    return None


# ---------------------------------------------------------------------------
# JSON records

_ALPHA_FAMILIES = {
    "power": (Power, "eps"),
    "logpower": (LogPower, "c"),
    "exp2power": (Exp2Power, "eps"),
}


def alpha_from_json(obj) -> AlphaSpec:
    if isinstance(obj, AlphaSpec):
        return obj
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError(f"bad alpha record: {obj!r}")
    fam = obj["family"]
    if fam in _ALPHA_FAMILIES:
        cls, field = _ALPHA_FAMILIES[fam]
        return cls(float(obj[field]))
    if fam == "table":
        cont = obj.get("continuation")
        return Table(tuple(obj["values"]), alpha_from_json(cont) if cont else None)
    if fam == "log2":
        return Log2Of(alpha_from_json(obj["inner"]))
    raise ValueError(f"unknown alpha family {fam!r}")


def alpha_to_json(alpha: AlphaSpec) -> dict:
    if isinstance(alpha, (Power, Exp2Power)):
        name = "power" if isinstance(alpha, Power) else "exp2power"
        return {"family": name, "eps": alpha.eps}
    if isinstance(alpha, LogPower):
        return {"family": "logpower", "c": alpha.c}
    if isinstance(alpha, Log2Of):
        return {"family": "log2", "inner": alpha_to_json(alpha.inner)}
    if isinstance(alpha, Table):
        return {
            "family": "table",
            "values": list(alpha.values),
            "continuation": alpha_to_json(alpha.continuation),
        }
    raise TypeError(type(alpha))


def spec_from_json(obj) -> DistributionSpec:
    """Parse ``{"law": ...}`` records (dict or JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "law" not in obj:
        raise ValueError(f"bad distribution record: {obj!r}")
    law = obj["law"]
    if law == "bernoulli":
        return Bernoulli(float(obj.get("p", 0.5)))
    if law == "mu_n":
        return BadMuN(int(obj["N"]))
    if law in ("mixture", "nu"):
        cls = BadMixture if law == "mixture" else NuForAlpha
        return cls(alpha_from_json(obj["alpha"]), int(obj.get("a_cap", DEFAULT_A_CAP)))
    raise ValueError(f"unknown law {law!r}")


def spec_to_json(spec: DistributionSpec) -> dict:
    if isinstance(spec, Bernoulli):
        return {"law": "bernoulli", "p": spec.p}
    if isinstance(spec, BadMuN):
        return {"law": "mu_n", "N": spec.N}
    return {"law": spec.law, "alpha": alpha_to_json(spec.alpha), "a_cap": spec.a_cap}


# ---------------------------------------------------------------------------
# lazy strings


class LazyBitString:
    """An infinite binary string drawn from one law.

    Bits below ``tail_start`` are zero except at the positions in ``ones``;
    from ``tail_start`` on, bits are coins from the string's own counter-based
    substream, cached in 64-bit chunks on first use. Any single bit can be read
    directly. Sequential scans for the next 1 or for a divergence stop with
    ``DepthGuardError`` after ``max_depth`` coins.
    """

    __slots__ = (
        "string_id", "law", "G", "T", "inner_N", "coin_key",
        "ones", "tail_start", "p", "max_depth", "_chunks",
    )

    def __init__(self, string_id, law, coin_key, ones=(), p=0.5, G=None, T=None,
                 inner_N=None, max_depth=DEFAULT_MAX_DEPTH, tail_start=None):
        self.string_id = string_id
        self.law = law
        self.G = G
        self.T = T
        self.inner_N = inner_N
        self.coin_key = coin_key
        self.ones = tuple(ones)
        self.tail_start = self.ones[-1] + 1 if self.ones else 1
        if tail_start is not None:
            if tail_start < self.tail_start:
                raise ValueError("tail_start must come after the last structural one")
            self.tail_start = tail_start
        self.p = p
        self.max_depth = max_depth
        self._chunks = {}

    def __repr__(self):
        return (f"LazyBitString(id={self.string_id}, ones={self.ones}, "
                f"coins={self.coin_prefix(16)!r}...)")

    @property
    def materialized(self) -> int:
        """Number of coins currently cached."""
        return 64 * len(self._chunks)

    def _chunk(self, j):
        ch = self._chunks.get(j)
        if ch is None:
            key = self.coin_key
            if self.p == 0.5:
                ch = rng.draw(key, j)
            else:
                p = self.p
                base = j << 6
                ch = 0
                for b in range(64):
                    if rng.uniform_float(key, base + b) < p:
                        ch |= 1 << b
            self._chunks[j] = ch
        return ch

    def _coin_bits(self, c0, c1):
        # coins c0..c1-1 packed least significant first
        j0 = c0 >> 6
        j1 = (c1 - 1) >> 6
        if j0 == j1:
            return (self._chunk(j0) >> (c0 & 63)) & ((1 << (c1 - c0)) - 1)
        acc = 0
        for j in range(j1, j0 - 1, -1):
            acc = (acc << 64) | self._chunk(j)
        return (acc >> (c0 & 63)) & ((1 << (c1 - c0)) - 1)

    def bit_at(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit positions are 1-based")
        if i < self.tail_start:
            return 1 if i in self.ones else 0
        if i >= MAX_POSITION:
            raise DepthGuardError(f"position {i} is outside the 64-bit range")
        c = i - self.tail_start
        ch = self._chunks.get(c >> 6)
        if ch is None:
            ch = self._chunk(c >> 6)
        return (ch >> (c & 63)) & 1

    def block(self, pos: int, width: int = 64) -> int:
        """Bits ``pos..pos+width-1`` packed least significant first.

        Coins past ``max_depth`` read as zero; callers guard separately.
        """
        out = 0
        ts = self.tail_start
        end = pos + width  # exclusive
        for o in self.ones:
            if pos <= o < end:
                out |= 1 << (o - pos)
        if end > ts:
            first = max(pos, ts)
            c0 = first - ts
            c1 = min(end - ts, self.max_depth)
            if c1 > c0:
                out |= self._coin_bits(c0, c1) << (first - pos)
        return out

    def prefix(self, k: int) -> str:
        b = self.block(1, k)
        return "".join("1" if (b >> j) & 1 else "0" for j in range(k))

    def coin_prefix(self, k: int) -> str:
        return "".join(str(self.bit_at(self.tail_start + j)) for j in range(k))

    def next_one(self, pos: int) -> int:
        """Smallest position >= pos holding a 1."""
        if pos < self.tail_start:
            for o in self.ones:
                if o >= pos:
                    return o
            pos = self.tail_start
        c = pos - self.tail_start
        while c < self.max_depth:
            j = c >> 6
            x = self._chunk(j) >> (c & 63)
            if x:
                c += (x & -x).bit_length() - 1
                if c >= self.max_depth:
                    break
                return self.tail_start + c
            c = (j + 1) << 6
        raise DepthGuardError(
            f"string {self.string_id}: no 1 within max_depth {self.max_depth} coins")

    def first_one_index(self) -> int:
        if self.ones:
            return self.ones[0]
        return self.next_one(1)


def _next_event(s: LazyBitString, pos: int) -> int:
    if pos >= s.tail_start:
        return pos
    for o in s.ones:
        if o >= pos:
            return o
    return s.tail_start


def first_difference(a: LazyBitString, b: LazyBitString) -> int:
    """Smallest position where ``a`` and ``b`` differ.

    Shared zero runs are skipped without materializing them.
    """
    if a is b:
        raise DepthGuardError(f"string {a.string_id} compared with itself")
    pos = 1
    limit_a = a.tail_start + a.max_depth
    limit_b = b.tail_start + b.max_depth
    while True:
        pos = max(pos, min(_next_event(a, pos), _next_event(b, pos)))
        if pos >= limit_a or pos >= limit_b:
            raise DepthGuardError(
                f"strings {a.string_id} and {b.string_id} agree up to the depth guard")
        x = a.block(pos) ^ b.block(pos)
        if x:
            return pos + (x & -x).bit_length() - 1
        pos += 64


def sample_string(spec: DistributionSpec, stream_key: int, string_id: int = 0,
                  max_depth: int = DEFAULT_MAX_DEPTH) -> LazyBitString:
    """Draw the structural parameters of one string; no coins are drawn yet."""
    coin_key = rng.derive_key(stream_key, rng.PURPOSE_COINS)
    if isinstance(spec, Bernoulli):
        return LazyBitString(string_id, spec, coin_key, p=spec.p, max_depth=max_depth)
    if isinstance(spec, BadMuN):
        t = rng.uniform_int(rng.derive_key(stream_key, rng.PURPOSE_T), spec.N * spec.N)
        return LazyBitString(string_id, spec, coin_key, ones=(t,), T=t,
                             inner_N=spec.N, max_depth=max_depth)
    mix = as_mixture(spec)
    if mix is None:
        raise ValueError(f"unsupported law {spec!r}")
    g = rng.geometric_half(rng.derive_key(stream_key, rng.PURPOSE_G))
    inner = mix.inner_n(g)
    t = rng.uniform_int(rng.derive_key(stream_key, rng.PURPOSE_T), inner * inner)
    return LazyBitString(string_id, spec, coin_key, ones=(g, g + t), G=g, T=t,
                         inner_N=inner, max_depth=max_depth)


# ---------------------------------------------------------------------------
# exact prefix probabilities


def _bits(v) -> tuple:
    if isinstance(v, str):
        if set(v) - {"0", "1"}:
            raise ValueError(f"not a bit string: {v!r}")
        return tuple(int(c) for c in v)
    return tuple(int(b) for b in v)


def _mu_n_prefix(n_param: int, v: tuple) -> float:
    m = n_param * n_param
    k = len(v)
    if k == 0:
        return 1.0
    try:
        t = v.index(1) + 1
    except ValueError:
        return max(0, m - k) / m
    if t > m:
        return 0.0
    return math.ldexp(1.0 / m, -(k - t))


def prefix_probability(spec: DistributionSpec, v) -> float:
    """P(a string drawn from ``spec`` starts with ``v``)."""
    v = _bits(v)
    if not v:
        raise ValueError("prefix must be nonempty")
    if isinstance(spec, Bernoulli):
        ones = sum(v)
        return spec.p ** ones * (1 - spec.p) ** (len(v) - ones)
    if isinstance(spec, BadMuN):
        return _mu_n_prefix(spec.N, v)
    mix = as_mixture(spec)
    if mix is None:
        raise ValueError(f"unsupported law {spec!r}")
    try:
        t = v.index(1) + 1
    except ValueError:
        return math.ldexp(1.0, -len(v))
    return math.ldexp(_mu_n_prefix(mix.inner_n(t), v[t:]), -t)


def _max_mu_n(n_param: int, k: int) -> float:
    if k == 0:
        return 1.0
    m = n_param * n_param
    zeros = max(0, m - k) / m
    return max(zeros, math.ldexp(1.0 / m, -(k - min(k, m))))


def max_prefix_probability(spec: DistributionSpec, k: int) -> float:
    """max over v in {0,1}^k of ``prefix_probability(spec, v)``, in closed form."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(spec, Bernoulli):
        return max(spec.p, 1 - spec.p) ** k
    if isinstance(spec, BadMuN):
        return _max_mu_n(spec.N, k)
    mix = as_mixture(spec)
    if mix is None:
        raise ValueError(f"unsupported law {spec!r}")
    best = math.ldexp(1.0, -k)
    for t in range(1, k + 1):
        best = max(best, math.ldexp(_max_mu_n(mix.inner_n(t), k - t), -t))
    return best


def max_prefix_probability_enumerated(spec: DistributionSpec, k: int) -> float:
    """Brute-force maximum over all 2**k prefixes."""
    if not 1 <= k <= MAX_ENUMERATION_K:
        raise ValueError(f"enumeration needs 1 <= k <= {MAX_ENUMERATION_K}")
    return max(prefix_probability(spec, v) for v in product((0, 1), repeat=k))


def diffuse_level(spec: DistributionSpec, eps: float, k_max: int = MAX_ENUMERATION_K):
    """Smallest k <= k_max with every k-prefix below probability eps, else None."""
    for k in range(1, k_max + 1):
        if max_prefix_probability(spec, k) < eps:
            return k
    return None


def count_prefix_matches(strings: Sequence[LazyBitString], v) -> int:
    """How many strings start with the bit string ``v``."""
    v = _bits(v)
    if not v:
        raise ValueError("prefix must be nonempty")
    target = sum(b << j for j, b in enumerate(v))
    return sum(1 for s in strings if s.block(1, len(v)) == target)
