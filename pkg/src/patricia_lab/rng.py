"""Counter-based 64-bit random substreams.

Every random quantity in the toolkit is a pure function of a 64-bit key and a
draw index, so strings can be sampled in any order, by any worker, and still
come out bit-identical. The mixing function is the SplitMix64 finalizer.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# purpose tags for derive_key
PURPOSE_COINS = 1
PURPOSE_T = 2
PURPOSE_G = 3
PURPOSE_STRING = 4


def mix64(z):
    z = (z + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(seed, *parts):
    """Fold integer parts into ``seed`` to name an independent substream."""
    k = mix64(seed & MASK64)
    for p in parts:
        k = mix64(k ^ mix64(p & MASK64))
    return k


def draw(key, index):
    """The ``index``-th 64-bit output of the substream ``key``."""
    return mix64((key + (index + 1) * GOLDEN_GAMMA) & MASK64)


def uniform_int(key, upper):
    """Uniform integer on ``1..upper`` by rejection, ``upper <= 2**64``."""
    if upper < 1:
        raise ValueError("upper must be positive")
    if upper == 1:
        return 1
    limit = ((1 << 64) // upper) * upper
    i = 0
    while True:
        x = draw(key, i)
        if x < limit:
            return x % upper + 1
        i += 1


def uniform_float(key, index):
    """Double in [0, 1) built from the top 53 bits of one draw."""
    return (draw(key, index) >> 11) * (1.0 / (1 << 53))


class StreamFault(RuntimeError):
    """A substream produced an event of probability about 2**-64."""


def geometric_half(key):
    """G with P(G = k) = 2**-k: index of the first 1 among fair coins.

    The coins are the bits of a single 64-bit draw, least significant first.
    """
    x = draw(key, 0)
    if x == 0:
        raise StreamFault("no success in 64 fair coins")
    return (x & -x).bit_length()
