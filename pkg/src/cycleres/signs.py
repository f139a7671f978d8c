"""Deterministic and stochastic ±1 sign streams.

Coupling maps and bias vectors are built from sign streams coming from one of
two sources: the binary expansion of pi (fully deterministic, reproducible
bit-for-bit) or seeded Bernoulli draws over {-1, +1}.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

PI_MODE = "pi"
BERNOULLI_MODE = "bernoulli"

# Cache of fractional pi bits, grown geometrically. Concurrent readers are
# fine; the lock serializes extension.
_pi_bits = np.empty(0, dtype=np.uint8)
_pi_lock = threading.Lock()


def _compute_pi_bits(count: int) -> np.ndarray:
    """First `count` fractional bits of pi, MSB first, as a uint8 array."""
    guard = 64
    try:
        import gmpy2

        with gmpy2.context(precision=count + guard):
            scaled = gmpy2.mpz(gmpy2.floor(gmpy2.const_pi() * (gmpy2.mpz(1) << count)))
        scaled = int(scaled)
    except ImportError:
        import mpmath

        with mpmath.workprec(count + guard):
            scaled = int(mpmath.floor(mpmath.ldexp(mpmath.pi, count)))
    frac = scaled - (3 << count)  # drop the integer part (binary 11)
    nbytes = (count + 7) // 8
    pad = nbytes * 8 - count
    raw = (frac << pad).to_bytes(nbytes, "big")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:count]


def pi_fraction_bits(count: int) -> np.ndarray:
    """Return the first `count` bits of the fractional part of pi.

    pi = 11.001001000011111..._2, so pi_fraction_bits(8) is [0,0,1,0,0,1,0,0].
    Results are memoized; two calls always agree bit-for-bit and shorter
    requests are prefixes of longer ones.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    global _pi_bits
    if count > _pi_bits.size:
        with _pi_lock:
            if count > _pi_bits.size:
                grow = max(4096, 2 ** int(np.ceil(np.log2(count))))
                _pi_bits = _compute_pi_bits(grow)
    return _pi_bits[:count].copy()


def bits_to_signs(bits: np.ndarray) -> np.ndarray:
    """Map bit 0 -> -1 and bit 1 -> +1 (int8)."""
    return (bits.astype(np.int8) * 2) - 1


class PiSignSource:
    """Sign stream over the fractional binary expansion of pi.

    `cursor` is the 1-based index of the next unconsumed fractional bit.
    """

    kind = PI_MODE

    def __init__(self, cursor: int = 1):
        if cursor < 1:
            raise ValueError("cursor is 1-based")
        self.cursor = cursor

    def take(self, count: int) -> np.ndarray:
        bits = pi_fraction_bits(self.cursor - 1 + count)[self.cursor - 1 :]
        self.cursor += count
        return bits_to_signs(bits)

    def signs_at(self, start: int, count: int) -> np.ndarray:
        """Signs from absolute fractional-bit positions start..start+count-1
        (1-based), without touching the cursor."""
        bits = pi_fraction_bits(start - 1 + count)[start - 1 :]
        return bits_to_signs(bits)


class BernoulliSignSource:
    """I.i.d. uniform ±1 stream from a seeded generator."""

    kind = BERNOULLI_MODE

    def __init__(self, seed):
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def take(self, count: int) -> np.ndarray:
        return bits_to_signs(self._rng.integers(0, 2, size=count, dtype=np.uint8))


def make_sign_source(kind: str, seed=None):
    if kind == PI_MODE:
        return PiSignSource()
    if kind == BERNOULLI_MODE:
        return BernoulliSignSource(seed)
    raise ValueError(f"unknown sign source kind {kind!r}")


@dataclass
class Allocation:
    """Signs for one system build.

    v_in[i] is the external-input column of encoder i; cross[(j, i)] is the
    n x n coupling from encoder j's state into encoder i (present only for
    active edges); bias[i] is encoder i's bias sign vector.
    """

    v_in: np.ndarray                 # (k, n) int8
    bias: np.ndarray                 # (k, n) int8
    cross: dict = field(default_factory=dict)  # (src, dst) -> (n, n) int8


def allocate_couplings(source, k: int, n: int, adjacency: np.ndarray) -> Allocation:
    """Consume signs for a k-encoder system in the canonical order.

    Order: V_in for encoders 1..k (n signs each), then cross couplings for
    destination i = 1..k and source j = 1..k (j != i) in row-major order,
    n^2 signs per active edge (adjacency[j, i] == 1). Inactive pairs consume
    nothing. Bias: in pi mode every encoder shares the signs of fractional
    bits n+1..2n, read by absolute position rather than from the stream; in
    Bernoulli mode each encoder's bias is drawn from the stream afterwards.
    """
    adjacency = np.asarray(adjacency)
    v_in = np.empty((k, n), dtype=np.int8)
    for i in range(k):
        v_in[i] = source.take(n)
    cross = {}
    for i in range(k):          # destination
        for j in range(k):      # source
            if j != i and adjacency[j, i]:
                cross[(j, i)] = source.take(n * n).reshape(n, n)
    bias = np.empty((k, n), dtype=np.int8)
    if source.kind == PI_MODE:
        bias[:] = source.signs_at(n + 1, n)
    else:
        for i in range(k):
            bias[i] = source.take(n)
    return Allocation(v_in=v_in, bias=bias, cross=cross)
