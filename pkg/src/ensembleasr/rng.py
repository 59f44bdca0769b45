"""Deterministic random streams for synthesis, initialization, and batching.

Everything random in this package flows through one explicitly specified
counter-based generator so that identical seeds give bit-identical output
regardless of platform or generation order.

Generator (SplitMix64, counter-based form). Output ``k`` (0-based) of the
stream with 64-bit seed ``s`` is::

    out_k = mix64((s + (k + 1) * GAMMA) mod 2**64)

with ``GAMMA = 0x9E3779B97F4A7C15`` and the finalizer::

    mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4B5B9  (mod 2**64)
              z ^= z >> 27; z *= 0x94D049BB133111EB  (mod 2**64)
              z ^= z >> 31

Uniforms in [0, 1) take the top 53 bits: ``(out_k >> 11) * 2**-53``.
Gaussians are Box-Muller over consecutive uniform pairs (u1, u2)::

    r = sqrt(-2 * ln(1 - u1));  z0 = r * cos(2*pi*u2);  z1 = r * sin(2*pi*u2)

with the second member of the last pair carried over between calls, so a
stream yields the same gaussian sequence however the calls are chunked.

Substreams are derived by folding labels into the seed with ``mix64``
(see ``derive_seed``), making every consumer's stream independent of the
order in which other consumers draw.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4B5B9
_MIX_B = 0x94D049BB133111EB

_TWO_PI = 2.0 * math.pi
_U53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (mod 2**64)."""
    z &= _MASK64
    z = (z ^ (z >> 30)) * _MIX_A & _MASK64
    z = (z ^ (z >> 27)) * _MIX_B & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps mod 2**64; keep every operand uint64 so numpy
    # never promotes to float.
    a = np.uint64(_MIX_A)
    b = np.uint64(_MIX_B)
    z = z ^ (z >> np.uint64(30))
    z = z * a
    z = z ^ (z >> np.uint64(27))
    z = z * b
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, *labels: int | str) -> int:
    """Fold labels into ``seed`` to name an independent substream.

    Each label is encoded to bytes (UTF-8 for strings, 8-byte little-endian
    for non-negative ints), and folded as: mix in the byte length, then each
    8-byte zero-padded chunk, each step ``h = mix64(h ^ chunk)``.
    """
    h = mix64(seed)
    for label in labels:
        if isinstance(label, str):
            data = label.encode("utf-8")
        else:
            data = int(label).to_bytes(8, "little", signed=False)
        h = mix64(h ^ len(data))
        for i in range(0, len(data), 8):
            chunk = data[i : i + 8].ljust(8, b"\0")
            h = mix64(h ^ int.from_bytes(chunk, "little"))
    return h


class RandomStream:
    """Sequential view over the counter-based generator for one seed."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & _MASK64)
        self._count = 0
        self._gauss_carry: float | None = None

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` 64-bit outputs as a uint64 array."""
        if n < 0:
            raise ValueError("n must be non-negative")
        ks = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            return _mix64_array(self._seed + ks * np.uint64(_GAMMA))

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` float64 uniforms in [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _U53

    def gaussians(self, n: int) -> np.ndarray:
        """Next ``n`` float64 standard normals (Box-Muller pairs)."""
        out = np.empty(n, dtype=np.float64)
        pos = 0
        if self._gauss_carry is not None and n > 0:
            out[0] = self._gauss_carry
            self._gauss_carry = None
            pos = 1
        remaining = n - pos
        if remaining > 0:
            npairs = (remaining + 1) // 2
            u = self.uniforms(2 * npairs).reshape(npairs, 2)
            r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
            theta = _TWO_PI * u[:, 1]
            z = np.empty(2 * npairs, dtype=np.float64)
            z[0::2] = r * np.cos(theta)
            z[1::2] = r * np.sin(theta)
            out[pos:] = z[:remaining]
            if remaining < 2 * npairs:
                self._gauss_carry = float(z[remaining])
        return out

    def integers(self, n: int, bound: int) -> np.ndarray:
        """Next ``n`` ints uniform on [0, bound) via floor(u * bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return np.floor(self.uniforms(n) * bound).astype(np.int64)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n), one draw per swap index."""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = int(self.integers(1, i + 1)[0])
            items[i], items[j] = items[j], items[i]
        return items
