"""Deterministic random streams and doubly indexed sign / Gaussian draws.

Randomness is organized around a counter-based generator (Philox) so that
every consumer of randomness is addressed by position: a stream is a
(master_seed, counter) pair, and within a stream the i-th trial owns the
i-th fixed-size block of raw 64-bit words.  This makes Monte Carlo runs
bit-reproducible regardless of how trials are split across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
# Second Philox key word, fixed so distinct master seeds give distinct keys.
_KEY_SALT = 0x9E3779B97F4A7C15
# Block offset where ordinary numpy Generator consumption starts; raw word
# addressing stays below this, so the two never overlap within a stream.
_GENERATOR_REGION = 1 << 96


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream: a pure function of (master_seed, counter).

    ``substream(i)`` derives an independent child stream by mixing the
    counter, and ``raw(n, block_offset)`` exposes positional 64-bit words so
    that parallel workers can regenerate any trial's randomness in O(1).
    """

    master_seed: int
    counter: int = 0

    def __post_init__(self):
        if self.counter < 0:
            raise ValueError("counter must be nonnegative")

    def substream(self, index: int) -> "RngStream":
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        mixed = _splitmix64(_splitmix64(self.counter & _MASK64) ^ _splitmix64((index + 1) & _MASK64))
        return RngStream(self.master_seed, mixed)

    def _philox(self, block_offset: int = 0) -> np.random.Philox:
        key = [self.master_seed & _MASK64, _KEY_SALT]
        return np.random.Philox(counter=(self.counter << 128) + block_offset, key=key)

    def raw(self, n_words: int, block_offset: int = 0) -> np.ndarray:
        """Words [4*block_offset, 4*block_offset + n_words) of this stream."""
        return self._philox(block_offset).random_raw(n_words)

    def generator(self) -> np.random.Generator:
        """General-purpose numpy Generator over a reserved part of the stream."""
        return np.random.Generator(self._philox(_GENERATOR_REGION))


def signs_from_words(words: np.ndarray) -> np.ndarray:
    """Map raw 64-bit words to +-1.0 by their top bit."""
    return 1.0 - 2.0 * (words >> 63).astype(np.float64)


def normals_from_words(words: np.ndarray) -> np.ndarray:
    """Map pairs of raw words to standard normals (Box-Muller, cosine branch)."""
    if words.size % 2:
        raise ValueError("normals require an even number of words")
    w = words.reshape(-1, 2)
    u1 = ((w[:, 0] >> 11) + 1) * 2.0**-53  # in (0, 1], keeps the log finite
    u2 = (w[:, 1] >> 11) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def _scatter(flat: np.ndarray, index_map) -> np.ndarray:
    """Place per-cell values into a dense (T, N) array, zeros off support."""
    out = np.zeros((index_map.T, index_map.N))
    pos = 0
    for t, subset in enumerate(index_map.subsets):
        out[t, list(subset)] = flat[pos:pos + len(subset)]
        pos += len(subset)
    return out


def _validate_support(values: np.ndarray, index_map, sign_valued: bool) -> None:
    if values.shape != (index_map.T, index_map.N):
        raise ValueError(f"values must have shape ({index_map.T}, {index_map.N})")
    if not np.all(np.isfinite(values)):
        raise ValueError("entries must be finite")
    mask = index_map.support_mask()
    if np.any(values[~mask] != 0.0):
        raise ValueError("entries only allowed on the index-map support")
    if sign_valued and not np.all(np.abs(values[mask]) == 1.0):
        raise ValueError("sign entries must be -1 or +1")


@dataclass(frozen=True)
class SignMatrix:
    """Doubly indexed signs: +-1 on the support of an index map, 0 elsewhere."""

    values: np.ndarray
    index_map: "object"

    def __post_init__(self):
        _validate_support(self.values, self.index_map, sign_valued=True)
        self.values.setflags(write=False)


@dataclass(frozen=True)
class GaussMatrix:
    """Doubly indexed standard normals on the support of an index map."""

    values: np.ndarray
    index_map: "object"

    def __post_init__(self):
        _validate_support(self.values, self.index_map, sign_valued=False)
        self.values.setflags(write=False)


def sample_signs(stream: RngStream, index_map) -> SignMatrix:
    """Draw independent +-1 entries for every support cell of the map.

    Cells are filled in canonical order (t ascending, indices ascending
    within each subset), one raw word per cell.
    """
    words = stream.raw(index_map.support_size)
    return SignMatrix(_scatter(signs_from_words(words), index_map), index_map)


def sample_gauss(stream: RngStream, index_map) -> GaussMatrix:
    """Draw independent standard normal entries for every support cell."""
    words = stream.raw(2 * index_map.support_size)
    return GaussMatrix(_scatter(normals_from_words(words), index_map), index_map)
