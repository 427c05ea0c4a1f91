"""Counter-based random numbers and the NumPy trial kernel.

Every random quantity in a simulation is a pure function of a 64-bit
stream key and an integer counter, so any trial can be regenerated in
isolation and results do not depend on execution order.

* ``mix64`` is the SplitMix64 finalizer.
* Uniform ``j`` of a stream is ``mix64(key + (j + 1) * GOLDEN) >> 11``
  scaled by ``2**-53``, giving values in ``[0, 1)``.
* Normal pair ``p`` uses uniforms ``2p`` and ``2p + 1`` through the
  Box-Muller transform: normal ``2p`` is the cosine branch, normal
  ``2p + 1`` the sine branch.

Within a trial the noise sample for position ``i`` is normal ``i`` and the
data-carrying sample (H1 only) is normal ``N + i``.

The compiled kernel in ``_kernels.pyx`` implements the same recipe; the two
agree to rounding of ``log``/``cos``/``sin`` in the platform math library.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0

TAG_H0 = 0x5D0A2C5B1E4F6A01
TAG_H1 = 0x7C3E19A4B6D28F13
TAG_PILOT = 0x3B9F47E2C1A05D27

# trials per vectorized slab; bounds temporary memory to ~ slab * 4N doubles
_SLAB = 1024


def mix64_int(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def base_key(master_seed: int, tag: int) -> int:
    """Key shared by all trials of one (seed, tag) family."""
    return mix64_int(mix64_int(master_seed) ^ tag)


def trial_key(master_seed: int, tag: int, index: int) -> int:
    """Stream key of trial ``index``."""
    return mix64_int(base_key(master_seed, tag) + (index + 1) * GOLDEN)


def _uniforms(keys: np.ndarray, first: int, count: int) -> np.ndarray:
    j = np.arange(first + 1, first + count + 1, dtype=np.uint64)
    bits = mix64(keys[:, None] + j * np.uint64(GOLDEN))
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


def _normal_pairs(keys: np.ndarray, first_pair: int, n_pairs: int) -> np.ndarray:
    """Normals ``2*first_pair`` .. ``2*(first_pair+n_pairs)-1`` for each key."""
    u = _uniforms(keys, 2 * first_pair, 2 * n_pairs)
    r = np.sqrt(-2.0 * np.log(1.0 - u[:, 0::2]))
    angle = (2.0 * np.pi) * u[:, 1::2]
    z = np.empty((keys.shape[0], 2 * n_pairs))
    z[:, 0::2] = r * np.cos(angle)
    z[:, 1::2] = r * np.sin(angle)
    return z


def sign_pattern(seed: int, n: int) -> np.ndarray:
    """Deterministic +/-1 sequence of length ``n``."""
    key = np.array([base_key(seed, TAG_PILOT)], dtype=np.uint64)
    j = np.arange(1, n + 1, dtype=np.uint64)
    bits = mix64(key + j * np.uint64(GOLDEN))
    return np.where(bits >> np.uint64(63), 1.0, -1.0)


class CounterStream:
    """Sequential view of one counter-based stream.

    Exposes ``standard_normal`` so it can stand in for a
    :class:`numpy.random.Generator` wherever blocks are synthesized.
    """

    def __init__(self, key: int):
        self.key = key & MASK64
        self.position = 0

    @classmethod
    def for_trial(cls, master_seed: int, tag: int, index: int) -> "CounterStream":
        return cls(trial_key(master_seed, tag, index))

    def standard_normal(self, size: int) -> np.ndarray:
        first, stop = self.position, self.position + size
        first_pair, stop_pair = first // 2, (stop + 1) // 2
        keys = np.array([self.key], dtype=np.uint64)
        z = _normal_pairs(keys, first_pair, stop_pair - first_pair)[0]
        self.position = stop
        offset = first - 2 * first_pair
        return z[offset:offset + size]


def fill_components(pilot, sqrt_theta, data_std, noise_std, h1, key0,
                    start, stop, energy_out, corr_out):
    """Per-trial energy ``mean(y**2)`` and pilot correlation ``mean(x*y)``.

    Trials ``start`` .. ``stop - 1`` are written to ``energy_out[0:stop-start]``
    and ``corr_out[0:stop-start]``. ``key0`` is the family key from
    :func:`base_key`.
    """
    pilot = np.asarray(pilot, dtype=np.float64)
    n = pilot.shape[0]
    n_pairs = n if h1 else (n + 1) // 2
    for lo in range(start, stop, _SLAB):
        hi = min(lo + _SLAB, stop)
        idx = np.arange(lo + 1, hi + 1, dtype=np.uint64)
        keys = mix64(np.uint64(key0) + idx * np.uint64(GOLDEN))
        z = _normal_pairs(keys, 0, n_pairs)
        if h1:
            y = sqrt_theta * pilot + data_std * z[:, n:2 * n] + noise_std * z[:, :n]
        else:
            y = noise_std * z[:, :n]
        energy_out[lo - start:hi - start] = (y * y).sum(axis=1) / n
        corr_out[lo - start:hi - start] = (y * pilot).sum(axis=1) / n
