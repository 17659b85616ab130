"""BPSK over AWGN and the resulting channel LLRs.

Randomness comes from ``numpy.random.Generator`` backed by PCG64, whose
uniform stream is identical on every platform.  Gaussian noise is produced
from that stream with the Box-Muller transform so that a seed fully pins the
received vector regardless of numpy's internal normal sampler.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .gf2 import as_bits


@dataclass(frozen=True)
class ChannelParams:
    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InputError(f"sigma must be a positive finite number, got {self.sigma}")


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master_seed: int, *indices: int) -> int:
    """Deterministic child seed for the trial addressed by ``indices``.

    Uses ``SeedSequence(master_seed, spawn_key=indices)``, so distinct index
    tuples give statistically independent streams.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in indices))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal samples via Box-Muller on the generator's uniforms."""
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:size]


def bpsk_modulate(c) -> np.ndarray:
    """0 -> +1, 1 -> -1."""
    c = as_bits(c)
    return 1.0 - 2.0 * c.astype(np.float64)


def awgn_transmit(x, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x + params.sigma * gaussian(rng, x.size)


def llr_from_received(y, params: ChannelParams) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not np.isfinite(y).all():
        raise InputError("received samples must be finite")
    return 2.0 * y / params.sigma**2


def transmit_codeword(c, sigma: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Modulate, add noise, and return ``(received, llr)``."""
    params = ChannelParams(sigma)
    y = awgn_transmit(bpsk_modulate(c), params, rng)
    return y, llr_from_received(y, params)
