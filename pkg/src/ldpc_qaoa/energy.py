"""Decoding cost function: violated parity checks plus LLR-weighted disagreements.

Bitstring indexing convention, used everywhere in the package: bit ``i`` of an
integer basis index is ``x_i`` (variable 0 is the least significant bit).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError
from .gf2 import LinearCode, ParityCheckMatrix, as_bits

MAX_TABLE_BITS = 24


@dataclass(frozen=True)
class DecodingHamiltonian:
    checks: tuple[tuple[int, ...], ...]
    llrs: np.ndarray

    def __post_init__(self):
        llrs = np.array(self.llrs, dtype=np.float64)
        if llrs.ndim != 1:
            raise InputError("LLRs must be a vector")
        if not np.isfinite(llrs).all():
            raise InputError("LLRs must be finite")
        n = llrs.size
        checks = tuple(tuple(int(i) for i in c) for c in self.checks)
        for c in checks:
            if not c or min(c) < 0 or max(c) >= n:
                raise InputError(f"check {c} is empty or out of range for n={n}")
        llrs.setflags(write=False)
        object.__setattr__(self, "llrs", llrs)
        object.__setattr__(self, "checks", checks)

    @property
    def n(self) -> int:
        return self.llrs.size

    @classmethod
    def from_matrix(cls, h, llr) -> "DecodingHamiltonian":
        rows = h.rows if isinstance(h, ParityCheckMatrix) else np.asarray(h)
        if rows.shape[1] != np.size(llr):
            raise InputError(f"LLR vector has length {np.size(llr)}, code length is {rows.shape[1]}")
        return cls(tuple(tuple(np.nonzero(r)[0]) for r in rows), llr)


def bits_to_spins(x) -> np.ndarray:
    return 1 - 2 * as_bits(x).astype(np.int8)


def spins_to_bits(z) -> np.ndarray:
    z = np.asarray(z)
    if not np.isin(z, (1, -1)).all():
        raise InputError("spins must be +1 or -1")
    return ((1 - z) // 2).astype(np.uint8)


def _spins(ham: DecodingHamiltonian, z) -> np.ndarray:
    z = np.asarray(z)
    if z.shape != (ham.n,):
        raise InputError(f"expected {ham.n} spins, got shape {z.shape}")
    return z


def parity_energy(ham: DecodingHamiltonian, z) -> float:
    z = _spins(ham, z)
    return float(sum(0.5 * (1 - np.prod(z[list(c)])) for c in ham.checks))


def channel_energy(ham: DecodingHamiltonian, z) -> float:
    z = _spins(ham, z)
    h = ham.llrs
    return float(np.sum(0.5 * np.abs(h) * (1 - np.sign(h) * z)))


def total_energy(ham: DecodingHamiltonian, x) -> float:
    z = bits_to_spins(as_bits(x, ham.n))
    return parity_energy(ham, z) + channel_energy(ham, z)


def index_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array whose row ``idx`` holds the bits of ``idx``."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def bits_to_index(x) -> int:
    x = as_bits(x)
    return int(np.sum(x.astype(np.int64) << np.arange(x.size)))


def index_to_bits(idx: int, n: int) -> np.ndarray:
    return ((int(idx) >> np.arange(n)) & 1).astype(np.uint8)


def build_energy_table(ham: DecodingHamiltonian) -> np.ndarray:
    """Total energy of every basis state, in index order (read-only array)."""
    n = ham.n
    if n > MAX_TABLE_BITS:
        raise CapacityError(f"energy table for n={n} exceeds the n <= {MAX_TABLE_BITS} limit")
    z = 1 - 2 * index_bits(n).astype(np.int8)
    table = np.zeros(1 << n)
    for c in ham.checks:
        table += 0.5 * (1 - np.prod(z[:, list(c)], axis=1))
    h = ham.llrs
    table += np.sum(0.5 * np.abs(h) * (1 - np.sign(h) * z), axis=1)
    table.setflags(write=False)
    return table


def brute_force_min(ham: DecodingHamiltonian) -> tuple[np.ndarray, float]:
    """Global minimizer over all 2**n bitstrings; lowest index wins ties."""
    table = build_energy_table(ham)
    idx = int(np.argmin(table))
    return index_to_bits(idx, ham.n), float(table[idx])


def ml_codeword(code: LinearCode, llr) -> np.ndarray:
    """Maximum-likelihood codeword: least total |LLR| disagreement.

    Codewords are scanned in lexicographic order so the first minimum wins.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size != code.n:
        raise InputError(f"LLR vector has length {llr.size}, code length is {code.n}")
    hard = (llr < 0).astype(np.uint8)
    cost = ((code.codewords != hard) * np.abs(llr)).sum(axis=1)
    return code.codewords[int(np.argmin(cost))].copy()
