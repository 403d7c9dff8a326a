"""Bit packing helpers: qubit ``q`` lives in word ``q >> 6``, bit ``q & 63`` (little-endian)."""

from __future__ import annotations

import numpy as np

WORD = 64


def n_words(n: int) -> int:
    return max(1, (n + WORD - 1) // WORD)


def pack(bits: np.ndarray, n: int | None = None) -> np.ndarray:
    """Pack a bool array of shape (..., n) into uint64 words of shape (..., n_words)."""
    bits = np.asarray(bits, dtype=bool)
    if n is None:
        n = bits.shape[-1]
    w = n_words(n)
    pad = w * WORD - bits.shape[-1]
    if pad:
        widths = [(0, 0)] * (bits.ndim - 1) + [(0, pad)]
        bits = np.pad(bits, widths)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    raw = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return raw[..., :n].astype(bool)


def popcount(words: np.ndarray, axis: int = -1) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=axis, dtype=np.int64)


def get_bit(words: np.ndarray, q: int) -> np.ndarray:
    """Bit ``q`` of every row of a (rows, W) word array, as uint64 0/1."""
    return (words[..., q >> 6] >> np.uint64(q & 63)) & np.uint64(1)


def flip_bits(words: np.ndarray, q: int, mask: np.ndarray) -> None:
    """XOR ``mask`` (uint64 0/1 per row) into bit ``q`` of each row, in place."""
    words[..., q >> 6] ^= mask << np.uint64(q & 63)


def from_indices(n: int, indices) -> np.ndarray:
    bits = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            raise IndexError(f"qubit index out of range for n={n}")
        # XOR semantics so that repeated indices cancel, as for Pauli products
        np.bitwise_xor.at(bits, idx, True)
    return pack(bits, n)


def to_indices(words: np.ndarray, n: int) -> list[int]:
    return np.flatnonzero(unpack(words, n)).tolist()


def gf2_rank(rows: np.ndarray) -> int:
    """Rank over F2 of a packed (rows, W) matrix."""
    m = np.array(rows, dtype=np.uint64, copy=True)
    n_rows, w = m.shape
    rank = 0
    for word in range(w):
        for bit in range(WORD):
            if rank == n_rows:
                return rank
            col = (m[rank:, word] >> np.uint64(bit)) & np.uint64(1)
            nz = np.flatnonzero(col)
            if nz.size == 0:
                continue
            p = rank + nz[0]
            if p != rank:
                m[[rank, p]] = m[[p, rank]]
            below = rank + 1 + np.flatnonzero((m[rank + 1:, word] >> np.uint64(bit)) & np.uint64(1))
            if below.size:
                m[below] ^= m[rank]
            rank += 1
    return rank
