"""Bit-sequence ingestion: block packing and minimum-distance streams."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DistanceStream",
    "pack_blocks",
    "unpack_blocks",
    "distance_stream",
    "load_bits",
    "save_bits",
]

_TEXT_BYTES = np.frombuffer(b"01 \t\r\n", dtype=np.uint8)


@dataclass(frozen=True)
class DistanceStream:
    """Minimum match distances D_n for the test positions n = q+1 .. q+k."""

    values: np.ndarray
    q: int

    @property
    def k(self) -> int:
        return int(self.values.size)


def _as_bit_array(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.size and int(arr.max()) > 1:
        raise ValueError("bit sequence may contain only 0s and 1s")
    return arr


def pack_blocks(bits, l: int) -> np.ndarray:
    """Partition a bit sequence into non-overlapping l-bit block values.

    The first bit of a block is its most significant bit; trailing bits that
    do not fill a whole block are discarded.
    """
    if l < 1:
        raise ValueError(f"block width must be >= 1, got {l}")
    arr = _as_bit_array(bits)
    n_blocks = arr.size // l
    if n_blocks == 0:
        raise ValueError(f"need at least {l} bits to form a block, got {arr.size}")
    trimmed = arr[: n_blocks * l].reshape(n_blocks, l).astype(np.int64)
    weights = (np.int64(1) << np.arange(l - 1, -1, -1)).astype(np.int64)
    return trimmed @ weights


def unpack_blocks(blocks, l: int) -> np.ndarray:
    """Expand block values back into the bit sequence that produced them."""
    if l < 1:
        raise ValueError(f"block width must be >= 1, got {l}")
    arr = np.asarray(blocks, dtype=np.int64)
    if arr.size and (int(arr.min()) < 0 or int(arr.max()) >> l):
        raise ValueError(f"block values must lie in [0, 2^{l})")
    shifts = np.arange(l - 1, -1, -1)
    return ((arr[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def distance_stream(blocks, q: int, k: int) -> DistanceStream:
    """Distances to the most recent earlier occurrence of each test block.

    For n = q+1 .. q+k (1-indexed), D_n is the smallest i >= 1 with
    b_n == b_{n-i}, or n itself when the value has no earlier occurrence.
    Computed from a previous-occurrence table, vectorised as a grouped
    lookup over a stable sort by block value.
    """
    arr = np.asarray(blocks, dtype=np.int64)
    if q < 1:
        raise ValueError(f"initialisation count must be >= 1, got {q}")
    if k < 1:
        raise ValueError(f"test count must be >= 1, got {k}")
    if q + k > arr.size:
        raise ValueError(f"need {q + k} blocks, got {arr.size}")
    n = q + k
    arr = arr[:n]
    order = np.argsort(arr, kind="stable")
    prev = np.full(n, -1, dtype=np.int64)
    same = arr[order[1:]] == arr[order[:-1]]
    prev[order[1:][same]] = order[:-1][same]
    pos = np.arange(q, n, dtype=np.int64)
    prev_test = prev[q:]
    dist = pos - prev_test
    unseen = prev_test < 0
    dist[unseen] = pos[unseen] + 1
    return DistanceStream(values=dist, q=q)


def load_bits(path) -> np.ndarray:
    """Read a bit stream from a file, auto-detecting the format.

    A file made up solely of '0'/'1' characters and whitespace is read as
    text; anything else is treated as raw binary, most significant bit of
    each byte first.
    """
    data = Path(path).read_bytes()
    raw = np.frombuffer(data, dtype=np.uint8)
    if raw.size and np.isin(raw, _TEXT_BYTES).all() and np.isin(raw, _TEXT_BYTES[:2]).any():
        mask = (raw == ord("0")) | (raw == ord("1"))
        return (raw[mask] - ord("0")).astype(np.uint8)
    return np.unpackbits(raw)


def save_bits(path, bits, text: bool = False) -> None:
    """Write a bit stream as raw binary (MSB-first per byte) or '0'/'1' text.

    In binary mode the final byte is zero-padded when the bit count is not a
    multiple of eight.
    """
    arr = _as_bit_array(bits)
    if text:
        Path(path).write_bytes((arr + ord("0")).astype(np.uint8).tobytes())
    else:
        Path(path).write_bytes(np.packbits(arr).tobytes())
