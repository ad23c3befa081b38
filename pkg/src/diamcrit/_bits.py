"""Helpers for adjacency rows stored as Python ints (bit ``v`` set = neighbor ``v``)."""

import numpy as np


def iter_bits(x):
    """Yield set-bit positions of ``x`` in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_list(x):
    return list(iter_bits(x))


def lowest_bit(x):
    return (x & -x).bit_length() - 1


def mask_of(vertices):
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def row_to_array(row, n):
    """Boolean numpy vector of length ``n`` for an int row."""
    nbytes = (n + 7) // 8
    raw = np.frombuffer(row.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def array_to_row(arr):
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")
