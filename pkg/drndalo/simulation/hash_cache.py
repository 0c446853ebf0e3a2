"""
Direct-mapped single-bit cache of branch hash outputs.

One branch per line: index = (address >> 2) mod lines, tag = the remaining
word-address bits.
"""

from typing import Optional

import numpy as np


class HashCache:
    """Direct-mapped cache holding one hash bit per line."""

    def __init__(self, lines: int = 256):
        if lines < 1 or lines & (lines - 1):
            raise ValueError(f"Cache lines must be a power of two, got {lines}")
        self.lines = lines
        self._index_bits = lines.bit_length() - 1
        self.valid = np.zeros(lines, dtype=bool)
        self.tags = np.zeros(lines, dtype=np.int64)
        self.bits = np.zeros(lines, dtype=np.uint8)
        self.hits = 0
        self.misses = 0

    def split(self, address: int):
        """(index, tag) of a branch address."""
        word = address >> 2
        return word & (self.lines - 1), word >> self._index_bits

    def lookup(self, address: int) -> Optional[int]:
        """
        Cached bit for address, or None on a miss. Updates hit/miss counters.
        """
        index, tag = self.split(address)
        if self.valid[index] and self.tags[index] == tag:
            self.hits += 1
            return int(self.bits[index])
        self.misses += 1
        return None

    def fill(self, address: int, bit: int) -> None:
        index, tag = self.split(address)
        self.valid[index] = True
        self.tags[index] = tag
        self.bits[index] = bit

    def reset(self) -> None:
        self.valid[:] = False
        self.hits = 0
        self.misses = 0

    def __repr__(self) -> str:
        return f"HashCache(lines={self.lines}, hits={self.hits}, misses={self.misses})"
