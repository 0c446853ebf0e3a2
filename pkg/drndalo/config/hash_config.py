"""
Keyed-hash configuration: the obfuscation key, LFSR parameters and presets,
and the constants of the 64-bit mixing function.
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional

import numpy as np

logger = logging.getLogger('drndalo.config')

KEY_BITS = 64
KEY_MASK = (1 << KEY_BITS) - 1

_HEX_KEY_RE = re.compile(r'^(0x)?[0-9a-fA-F]{1,16}$')


# ---------------------------------------------------------------------------
# LFSR presets
# ---------------------------------------------------------------------------

# Taps are in shift-left form: the new low bit is parity(state & taps).
# The characteristic polynomial is x^n + sum of x^(n-1-i) over tap bits i.
LFSR_PRESETS: Dict[str, Dict[str, int]] = {
    # 16-cycle hash: x^15 + x^14 + 1
    'lfsr16': {'n': 15, 'k': 16, 'taps': 0x4001},
    # 8-cycle hash: x^7 + x^6 + 1
    'lfsr8': {'n': 7, 'k': 8, 'taps': 0x41},
}

DEFAULT_LFSR_PRESET = 'lfsr16'

# Widths too large for an exact period walk; maximal taps from published tables.
KNOWN_MAXIMAL_TAPS: Dict[int, int] = {
    24: 0x800043,                 # x^24 + x^23 + x^22 + x^17 + 1
    32: 0xE0000200,               # x^32 + x^22 + x^2 + x + 1
    64: 0x800000000000000D,       # x^64 + x^63 + x^61 + x^60 + 1
}

# Largest n whose period is checked by walking the full cycle.
EXACT_PERIOD_MAX_N = 20


# ---------------------------------------------------------------------------
# Mix64 constants (SplitMix64 finalizer)
# ---------------------------------------------------------------------------

MIX64_GOLDEN = 0x9E3779B97F4A7C15
MIX64_MUL1 = 0xBF58476D1CE4E5B9
MIX64_MUL2 = 0x94D049BB133111EB
MIX64_SHIFTS = (30, 27, 31)


@dataclass(frozen=True)
class ObfKey:
    """
    Secret program key.

    Attributes:
        bits: 64-bit unsigned key value
    """
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= KEY_MASK:
            raise ValueError(f"Key must fit in 64 bits, got {self.bits:#x}")

    @classmethod
    def from_hex(cls, text: str) -> 'ObfKey':
        """
        Parse a key given as up to 16 hex digits (optional 0x prefix).

        Raises:
            ValueError: If the text is not a 64-bit hex value
        """
        text = text.strip()
        if not _HEX_KEY_RE.match(text):
            raise ValueError(f"Key must be 16 hex digits, got '{text}'")
        return cls(int(text, 16))

    @classmethod
    def random(cls, rng: Optional[np.random.Generator] = None) -> 'ObfKey':
        rng = rng if rng is not None else np.random.default_rng()
        return cls(int(rng.integers(0, KEY_MASK, dtype=np.uint64, endpoint=True)))

    @property
    def hex(self) -> str:
        return f"{self.bits:016x}"

    def folded(self) -> int:
        """key XOR (key >> 32), the value mixed into LFSR seeds."""
        return self.bits ^ (self.bits >> 32)

    def __repr__(self) -> str:
        return f"ObfKey(***{self.hex[-4:]})"


@lru_cache(maxsize=None)
def _period(n: int, taps: int) -> int:
    mask = (1 << n) - 1
    state = 1
    for count in range(1, mask + 2):
        state = ((state << 1) | ((state & taps).bit_count() & 1)) & mask
        if state == 1:
            return count
    return 0


@dataclass(frozen=True)
class LfsrConfig:
    """
    Parameters of the Fibonacci LFSR hash.

    Attributes:
        n: Register count, 4..64
        k: Cycles the register runs per decision, k > n
        taps: n-bit tap mask (new low bit = parity(state & taps))
    """
    n: int
    k: int
    taps: int

    MIN_N = 4
    MAX_N = 64

    def __post_init__(self):
        if not self.MIN_N <= self.n <= self.MAX_N:
            raise ValueError(f"LFSR n must be in [{self.MIN_N}, {self.MAX_N}], got {self.n}")
        if self.k <= self.n:
            raise ValueError(f"LFSR k must exceed n (k={self.k}, n={self.n})")
        if self.taps == 0:
            raise ValueError("LFSR taps must be non-zero")
        if self.taps >> self.n:
            raise ValueError(f"LFSR taps {self.taps:#x} do not fit in {self.n} bits")

    @property
    def state_mask(self) -> int:
        return (1 << self.n) - 1

    @classmethod
    def from_preset(cls, preset_name: str = DEFAULT_LFSR_PRESET) -> 'LfsrConfig':
        """
        Get an LFSR configuration by preset name.

        Args:
            preset_name: 'lfsr16' or 'lfsr8'

        Raises:
            ValueError: If preset name not found
        """
        if preset_name not in LFSR_PRESETS:
            raise ValueError(
                f"Unknown LFSR preset '{preset_name}'. "
                f"Available: {list(LFSR_PRESETS.keys())}"
            )
        return cls(**LFSR_PRESETS[preset_name])

    def period(self) -> int:
        """Cycle length starting from state 1 (exact walk; only for n <= 20)."""
        if self.n > EXACT_PERIOD_MAX_N:
            raise ValueError(f"Exact period walk limited to n <= {EXACT_PERIOD_MAX_N}, got {self.n}")
        return _period(self.n, self.taps)

    def is_maximal(self) -> Optional[bool]:
        """
        True if the taps give a maximal-length sequence, None if unverifiable.
        """
        if self.n <= EXACT_PERIOD_MAX_N:
            return self.period() == self.state_mask
        known = KNOWN_MAXIMAL_TAPS.get(self.n)
        if known is None:
            return None
        return known == self.taps

    def validate_maximal(self) -> bool:
        """
        Check the taps and log a warning when they are not maximal-length.

        Returns:
            True only when the taps are verified maximal
        """
        maximal = self.is_maximal()
        if maximal is None:
            logger.warning(f"Cannot verify LFSR taps {self.taps:#x} for n={self.n}")
            return False
        if not maximal:
            logger.warning(f"LFSR taps {self.taps:#x} are not maximal-length for n={self.n}")
        return maximal
