"""
Keyed 1-bit branch-inversion decisions.

Two keyed functions of (branch address, key):
    - a Fibonacci LFSR seeded from address XOR folded key, run for k cycles
    - a SplitMix64-style avalanche mix (non-cryptographic stand-in for a keyed hash)

plus a mask-backed scheme that reads stored decisions instead of hashing.
All schemes share the `HashScheme.decide(address, key)` interface.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from drndalo.config.hash_config import (
    KEY_MASK,
    MIX64_GOLDEN,
    MIX64_MUL1,
    MIX64_MUL2,
    MIX64_SHIFTS,
    LfsrConfig,
    ObfKey,
)
from drndalo.obfuscation.mask import InversionMask

_S1, _S2, _S3 = MIX64_SHIFTS


def lfsr_bit(cfg: LfsrConfig, key: ObfKey, address: int) -> int:
    """
    LFSR inversion decision for one branch.

    The seed is the low n bits of address ^ key ^ (key >> 32), with the
    all-zero lock-up state replaced by all ones. The register then runs
    exactly k cycles and its low bit is the decision.

    Args:
        cfg: LFSR parameters
        key: Program key
        address: Branch address

    Returns:
        0 or 1
    """
    mask = cfg.state_mask
    state = (address ^ key.folded()) & mask
    if state == 0:
        state = mask
    taps = cfg.taps
    for _ in range(cfg.k):
        state = ((state << 1) | ((state & taps).bit_count() & 1)) & mask
    return state & 1


def _fmix(x: int) -> int:
    x ^= x >> _S1
    x = (x * MIX64_MUL1) & KEY_MASK
    x ^= x >> _S2
    x = (x * MIX64_MUL2) & KEY_MASK
    x ^= x >> _S3
    return x


def mix64(key: ObfKey, address: int) -> int:
    """Full 64-bit keyed mix of an address."""
    inner = _fmix((address + MIX64_GOLDEN) & KEY_MASK)
    return _fmix(key.bits ^ inner)


def mix64_bit(key: ObfKey, address: int) -> int:
    """Low bit of the keyed 64-bit mix."""
    return mix64(key, address) & 1


def _fmix_array(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(_S1))
    x = x * np.uint64(MIX64_MUL1)
    x = x ^ (x >> np.uint64(_S2))
    x = x * np.uint64(MIX64_MUL2)
    return x ^ (x >> np.uint64(_S3))


def mix64_array(keys: np.ndarray, addresses: np.ndarray) -> np.ndarray:
    """
    Vectorized `mix64` over broadcastable arrays of keys and addresses.

    Agrees bit-for-bit with the scalar function; uint64 arithmetic wraps.

    Returns:
        uint64 array of mixed values
    """
    keys = np.asarray(keys, dtype=np.uint64)
    addresses = np.asarray(addresses, dtype=np.uint64)
    with np.errstate(over='ignore'):
        inner = _fmix_array(addresses + np.uint64(MIX64_GOLDEN))
        return _fmix_array(keys ^ inner)


def mix64_bits(keys: np.ndarray, addresses: np.ndarray) -> np.ndarray:
    """Vectorized `mix64_bit`, returned as uint8."""
    return (mix64_array(keys, addresses) & np.uint64(1)).astype(np.uint8)


class HashScheme(ABC):
    """A branch-inversion decision function."""

    name: str = ''
    keyed: bool = True

    @abstractmethod
    def decide(self, address: int, key: Optional[ObfKey]) -> int:
        """Inversion bit for the branch at address."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class LfsrHash(HashScheme):
    """LFSR-based decision (the hardware-friendly hash)."""

    name = 'lfsr'

    def __init__(self, config: Optional[LfsrConfig] = None):
        self.config = config if config is not None else LfsrConfig.from_preset()
        self.config.validate_maximal()

    def decide(self, address: int, key: Optional[ObfKey]) -> int:
        if key is None:
            raise ValueError("LFSR scheme requires a key")
        return lfsr_bit(self.config, key, address)

    def __repr__(self) -> str:
        c = self.config
        return f"LfsrHash(n={c.n}, k={c.k}, taps={c.taps:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LfsrHash) and other.config == self.config

    def __hash__(self) -> int:
        return hash(('lfsr', self.config))


class Mix64Hash(HashScheme):
    """64-bit avalanche mix decision."""

    name = 'mix64'

    def decide(self, address: int, key: Optional[ObfKey]) -> int:
        if key is None:
            raise ValueError("Mix64 scheme requires a key")
        return mix64_bit(key, address)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mix64Hash)

    def __hash__(self) -> int:
        return hash('mix64')


class MaskHash(HashScheme):
    """Decisions read from a stored inversion mask; the key is ignored."""

    name = 'mask'
    keyed = False

    def __init__(self, mask: InversionMask):
        self.mask = mask

    def decide(self, address: int, key: Optional[ObfKey] = None) -> int:
        return self.mask.bit(address)

    def __repr__(self) -> str:
        return f"MaskHash(n={self.mask.branch_count})"


SCHEME_NAMES = ('lfsr', 'mix64')


def scheme_from_name(name: str, lfsr: Optional[LfsrConfig] = None) -> HashScheme:
    """
    Build a keyed scheme by name.

    Args:
        name: 'lfsr' or 'mix64'
        lfsr: LFSR parameters for the 'lfsr' scheme (default preset otherwise)

    Raises:
        ValueError: If the name is unknown
    """
    if name == 'lfsr':
        return LfsrHash(lfsr)
    if name == 'mix64':
        return Mix64Hash()
    raise ValueError(f"Unknown hash scheme '{name}'. Available: {list(SCHEME_NAMES)}")
