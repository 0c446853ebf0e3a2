"""
Pipeline simulator configuration.

One SimConfig selects a deobfuscation design and its cost-model parameters.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

from drndalo.config.hash_config import ObfKey

if TYPE_CHECKING:
    from drndalo.obfuscation.keyed_hash import HashScheme
    from drndalo.obfuscation.mask import InversionMask


class Design(str, Enum):
    """Processor designs; values are the CLI spellings."""
    BASELINE = 'baseline'
    STALLED_HASH = 'stall'
    CACHED_HASH = 'cache'
    MASK_BASED = 'mask'

    @property
    def keyed(self) -> bool:
        return self in (Design.STALLED_HASH, Design.CACHED_HASH)


@dataclass(frozen=True)
class SimConfig:
    """
    Cost-model parameters for one simulation.

    Attributes:
        design: Processor design
        hash_cycles: Hash latency k in cycles
        cache_lines: Lines of the direct-mapped hash cache (power of two)
        branch_penalty: Cycles charged per taken conditional branch
        decode_to_execute_overlap: Hash cycles hidden by the pipeline front end
        scheme: Keyed hash (stall and cache designs)
        key: Program key (stall and cache designs)
        mask: Inversion mask (mask design)
        max_cycles: Cycle bound after which a run is reported as timed out
    """
    design: Design = Design.BASELINE
    hash_cycles: int = 16
    cache_lines: int = 256
    branch_penalty: int = 2
    decode_to_execute_overlap: int = 1
    scheme: Optional['HashScheme'] = None
    key: Optional[ObfKey] = None
    mask: Optional['InversionMask'] = None
    max_cycles: int = 10_000_000

    def __post_init__(self):
        object.__setattr__(self, 'design', Design(self.design))
        if self.hash_cycles < 1:
            raise ValueError(f"hash_cycles must be >= 1, got {self.hash_cycles}")
        if self.cache_lines < 1 or self.cache_lines & (self.cache_lines - 1):
            raise ValueError(f"cache_lines must be a power of two, got {self.cache_lines}")
        if self.branch_penalty < 0:
            raise ValueError(f"branch_penalty must be >= 0, got {self.branch_penalty}")
        if self.decode_to_execute_overlap < 0:
            raise ValueError(
                f"decode_to_execute_overlap must be >= 0, got {self.decode_to_execute_overlap}"
            )
        if self.max_cycles < 1:
            raise ValueError(f"max_cycles must be >= 1, got {self.max_cycles}")
        if self.design.keyed and (self.scheme is None or self.key is None):
            raise ValueError(f"Design '{self.design.value}' requires a hash scheme and a key")
        if self.design is Design.MASK_BASED and self.mask is None:
            raise ValueError("Design 'mask' requires an inversion mask")

    @property
    def stall_per_branch(self) -> int:
        """Stall charged per hash evaluation: max(0, k - overlap)."""
        return max(0, self.hash_cycles - self.decode_to_execute_overlap)

    def with_design(self, design: Design, **changes) -> 'SimConfig':
        return replace(self, design=design, **changes)

    def __repr__(self) -> str:
        return (
            f"SimConfig(design={self.design.value}, hash_cycles={self.hash_cycles}, "
            f"cache_lines={self.cache_lines}, branch_penalty={self.branch_penalty}, "
            f"overlap={self.decode_to_execute_overlap}, scheme={self.scheme!r}, "
            f"key={self.key!r}, max_cycles={self.max_cycles})"
        )
