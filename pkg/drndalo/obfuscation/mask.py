"""
Inversion masks: the per-branch inversion decisions of one obfuscation.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from drndalo.isa.program import Program

_HEADER_RE = re.compile(r'^#\s*n\s*=\s*(\d+)\s*$')


@dataclass(frozen=True)
class InversionMask:
    """
    Branch address -> inversion bit.

    Attributes:
        entries: One bit per conditional branch of the source program
        branch_count: Number of conditional branches n
    """
    entries: Dict[int, int] = field(default_factory=dict)
    branch_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'entries', dict(sorted(self.entries.items())))
        if self.branch_count != len(self.entries):
            raise ValueError(
                f"branch_count {self.branch_count} does not match {len(self.entries)} entries"
            )
        for address, bit in self.entries.items():
            if bit not in (0, 1):
                raise ValueError(f"Mask bit for 0x{address:x} must be 0 or 1, got {bit}")

    @classmethod
    def from_bits(cls, entries: Dict[int, int]) -> 'InversionMask':
        return cls(entries=dict(entries), branch_count=len(entries))

    @classmethod
    def zeros(cls, program: Program) -> 'InversionMask':
        """Mask that inverts nothing."""
        return cls.from_bits({address: 0 for address in program.branch_addresses()})

    def bit(self, address: int) -> int:
        """
        Raises:
            KeyError: If address is not a branch covered by the mask
        """
        return self.entries[address]

    def addresses(self) -> List[int]:
        return list(self.entries.keys())

    def bits(self) -> np.ndarray:
        """Bits as a uint8 vector in branch-address order."""
        return np.fromiter(self.entries.values(), dtype=np.uint8, count=self.branch_count)

    def set_fraction(self) -> float:
        return float(self.bits().mean()) if self.branch_count else 0.0

    def covers(self, program: Program) -> bool:
        """True when the mask has exactly one entry per branch of the program."""
        return list(self.entries.keys()) == program.branch_addresses()

    def to_text(self) -> str:
        lines = [f"# n={self.branch_count}"]
        lines.extend(f"0x{address:08x} {bit}" for address, bit in self.entries.items())
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'InversionMask':
        """
        Parse the `# n=<count>` / `0x<addr> <bit>` line format.

        Raises:
            ValueError: On malformed lines or a count that disagrees with the entries
        """
        declared = None
        entries: Dict[int, int] = {}
        for number, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            header = _HEADER_RE.match(line)
            if header:
                declared = int(header.group(1))
                continue
            if line.startswith('#'):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"Mask line {number}: expected '<addr> <bit>', got '{line}'")
            address, bit = int(parts[0], 0), int(parts[1])
            if address in entries:
                raise ValueError(f"Mask line {number}: duplicate address 0x{address:x}")
            entries[address] = bit
        if declared is not None and declared != len(entries):
            raise ValueError(f"Mask header declares n={declared} but has {len(entries)} entries")
        return cls.from_bits(entries)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text(), encoding='utf-8')

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'InversionMask':
        return cls.from_text(Path(path).read_text(encoding='utf-8'))
