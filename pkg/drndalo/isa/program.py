"""
Program container: text, labels, data segment and entry point.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from drndalo.isa.instruction import Instruction, Kind


@dataclass(frozen=True)
class Program:
    """
    An assembled program.

    Attributes:
        text: Instructions at base, base+4, base+8, ...
        labels: Label name -> address (text or data)
        data: Initial data segment bytes
        data_base: Address of data[0]
        entry: Address execution starts at
        base: Address of text[0]
    """
    text: Tuple[Instruction, ...] = ()
    labels: Dict[str, int] = field(default_factory=dict)
    data: bytes = b''
    data_base: int = 0
    entry: int = 0
    base: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'text', tuple(self.text))
        object.__setattr__(self, 'labels', dict(self.labels))
        object.__setattr__(self, 'data', bytes(self.data))
        self._validate()

    def _validate(self) -> None:
        if self.base % 4 != 0:
            raise ValueError(f"Text base must be 4-aligned, got 0x{self.base:x}")
        for i, instr in enumerate(self.text):
            expected = self.base + 4 * i
            if instr.address != expected:
                raise ValueError(
                    f"Instruction {i} is at 0x{instr.address:x}, expected 0x{expected:x}"
                )
            if instr.kind in (Kind.COND_BRANCH, Kind.JAL):
                if instr.target is None or instr.target not in self.labels:
                    raise ValueError(
                        f"Unresolved target '{instr.target}' at 0x{instr.address:x}"
                    )
                if self.labels[instr.target] != instr.target_address:
                    raise ValueError(
                        f"Offset of {instr.opcode.value} at 0x{instr.address:x} does not "
                        f"match label '{instr.target}'"
                    )
                if not self.is_text_address(instr.target_address, allow_end=True):
                    raise ValueError(
                        f"Target '{instr.target}' of 0x{instr.address:x} is not a text address"
                    )
        if self.data and self.text and self.data_base < self.end and self.base < self.data_end:
            raise ValueError("Data segment overlaps the text segment")

    def __len__(self) -> int:
        return len(self.text)

    @property
    def end(self) -> int:
        """First address past the text segment."""
        return self.base + 4 * len(self.text)

    @property
    def data_end(self) -> int:
        return self.data_base + len(self.data)

    def is_text_address(self, address: int, allow_end: bool = False) -> bool:
        if address % 4 != 0:
            return False
        limit = self.end + (4 if allow_end else 0)
        return self.base <= address < limit

    def fetch(self, pc: int) -> Optional[Instruction]:
        """Instruction at pc, or None if pc is not a text address."""
        if pc % 4 != 0 or not self.base <= pc < self.end:
            return None
        return self.text[(pc - self.base) >> 2]

    def branches(self) -> List[Instruction]:
        """Conditional branches in address order."""
        return [instr for instr in self.text if instr.is_branch]

    def branch_addresses(self) -> List[int]:
        return [instr.address for instr in self.text if instr.is_branch]

    def labels_at(self, address: int) -> List[str]:
        return [name for name, addr in self.labels.items() if addr == address]

    def data_labels(self) -> Dict[str, int]:
        """Labels that point into the data segment rather than the text."""
        return {
            name: addr for name, addr in self.labels.items()
            if not self.is_text_address(addr, allow_end=True)
        }

    def with_text(self, text: Iterable[Instruction]) -> 'Program':
        """Same program with a replacement text of identical layout."""
        return replace(self, text=tuple(text))

    def differing_branches(self, other: 'Program') -> List[int]:
        """
        Addresses whose branch opcodes differ between two same-topology programs.

        Raises:
            ValueError: If the programs do not share a layout
        """
        if len(self.text) != len(other.text) or self.base != other.base:
            raise ValueError("Programs do not share the same topology")
        return [
            a.address for a, b in zip(self.text, other.text)
            if a.is_branch and a.opcode != b.opcode
        ]

    def read_word(self, address: int) -> int:
        """Little-endian word from the initial data segment."""
        offset = address - self.data_base
        if offset < 0 or offset + 4 > len(self.data):
            raise ValueError(f"0x{address:x} is outside the data segment")
        return int.from_bytes(self.data[offset:offset + 4], 'little')


def same_topology(programs: Sequence[Program]) -> bool:
    """True when all programs share addresses, labels and branch targets."""
    if not programs:
        return True
    first = programs[0]
    for other in programs[1:]:
        if len(other.text) != len(first.text) or other.labels != first.labels:
            return False
        for a, b in zip(first.text, other.text):
            if a.address != b.address or a.target != b.target or a.kind != b.kind:
                return False
    return True
