"""
Basic-block recovery for branch windows.

Leaders are the entry point, the first instruction, every branch/jal target
inside the text, and every instruction following a control transfer.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from drndalo.isa.instruction import Instruction
from drndalo.isa.program import Program


@dataclass(frozen=True)
class BasicBlock:
    start: int
    instructions: Tuple[Instruction, ...]

    @property
    def terminator(self) -> Instruction:
        return self.instructions[-1]

    @property
    def is_branching(self) -> bool:
        """True for a block ending in a conditional branch."""
        return self.terminator.is_branch


def find_leaders(program: Program) -> List[int]:
    if not program.text:
        return []
    leaders = {program.base}
    if program.fetch(program.entry) is not None:
        leaders.add(program.entry)
    for instr in program.text:
        target = instr.target_address
        if target is not None and program.fetch(target) is not None:
            leaders.add(target)
        if instr.is_control_transfer and instr.address + 4 < program.end:
            leaders.add(instr.address + 4)
    return sorted(leaders)


def basic_blocks(program: Program) -> List[BasicBlock]:
    """Blocks in address order covering the whole text."""
    leaders = find_leaders(program)
    blocks = []
    for start, stop in zip(leaders, leaders[1:] + [program.end]):
        first = (start - program.base) >> 2
        last = (stop - program.base) >> 2
        blocks.append(BasicBlock(start=start, instructions=program.text[first:last]))
    return blocks


def branch_windows(program: Program, window: int) -> Dict[int, Tuple[Instruction, ...]]:
    """
    Window of the last `window` instructions of each branching block.

    Returns:
        Branch address -> instructions oldest first, ending with the branch
    """
    if window < 1:
        raise ValueError(f"Window size must be >= 1, got {window}")
    return {
        block.terminator.address: block.instructions[-window:]
        for block in basic_blocks(program)
        if block.is_branching
    }
