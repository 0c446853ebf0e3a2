"""
Configuration tables for the RV32I subset.

Register naming, immediate ranges, the bare-metal ecall ABI and the default
memory layout used when a program is loaded into a machine.
"""

from typing import Dict, List

# ABI names indexed by register number.
ABI_NAMES: List[str] = [
    'zero', 'ra', 'sp', 'gp', 'tp', 't0', 't1', 't2',
    's0', 's1', 'a0', 'a1', 'a2', 'a3', 'a4', 'a5',
    'a6', 'a7', 's2', 's3', 's4', 's5', 's6', 's7',
    's8', 's9', 's10', 's11', 't3', 't4', 't5', 't6',
]

# Every accepted spelling -> register index: x0..x31, ABI names, plus 'fp' for s0.
REGISTERS: Dict[str, int] = {
    **{f'x{i}': i for i in range(32)},
    **{name: i for i, name in enumerate(ABI_NAMES)},
    'fp': 8,
}

NUM_REGISTERS = 32
# Mnemonics of the supported RV32I subset
NUM_OPCODES = 32
XLEN_MASK = 0xFFFFFFFF


class IsaConfig:
    """Constants shared by the assembler, the machine and the transforms."""

    # Immediate ranges
    IMM12_MIN = -2048
    IMM12_MAX = 2047
    SHAMT_MAX = 31
    UIMM20_MAX = 0xFFFFF

    # ecall ABI (a7 selects the service)
    SYSCALL_EXIT = 93
    SYSCALL_PUTCHAR = 64

    # Memory layout
    DEFAULT_TEXT_BASE = 0x0
    DEFAULT_STACK_TOP = 0x80000
    DEFAULT_STACK_SIZE = 0x1000

    # Data label that receives the attack harness's input word
    INPUT_LABEL = 'input'

    @classmethod
    def lookup_register(cls, name: str) -> int:
        """
        Resolve a register spelling to its index.

        Args:
            name: 'x5', 't0', 'zero', ...

        Returns:
            Register index 0..31

        Raises:
            ValueError: If the name is not a register
        """
        reg = REGISTERS.get(name.strip().lower())
        if reg is None:
            raise ValueError(f"Unknown register '{name}'")
        return reg

    @classmethod
    def register_name(cls, index: int) -> str:
        """ABI name used when printing listings."""
        return ABI_NAMES[index]
