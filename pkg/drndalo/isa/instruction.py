"""
Instruction model for the RV32I subset.

Instructions are immutable records carrying their byte address. Branches and
jal also keep the label they target; their immediate is the resolved
pc-relative offset.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple

from drndalo.config.isa_config import NUM_REGISTERS


class Kind(str, Enum):
    ARITH_REG = 'arith-reg'
    ARITH_IMM = 'arith-imm'
    LOAD = 'load'
    STORE = 'store'
    LUI = 'lui'
    AUIPC = 'auipc'
    JAL = 'jal'
    JALR = 'jalr'
    COND_BRANCH = 'cond-branch'
    ECALL = 'ecall'


class Opcode(str, Enum):
    ADD = 'add'
    SUB = 'sub'
    AND = 'and'
    OR = 'or'
    XOR = 'xor'
    SLT = 'slt'
    SLTU = 'sltu'
    SLLI = 'slli'
    SRLI = 'srli'
    SRAI = 'srai'
    ADDI = 'addi'
    ANDI = 'andi'
    ORI = 'ori'
    XORI = 'xori'
    SLTI = 'slti'
    SLTIU = 'sltiu'
    LW = 'lw'
    LB = 'lb'
    LBU = 'lbu'
    SW = 'sw'
    SB = 'sb'
    LUI = 'lui'
    AUIPC = 'auipc'
    JAL = 'jal'
    JALR = 'jalr'
    BEQ = 'beq'
    BNE = 'bne'
    BLT = 'blt'
    BGE = 'bge'
    BLTU = 'bltu'
    BGEU = 'bgeu'
    ECALL = 'ecall'


# Stable ordering used for one-hot encodings.
OPCODE_INDEX: Dict[Opcode, int] = {op: i for i, op in enumerate(Opcode)}

OPCODE_KIND: Dict[Opcode, Kind] = {
    **{op: Kind.ARITH_REG for op in (Opcode.ADD, Opcode.SUB, Opcode.AND, Opcode.OR,
                                     Opcode.XOR, Opcode.SLT, Opcode.SLTU)},
    **{op: Kind.ARITH_IMM for op in (Opcode.SLLI, Opcode.SRLI, Opcode.SRAI, Opcode.ADDI,
                                     Opcode.ANDI, Opcode.ORI, Opcode.XORI, Opcode.SLTI,
                                     Opcode.SLTIU)},
    **{op: Kind.LOAD for op in (Opcode.LW, Opcode.LB, Opcode.LBU)},
    **{op: Kind.STORE for op in (Opcode.SW, Opcode.SB)},
    Opcode.LUI: Kind.LUI,
    Opcode.AUIPC: Kind.AUIPC,
    Opcode.JAL: Kind.JAL,
    Opcode.JALR: Kind.JALR,
    **{op: Kind.COND_BRANCH for op in (Opcode.BEQ, Opcode.BNE, Opcode.BLT, Opcode.BGE,
                                       Opcode.BLTU, Opcode.BGEU)},
    Opcode.ECALL: Kind.ECALL,
}

SHIFT_OPCODES: FrozenSet[Opcode] = frozenset({Opcode.SLLI, Opcode.SRLI, Opcode.SRAI})


class BranchKind(str, Enum):
    """Conditional branch kinds; values match the branch mnemonics."""
    BEQ = 'beq'
    BNE = 'bne'
    BLT = 'blt'
    BGE = 'bge'
    BLTU = 'bltu'
    BGEU = 'bgeu'

    @property
    def opcode(self) -> Opcode:
        return Opcode(self.value)

    def invert(self) -> 'BranchKind':
        """Logical negation pair: BEQ<->BNE, BLT<->BGE, BLTU<->BGEU."""
        return _INVERSE[self]


_INVERSE: Dict[BranchKind, BranchKind] = {
    BranchKind.BEQ: BranchKind.BNE,
    BranchKind.BNE: BranchKind.BEQ,
    BranchKind.BLT: BranchKind.BGE,
    BranchKind.BGE: BranchKind.BLT,
    BranchKind.BLTU: BranchKind.BGEU,
    BranchKind.BGEU: BranchKind.BLTU,
}


@dataclass(frozen=True)
class Instruction:
    """
    One addressed instruction.

    Attributes:
        address: Byte address, 4-aligned
        opcode: Mnemonic
        rd, rs1, rs2: Register indices (0 when the format has no such operand)
        imm: Signed immediate; for branches and jal the resolved pc-relative offset
        target: Label referenced by branches and jal
    """
    address: int
    opcode: Opcode
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0
    target: Optional[str] = None

    def __post_init__(self):
        if self.address % 4 != 0 or self.address < 0:
            raise ValueError(f"Instruction address must be 4-aligned, got 0x{self.address:x}")
        for name in ('rd', 'rs1', 'rs2'):
            reg = getattr(self, name)
            if not 0 <= reg < NUM_REGISTERS:
                raise ValueError(f"{name} must be in 0..31, got {reg}")
        if self.kind is Kind.COND_BRANCH:
            if self.target is None:
                raise ValueError(f"{self.opcode.value} at 0x{self.address:x} has no target label")
            if self.imm % 2 != 0:
                raise ValueError(f"Branch offset must be even, got {self.imm}")

    @property
    def kind(self) -> Kind:
        return OPCODE_KIND[self.opcode]

    @property
    def is_branch(self) -> bool:
        """True for conditional branches only."""
        return self.kind is Kind.COND_BRANCH

    @property
    def is_control_transfer(self) -> bool:
        return self.kind in (Kind.COND_BRANCH, Kind.JAL, Kind.JALR)

    @property
    def branch_kind(self) -> BranchKind:
        if not self.is_branch:
            raise ValueError(f"{self.opcode.value} is not a conditional branch")
        return BranchKind(self.opcode.value)

    @property
    def target_address(self) -> Optional[int]:
        """Absolute target of a branch or jal."""
        if self.kind in (Kind.COND_BRANCH, Kind.JAL):
            return self.address + self.imm
        return None

    def sources(self) -> Tuple[int, ...]:
        """Registers read by this instruction."""
        kind = self.kind
        if kind in (Kind.ARITH_REG, Kind.STORE, Kind.COND_BRANCH):
            return (self.rs1, self.rs2)
        if kind in (Kind.ARITH_IMM, Kind.LOAD, Kind.JALR):
            return (self.rs1,)
        return ()

    def destination(self) -> Optional[int]:
        """Register written by this instruction, if any."""
        if self.kind in (Kind.STORE, Kind.COND_BRANCH, Kind.ECALL):
            return None
        return self.rd

    def with_opcode(self, opcode: Opcode) -> 'Instruction':
        return replace(self, opcode=opcode)


def invert_branch(instruction: Instruction) -> Instruction:
    """
    Replace a conditional branch by its logical negation.

    Operands, target and address are preserved.

    Args:
        instruction: A conditional branch

    Returns:
        The inverted branch

    Raises:
        ValueError: If the instruction is not a conditional branch
    """
    return instruction.with_opcode(instruction.branch_kind.invert().opcode)
