"""
Runtime deobfuscation: rewrite every conditional branch into a sequence that
loads its inversion bit from a mask table in the data segment, materializes
the branch predicate, XORs the two and branches on the result.

Per branch the emitted sequence is:

    lui   t6, hi20(table + i)
    lbu   t6, lo12(table + i)(t6)
    <predicate of the original branch into t5>   # 1 or 2 instructions
    xor   t5, t5, t6
    bne   t5, zero, <target>

t5/t6 are reserved; programs that touch them are rejected.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from drndalo.config.isa_config import IsaConfig
from drndalo.errors import RuntimeDeobfError
from drndalo.isa.assembler import Statement, TextItem, layout
from drndalo.isa.instruction import BranchKind, Instruction, Kind, Opcode
from drndalo.isa.program import Program
from drndalo.obfuscation.mask import InversionMask

logger = logging.getLogger('drndalo.obfuscation')

REG_ZERO = 0
REG_PREDICATE = IsaConfig.lookup_register('t5')
REG_MASK = IsaConfig.lookup_register('t6')
RESERVED_REGISTERS = (REG_PREDICATE, REG_MASK)

MASK_TABLE_LABEL = '_mask_table'
DEFAULT_MASK_TABLE_BASE = 0x20000

# lui + lbu + xor; the final bne replaces the original branch
MASK_LOOKUP_COST = 3

PREDICATE_LENGTH: Dict[BranchKind, int] = {
    BranchKind.BLT: 1,
    BranchKind.BLTU: 1,
    BranchKind.BGE: 2,
    BranchKind.BGEU: 2,
    BranchKind.BEQ: 2,
    BranchKind.BNE: 2,
}


def expansion(kind: BranchKind) -> int:
    """Extra instructions one branch of this kind costs after the rewrite."""
    return MASK_LOOKUP_COST + PREDICATE_LENGTH[kind]


@dataclass(frozen=True)
class RuntimeDeobfResult:
    """
    Output of the runtime-deobfuscation rewrite.

    Attributes:
        program: Rewritten program
        table_base: Address of the mask table (None when there are no branches)
        expansion: Extra static instructions per rewritten branch, by kind
        static_growth: Text length after minus text length before
    """
    program: Program
    table_base: Optional[int]
    expansion: Dict[BranchKind, int] = field(default_factory=dict)
    static_growth: int = 0

    def to_dict(self) -> Dict:
        return {
            'table_base': self.table_base,
            'expansion': {kind.value: extra for kind, extra in self.expansion.items()},
            'static_growth': self.static_growth,
        }


def check_runtime_deobf(program: Program) -> None:
    """
    Raise if the program cannot be rewritten.

    Raises:
        RuntimeDeobfError: On use of t5/t6, auipc, or an existing mask-table label
    """
    for instr in program.text:
        used = set(instr.sources())
        dest = instr.destination()
        if dest is not None:
            used.add(dest)
        clash = used.intersection(RESERVED_REGISTERS)
        if clash:
            names = ', '.join(IsaConfig.register_name(r) for r in sorted(clash))
            raise RuntimeDeobfError(
                f"{instr.opcode.value} at 0x{instr.address:x} uses reserved scratch register(s) {names}"
            )
        if instr.kind is Kind.AUIPC:
            raise RuntimeDeobfError(
                f"auipc at 0x{instr.address:x} is position-dependent and cannot be relocated"
            )
    if MASK_TABLE_LABEL in program.labels:
        raise RuntimeDeobfError(f"Label '{MASK_TABLE_LABEL}' is reserved for the mask table")


def _predicate(instr: Instruction) -> List[Statement]:
    a, b, t = instr.rs1, instr.rs2, REG_PREDICATE
    kind = instr.branch_kind
    if kind is BranchKind.BLT:
        return [Statement(Opcode.SLT, rd=t, rs1=a, rs2=b)]
    if kind is BranchKind.BLTU:
        return [Statement(Opcode.SLTU, rd=t, rs1=a, rs2=b)]
    if kind is BranchKind.BGE:
        return [Statement(Opcode.SLT, rd=t, rs1=a, rs2=b), Statement(Opcode.XORI, rd=t, rs1=t, imm=1)]
    if kind is BranchKind.BGEU:
        return [Statement(Opcode.SLTU, rd=t, rs1=a, rs2=b), Statement(Opcode.XORI, rd=t, rs1=t, imm=1)]
    if kind is BranchKind.BEQ:
        return [Statement(Opcode.XOR, rd=t, rs1=a, rs2=b), Statement(Opcode.SLTIU, rd=t, rs1=t, imm=1)]
    return [Statement(Opcode.XOR, rd=t, rs1=a, rs2=b), Statement(Opcode.SLTU, rd=t, rs1=REG_ZERO, rs2=t)]


def _mask_lookup(address: int) -> List[Statement]:
    hi = ((address + 0x800) >> 12) & IsaConfig.UIMM20_MAX
    lo = address - (hi << 12)
    return [
        Statement(Opcode.LUI, rd=REG_MASK, imm=hi),
        Statement(Opcode.LBU, rd=REG_MASK, rs1=REG_MASK, imm=lo),
    ]


def _table_base(program: Program, new_end: int) -> int:
    if program.data or program.data_base:
        return (program.data_end + 3) & ~3
    return max(DEFAULT_MASK_TABLE_BASE, new_end)


def runtime_deobf(program: Program, mask: InversionMask) -> RuntimeDeobfResult:
    """
    Rewrite branches into mask-table lookups plus predicate XOR.

    Args:
        program: Program whose branches are inverted according to mask
        mask: One bit per branch of program

    Returns:
        RuntimeDeobfResult with the relocated program

    Raises:
        RuntimeDeobfError: If the program cannot be rewritten
        ValueError: If the mask does not cover the program's branches
    """
    if not mask.covers(program):
        raise ValueError("Mask does not cover exactly the program's branches")
    if mask.branch_count == 0:
        return RuntimeDeobfResult(program=program, table_base=None)
    check_runtime_deobf(program)

    new_end = program.end + 4 * sum(expansion(b.branch_kind) for b in program.branches())
    table_base = _table_base(program, new_end)
    slot = {address: i for i, address in enumerate(mask.addresses())}

    items: List[TextItem] = []
    new_address: Dict[int, int] = {}
    count = 0
    for instr in program.text:
        items.extend(sorted(program.labels_at(instr.address)))
        new_address[instr.address] = program.base + 4 * count
        if instr.is_branch:
            sequence = _mask_lookup(table_base + slot[instr.address])
            sequence += _predicate(instr)
            sequence.append(Statement(Opcode.XOR, rd=REG_PREDICATE, rs1=REG_PREDICATE, rs2=REG_MASK))
            sequence.append(Statement(Opcode.BNE, rs1=REG_PREDICATE, rs2=REG_ZERO, target=instr.target))
        else:
            sequence = [Statement(
                instr.opcode, rd=instr.rd, rs1=instr.rs1, rs2=instr.rs2,
                imm=instr.imm, target=instr.target,
            )]
        items.extend(sequence)
        count += len(sequence)
    items.extend(sorted(program.labels_at(program.end)))

    data_labels = dict(program.data_labels())
    if program.data or program.data_base:
        data = program.data + bytes(table_base - program.data_end) + bytes(mask.bits())
        data_base = program.data_base
        if data_base < new_end and program.base < data_base + len(data):
            raise RuntimeDeobfError(
                f"Rewritten text (ends 0x{new_end:x}) would overlap the data segment at 0x{data_base:x}"
            )
    else:
        data = bytes(mask.bits())
        data_base = table_base
    data_labels[MASK_TABLE_LABEL] = table_base

    rewritten = layout(
        items,
        base=program.base,
        data=data,
        data_base=data_base,
        data_labels=data_labels,
        entry=new_address.get(program.entry, program.entry),
    )

    kinds = {instr.branch_kind for instr in program.branches()}
    result = RuntimeDeobfResult(
        program=rewritten,
        table_base=table_base,
        expansion={kind: expansion(kind) for kind in sorted(kinds, key=lambda k: k.value)},
        static_growth=len(rewritten) - len(program),
    )
    logger.debug(
        f"Runtime deobfuscation: {mask.branch_count} branches, text {len(program)} -> {len(rewritten)}"
    )
    return result


def emit_runtime_deobf(program: Program, mask: InversionMask) -> Program:
    """Rewritten program only; see `runtime_deobf` for the report."""
    return runtime_deobf(program, mask).program
