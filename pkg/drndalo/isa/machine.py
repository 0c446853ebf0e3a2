"""
Single-step architectural semantics for the RV32I subset.

`execute()` retires one instruction and reports its architectural effect;
the pipeline simulator drives it with an optional branch-outcome flip, which
is how keyed deobfuscation XORs the hash bit into the branch signal.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from drndalo.config.isa_config import XLEN_MASK, IsaConfig
from drndalo.errors import Trap
from drndalo.isa.instruction import BranchKind, Instruction, Kind, Opcode
from drndalo.isa.program import Program

REG_SP = 2
REG_A0 = 10
REG_A7 = 17


def to_signed(value: int) -> int:
    value &= XLEN_MASK
    return value - (1 << 32) if value & 0x80000000 else value


def branch_taken(kind: BranchKind, v1: int, v2: int) -> bool:
    """
    Evaluate a conditional branch on two register values.

    Values may be given signed or unsigned; both are reduced to 32 bits first.
    """
    u1, u2 = v1 & XLEN_MASK, v2 & XLEN_MASK
    if kind is BranchKind.BEQ:
        return u1 == u2
    if kind is BranchKind.BNE:
        return u1 != u2
    if kind is BranchKind.BLT:
        return to_signed(u1) < to_signed(u2)
    if kind is BranchKind.BGE:
        return to_signed(u1) >= to_signed(u2)
    if kind is BranchKind.BLTU:
        return u1 < u2
    return u1 >= u2


@dataclass
class MachineState:
    """
    Mutable architectural state of one execution.

    Attributes:
        pc: Program counter
        regs: 32 unsigned register values, regs[0] is always 0
        mem: Sparse byte map
        mapped: Half-open address ranges loads and stores may touch
        halted: Set by the exit ecall
        exit_code: a0 at the exit ecall
        output: Bytes written through the putchar ecall
    """
    pc: int = 0
    regs: List[int] = field(default_factory=lambda: [0] * 32)
    mem: Dict[int, int] = field(default_factory=dict)
    mapped: List[Tuple[int, int]] = field(default_factory=list)
    halted: bool = False
    exit_code: int = 0
    output: bytearray = field(default_factory=bytearray)

    @classmethod
    def for_program(
        cls,
        program: Program,
        stack_top: int = IsaConfig.DEFAULT_STACK_TOP,
        stack_size: int = IsaConfig.DEFAULT_STACK_SIZE,
    ) -> 'MachineState':
        """
        Initial state: data segment loaded, sp at the top of the stack region, pc at entry.
        """
        state = cls(pc=program.entry)
        for offset, byte in enumerate(program.data):
            state.mem[program.data_base + offset] = byte
        if program.data:
            state.mapped.append((program.data_base, program.data_end))
        state.mapped.append((stack_top - stack_size, stack_top))
        state.regs[REG_SP] = stack_top
        return state

    def is_mapped(self, address: int, size: int) -> bool:
        return any(lo <= address and address + size <= hi for lo, hi in self.mapped)

    def load(self, address: int, size: int, pc: int) -> int:
        self._check_access(address, size, pc, 'load')
        return int.from_bytes(bytes(self.mem.get(address + i, 0) for i in range(size)), 'little')

    def store(self, address: int, size: int, value: int, pc: int) -> None:
        self._check_access(address, size, pc, 'store')
        for i, byte in enumerate((value & ((1 << (8 * size)) - 1)).to_bytes(size, 'little')):
            self.mem[address + i] = byte

    def write_word(self, address: int, value: int) -> None:
        """Store outside of execution (no pc to blame); still requires mapped memory."""
        self.store(address, 4, value, self.pc)

    def set_reg(self, rd: int, value: int) -> None:
        if rd != 0:
            self.regs[rd] = value & XLEN_MASK

    def _check_access(self, address: int, size: int, pc: int, what: str) -> None:
        if address % size != 0:
            raise Trap(pc, f"misaligned {what} at 0x{address:08x}")
        if not self.is_mapped(address, size):
            raise Trap(pc, f"{what} outside mapped memory at 0x{address:08x}")


@dataclass(frozen=True)
class Retired:
    """Architectural effect of one retired instruction."""
    pc: int
    instruction: Instruction
    rd: Optional[int]
    value: Optional[int]
    taken: bool = False


def execute(state: MachineState, program: Program, flip: bool = False) -> Retired:
    """
    Retire the instruction at state.pc.

    Args:
        state: Machine state, mutated in place
        program: Program providing the text
        flip: XOR applied to a conditional branch outcome

    Returns:
        The retired instruction's effect

    Raises:
        Trap: On a fetch from a non-text address, an unmapped or misaligned
            data access, or an unknown ecall service
    """
    if state.halted:
        raise Trap(state.pc, "machine is halted")
    instr = program.fetch(state.pc)
    if instr is None:
        raise Trap(state.pc, "fetch from non-text address")
    handler = _HANDLERS[instr.kind]
    rd, value, next_pc, taken = handler(state, instr, flip)
    if rd is not None:
        state.set_reg(rd, value)
        if rd == 0:
            rd, value = None, None
        else:
            value = state.regs[rd]
    state.pc = next_pc & XLEN_MASK
    return Retired(pc=instr.address, instruction=instr, rd=rd, value=value, taken=taken)


def step(state: MachineState, program: Program) -> MachineState:
    """Execute one instruction with plain (unkeyed) branch semantics."""
    execute(state, program)
    return state


def run(program: Program, max_steps: int = 10_000_000) -> MachineState:
    """Run from the entry point until exit or max_steps retired instructions."""
    state = MachineState.for_program(program)
    for _ in range(max_steps):
        if state.halted:
            break
        execute(state, program)
    return state


# ---------------------------------------------------------------------------
# Per-kind handlers: (state, instr, flip) -> (rd, value, next_pc, taken)
# ---------------------------------------------------------------------------

_Effect = Tuple[Optional[int], int, int, bool]

_REG_OPS: Dict[Opcode, Callable[[int, int], int]] = {
    Opcode.ADD: lambda a, b: a + b,
    Opcode.SUB: lambda a, b: a - b,
    Opcode.AND: lambda a, b: a & b,
    Opcode.OR: lambda a, b: a | b,
    Opcode.XOR: lambda a, b: a ^ b,
    Opcode.SLT: lambda a, b: int(to_signed(a) < to_signed(b)),
    Opcode.SLTU: lambda a, b: int(a < b),
}

_IMM_OPS: Dict[Opcode, Callable[[int, int], int]] = {
    Opcode.ADDI: lambda a, imm: a + imm,
    Opcode.ANDI: lambda a, imm: a & (imm & XLEN_MASK),
    Opcode.ORI: lambda a, imm: a | (imm & XLEN_MASK),
    Opcode.XORI: lambda a, imm: a ^ (imm & XLEN_MASK),
    Opcode.SLTI: lambda a, imm: int(to_signed(a) < imm),
    Opcode.SLTIU: lambda a, imm: int(a < (imm & XLEN_MASK)),
    Opcode.SLLI: lambda a, sh: a << sh,
    Opcode.SRLI: lambda a, sh: a >> sh,
    Opcode.SRAI: lambda a, sh: to_signed(a) >> sh,
}


def _arith_reg(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    value = _REG_OPS[instr.opcode](state.regs[instr.rs1], state.regs[instr.rs2])
    return instr.rd, value, instr.address + 4, False


def _arith_imm(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    value = _IMM_OPS[instr.opcode](state.regs[instr.rs1], instr.imm)
    return instr.rd, value, instr.address + 4, False


def _load(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    address = (state.regs[instr.rs1] + instr.imm) & XLEN_MASK
    if instr.opcode is Opcode.LW:
        value = state.load(address, 4, instr.address)
    else:
        value = state.load(address, 1, instr.address)
        if instr.opcode is Opcode.LB and value & 0x80:
            value -= 0x100
    return instr.rd, value, instr.address + 4, False


def _store(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    address = (state.regs[instr.rs1] + instr.imm) & XLEN_MASK
    size = 4 if instr.opcode is Opcode.SW else 1
    state.store(address, size, state.regs[instr.rs2], instr.address)
    return None, 0, instr.address + 4, False


def _lui(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    return instr.rd, instr.imm << 12, instr.address + 4, False


def _auipc(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    return instr.rd, instr.address + (instr.imm << 12), instr.address + 4, False


def _jal(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    return instr.rd, instr.address + 4, instr.address + instr.imm, True


def _jalr(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    target = (state.regs[instr.rs1] + instr.imm) & ~1
    return instr.rd, instr.address + 4, target, True


def _branch(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    taken = branch_taken(instr.branch_kind, state.regs[instr.rs1], state.regs[instr.rs2]) ^ flip
    next_pc = instr.address + instr.imm if taken else instr.address + 4
    return None, 0, next_pc, taken


def _ecall(state: MachineState, instr: Instruction, flip: bool) -> _Effect:
    service = state.regs[REG_A7]
    if service == IsaConfig.SYSCALL_EXIT:
        state.halted = True
        state.exit_code = state.regs[REG_A0]
    elif service == IsaConfig.SYSCALL_PUTCHAR:
        state.output.append(state.regs[REG_A0] & 0xFF)
    else:
        raise Trap(instr.address, f"unknown ecall service {service}")
    return None, 0, instr.address + 4, False


_HANDLERS: Dict[Kind, Callable[[MachineState, Instruction, bool], _Effect]] = {
    Kind.ARITH_REG: _arith_reg,
    Kind.ARITH_IMM: _arith_imm,
    Kind.LOAD: _load,
    Kind.STORE: _store,
    Kind.LUI: _lui,
    Kind.AUIPC: _auipc,
    Kind.JAL: _jal,
    Kind.JALR: _jalr,
    Kind.COND_BRANCH: _branch,
    Kind.ECALL: _ecall,
}
