"""
Text assembler and printer for the RV32I subset.

Dialect:
    - one instruction or directive per line, '#' starts a comment
    - labels end with ':' and may share a line with an instruction
    - directives: .text [addr], .entry <label|addr>, .data <addr>,
      .byte <v, ...>, .word <v, ...>
    - registers x0..x31 and ABI aliases (zero, ra, sp, a0..a7, t0..t6, s0..s11)

Parsing runs in two passes: the first assigns addresses and records labels,
the second resolves branch/jal targets into pc-relative offsets. The second
pass is exposed as `layout()` so program transforms can emit statements and
let the assembler re-resolve every target.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from drndalo.config.isa_config import IsaConfig
from drndalo.errors import AsmSyntaxError
from drndalo.isa.instruction import OPCODE_KIND, SHIFT_OPCODES, Instruction, Kind, Opcode
from drndalo.isa.program import Program

_LABEL_RE = re.compile(r'^([A-Za-z_.$][\w.$]*)\s*:')
_MEM_OPERAND_RE = re.compile(r'^(-?\w+)\s*\(\s*(\w+)\s*\)$')
_NAME_RE = re.compile(r'^[A-Za-z_.$][\w.$]*$')

_MNEMONICS: Dict[str, Opcode] = {op.value: op for op in Opcode}

BYTES_PER_DATA_LINE = 16


@dataclass
class Statement:
    """An instruction whose address and target offset are not resolved yet."""
    opcode: Opcode
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0
    target: Optional[str] = None
    line_number: Optional[int] = None
    line: str = ''


# A text item is either a label definition or a statement.
TextItem = Union[str, Statement]


def parse_asm(source: str, base: int = IsaConfig.DEFAULT_TEXT_BASE) -> Program:
    """
    Parse assembly source into a Program.

    Args:
        source: Assembly text
        base: Address of the first instruction (overridden by a `.text <addr>` directive)

    Returns:
        Program with resolved labels and sequential addresses

    Raises:
        AsmSyntaxError: On unknown mnemonics, malformed operands, unresolved
            labels or misaligned address directives
    """
    items: List[TextItem] = []
    data = bytearray()
    data_base: Optional[int] = None
    data_labels: Dict[str, int] = {}
    entry: Optional[Union[str, int]] = None
    section = 'text'
    have_instructions = False
    seen_labels: set = set()

    for number, raw in enumerate(source.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()

        while (match := _LABEL_RE.match(line)):
            name = match.group(1)
            if name in seen_labels:
                raise AsmSyntaxError(f"Duplicate label '{name}'", number, raw)
            seen_labels.add(name)
            if section == 'text':
                items.append(name)
            else:
                data_labels[name] = (data_base or 0) + len(data)
            line = line[match.end():].strip()

        if not line:
            continue

        parts = line.split(None, 1)
        head = parts[0].lower()
        rest = parts[1].strip() if len(parts) > 1 else ''

        try:
            if head == '.text':
                if rest:
                    address = _parse_int(rest)
                    _check_aligned(address, '.text')
                    if have_instructions:
                        raise ValueError(".text address must precede the first instruction")
                    base = address
                section = 'text'
            elif head == '.data':
                section = 'data'
                if rest:
                    address = _parse_int(rest)
                    _check_aligned(address, '.data')
                    if data_base is not None and address != data_base + len(data):
                        raise ValueError("Only one contiguous data segment is supported")
                    if data_base is None:
                        data_base = address
                elif data_base is None:
                    raise ValueError(".data needs an address the first time it is used")
            elif head == '.entry':
                entry = _parse_entry(rest)
            elif head in ('.byte', '.word'):
                if section != 'data':
                    raise ValueError(f"{head} outside the data section")
                data.extend(_parse_data(head, rest))
            elif head.startswith('.'):
                raise ValueError(f"Unknown directive '{head}'")
            else:
                if section != 'text':
                    raise ValueError("Instruction inside the data section")
                items.append(_parse_instruction(head, rest, number, raw))
                have_instructions = True
        except AsmSyntaxError:
            raise
        except ValueError as e:
            raise AsmSyntaxError(str(e), number, raw) from e

    return layout(
        items,
        base=base,
        data=bytes(data),
        data_base=data_base if data_base is not None else 0,
        data_labels=data_labels,
        entry=entry,
    )


def layout(
    items: Sequence[TextItem],
    base: int = IsaConfig.DEFAULT_TEXT_BASE,
    data: bytes = b'',
    data_base: int = 0,
    data_labels: Optional[Dict[str, int]] = None,
    entry: Optional[Union[str, int]] = None,
) -> Program:
    """
    Assign addresses to statements and resolve branch/jal targets.

    Args:
        items: Label names and statements in program order
        base: Address of the first statement
        data: Data segment bytes
        data_base: Address of the data segment
        data_labels: Labels naming data addresses
        entry: Entry label or address; defaults to base

    Returns:
        Assembled Program

    Raises:
        AsmSyntaxError: If a target or the entry label cannot be resolved
    """
    if base % 4 != 0:
        raise AsmSyntaxError(f"Misaligned text base 0x{base:x}")

    labels: Dict[str, int] = {}
    placed: List[Tuple[int, Statement]] = []
    address = base
    for item in items:
        if isinstance(item, str):
            labels[item] = address
        else:
            placed.append((address, item))
            address += 4

    for name, addr in (data_labels or {}).items():
        if name in labels:
            raise AsmSyntaxError(f"Duplicate label '{name}'")
        labels[name] = addr

    text: List[Instruction] = []
    for addr, stmt in placed:
        imm = stmt.imm
        if stmt.target is not None:
            if stmt.target not in labels:
                raise AsmSyntaxError(f"Unresolved label '{stmt.target}'", stmt.line_number, stmt.line)
            imm = labels[stmt.target] - addr
        try:
            text.append(Instruction(
                address=addr, opcode=stmt.opcode, rd=stmt.rd, rs1=stmt.rs1,
                rs2=stmt.rs2, imm=imm, target=stmt.target,
            ))
        except ValueError as e:
            raise AsmSyntaxError(str(e), stmt.line_number, stmt.line) from e

    if entry is None:
        entry_address = base
    elif isinstance(entry, str):
        if entry not in labels:
            raise AsmSyntaxError(f"Unresolved entry label '{entry}'")
        entry_address = labels[entry]
    else:
        entry_address = entry

    try:
        return Program(
            text=tuple(text), labels=labels, data=data,
            data_base=data_base, entry=entry_address, base=base,
        )
    except ValueError as e:
        raise AsmSyntaxError(str(e)) from e


def print_asm(program: Program) -> str:
    """
    Render a Program as assembly that parses back to an equal Program.

    Args:
        program: Program to print

    Returns:
        Assembly listing
    """
    lines: List[str] = []
    if program.base != IsaConfig.DEFAULT_TEXT_BASE:
        lines.append(f".text 0x{program.base:x}")

    text_labels: Dict[int, List[str]] = {}
    data_labels: Dict[int, List[str]] = {}
    data_only = program.data_labels()
    for name, addr in program.labels.items():
        bucket = data_labels if name in data_only else text_labels
        bucket.setdefault(addr, []).append(name)

    entry_names = sorted(text_labels.get(program.entry, []))
    if entry_names:
        lines.append(f".entry {entry_names[0]}")
    else:
        lines.append(f".entry 0x{program.entry:x}")

    for instr in program.text:
        for name in sorted(text_labels.get(instr.address, [])):
            lines.append(f"{name}:")
        lines.append(f"    {format_instruction(instr)}")
    for name in sorted(text_labels.get(program.end, [])):
        lines.append(f"{name}:")

    if program.data or data_labels or program.data_base != 0:
        lines.append(f".data 0x{program.data_base:x}")
        cuts = sorted({program.data_base, program.data_end, *data_labels.keys()})
        for start, stop in zip(cuts, cuts[1:] + [None]):
            for name in sorted(data_labels.get(start, [])):
                lines.append(f"{name}:")
            if stop is None:
                continue
            chunk = program.data[start - program.data_base:stop - program.data_base]
            for i in range(0, len(chunk), BYTES_PER_DATA_LINE):
                values = ', '.join(str(b) for b in chunk[i:i + BYTES_PER_DATA_LINE])
                lines.append(f"    .byte {values}")

    return '\n'.join(lines) + '\n'


def format_instruction(instr: Instruction) -> str:
    """One instruction in canonical dialect form (no address, no label)."""
    reg = IsaConfig.register_name
    op = instr.opcode.value
    kind = instr.kind
    if kind is Kind.ARITH_REG:
        return f"{op} {reg(instr.rd)}, {reg(instr.rs1)}, {reg(instr.rs2)}"
    if kind is Kind.ARITH_IMM:
        return f"{op} {reg(instr.rd)}, {reg(instr.rs1)}, {instr.imm}"
    if kind is Kind.LOAD:
        return f"{op} {reg(instr.rd)}, {instr.imm}({reg(instr.rs1)})"
    if kind is Kind.STORE:
        return f"{op} {reg(instr.rs2)}, {instr.imm}({reg(instr.rs1)})"
    if kind in (Kind.LUI, Kind.AUIPC):
        return f"{op} {reg(instr.rd)}, 0x{instr.imm:x}"
    if kind is Kind.JAL:
        return f"{op} {reg(instr.rd)}, {instr.target}"
    if kind is Kind.JALR:
        return f"{op} {reg(instr.rd)}, {instr.imm}({reg(instr.rs1)})"
    if kind is Kind.COND_BRANCH:
        return f"{op} {reg(instr.rs1)}, {reg(instr.rs2)}, {instr.target}"
    return op


# ---------------------------------------------------------------------------
# Operand parsing
# ---------------------------------------------------------------------------

def _parse_instruction(mnemonic: str, rest: str, number: int, raw: str) -> Statement:
    opcode = _MNEMONICS.get(mnemonic)
    if opcode is None:
        raise AsmSyntaxError(f"Unknown mnemonic '{mnemonic}'", number, raw)

    operands = [tok.strip() for tok in rest.split(',')] if rest else []
    kind = OPCODE_KIND[opcode]
    reg = IsaConfig.lookup_register
    stmt = Statement(opcode=opcode, line_number=number, line=raw)

    if kind is Kind.ARITH_REG:
        _expect(operands, 3, mnemonic)
        stmt.rd, stmt.rs1, stmt.rs2 = reg(operands[0]), reg(operands[1]), reg(operands[2])
    elif kind is Kind.ARITH_IMM:
        _expect(operands, 3, mnemonic)
        stmt.rd, stmt.rs1 = reg(operands[0]), reg(operands[1])
        imm = _parse_int(operands[2])
        if opcode in SHIFT_OPCODES:
            _check_range(imm, 0, IsaConfig.SHAMT_MAX, 'shift amount')
        else:
            _check_range(imm, IsaConfig.IMM12_MIN, IsaConfig.IMM12_MAX, 'immediate')
        stmt.imm = imm
    elif kind in (Kind.LOAD, Kind.STORE):
        _expect(operands, 2, mnemonic)
        imm, base_reg = _parse_mem_operand(operands[1])
        if kind is Kind.LOAD:
            stmt.rd = reg(operands[0])
        else:
            stmt.rs2 = reg(operands[0])
        stmt.rs1, stmt.imm = base_reg, imm
    elif kind in (Kind.LUI, Kind.AUIPC):
        _expect(operands, 2, mnemonic)
        stmt.rd = reg(operands[0])
        imm = _parse_int(operands[1])
        _check_range(imm, -(1 << 19), IsaConfig.UIMM20_MAX, 'upper immediate')
        stmt.imm = imm & IsaConfig.UIMM20_MAX
    elif kind is Kind.JAL:
        if len(operands) == 1:
            stmt.rd, target = reg('ra'), operands[0]
        else:
            _expect(operands, 2, mnemonic)
            stmt.rd, target = reg(operands[0]), operands[1]
        stmt.target = _parse_label(target)
    elif kind is Kind.JALR:
        if len(operands) == 2:
            stmt.rd = reg(operands[0])
            stmt.imm, stmt.rs1 = _parse_mem_operand(operands[1])
        else:
            _expect(operands, 3, mnemonic)
            stmt.rd, stmt.rs1, stmt.imm = reg(operands[0]), reg(operands[1]), _parse_int(operands[2])
        _check_range(stmt.imm, IsaConfig.IMM12_MIN, IsaConfig.IMM12_MAX, 'immediate')
    elif kind is Kind.COND_BRANCH:
        _expect(operands, 3, mnemonic)
        stmt.rs1, stmt.rs2 = reg(operands[0]), reg(operands[1])
        stmt.target = _parse_label(operands[2])
    else:
        _expect(operands, 0, mnemonic)
    return stmt


def _expect(operands: List[str], count: int, mnemonic: str) -> None:
    if len(operands) != count:
        raise ValueError(f"'{mnemonic}' takes {count} operands, got {len(operands)}")


def _parse_int(token: str) -> int:
    try:
        return int(token.strip(), 0)
    except ValueError:
        raise ValueError(f"Invalid integer '{token.strip()}'") from None


def _parse_label(token: str) -> str:
    if not _NAME_RE.match(token):
        raise ValueError(f"Invalid label '{token}'")
    return token


def _parse_mem_operand(token: str) -> Tuple[int, int]:
    match = _MEM_OPERAND_RE.match(token.replace(' ', ''))
    if not match:
        raise ValueError(f"Expected imm(reg), got '{token}'")
    imm = _parse_int(match.group(1))
    _check_range(imm, IsaConfig.IMM12_MIN, IsaConfig.IMM12_MAX, 'offset')
    return imm, IsaConfig.lookup_register(match.group(2))


def _parse_entry(token: str) -> Union[str, int]:
    token = token.strip()
    if not token:
        raise ValueError(".entry needs a label or an address")
    if token[0].isdigit() or token[0] == '-':
        return _parse_int(token)
    return _parse_label(token)


def _parse_data(directive: str, rest: str) -> bytes:
    if not rest:
        raise ValueError(f"{directive} needs at least one value")
    out = bytearray()
    for token in rest.split(','):
        value = _parse_int(token)
        if directive == '.byte':
            _check_range(value, -128, 0xFF, 'byte')
            out.append(value & 0xFF)
        else:
            _check_range(value, -(1 << 31), 0xFFFFFFFF, 'word')
            out.extend((value & 0xFFFFFFFF).to_bytes(4, 'little'))
    return bytes(out)


def _check_aligned(address: int, directive: str) -> None:
    if address % 4 != 0 or address < 0:
        raise ValueError(f"Misaligned {directive} address 0x{address:x}")


def _check_range(value: int, low: int, high: int, what: str) -> None:
    if not low <= value <= high:
        raise ValueError(f"{what} {value} out of range [{low}, {high}]")
