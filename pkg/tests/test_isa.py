"""Tests for the RV32I subset: assembler, printer and architectural semantics."""

import pytest
from hypothesis import given, strategies as st

from drndalo.errors import AsmSyntaxError, Trap
from drndalo.isa import (
    BranchKind,
    Instruction,
    Opcode,
    branch_taken,
    invert_branch,
    parse_asm,
    print_asm,
    run,
    same_topology,
)

from conftest import EXPECTED_EXITS

WORDS = st.integers(0, 0xFFFFFFFF)


# ---------------------------------------------------------------------------
# Assembler
# ---------------------------------------------------------------------------

def test_parse_resolves_labels_and_addresses():
    program = parse_asm(
        ".entry start\n"
        "start: addi t0, zero, 1\n"
        "loop:\n"
        "    addi t0, t0, -1\n"
        "    bne t0, zero, loop   # back edge\n"
        "    addi a7, zero, 93\n"
        "    ecall\n"
    )
    assert len(program) == 5
    assert program.entry == 0
    assert program.labels['loop'] == 4
    branch = program.fetch(8)
    assert branch.opcode is Opcode.BNE
    assert branch.imm == -4
    assert branch.target_address == 4
    assert program.branch_addresses() == [8]


def test_abi_and_numeric_register_names_agree():
    a = parse_asm("add x10, x5, x6\n")
    b = parse_asm("add a0, t0, t1\n")
    assert a == b


@pytest.mark.parametrize('source, fragment', [
    ("frob t0, t1, t2\n", "Unknown mnemonic"),
    ("beq t0, t1, nowhere\n", "Unresolved label"),
    ("a:\na: addi t0, t0, 1\n", "Duplicate label"),
    ("addi t0, t1\n", "takes 3 operands"),
    ("addi t0, t1, 4096\n", "out of range"),
    ("addi t0, q9, 1\n", "Unknown register"),
    (".text 0x2\naddi t0, t0, 1\n", "Misaligned"),
    (".word 1\n", "outside the data section"),
])
def test_syntax_errors(source, fragment):
    with pytest.raises(AsmSyntaxError, match=fragment):
        parse_asm(source)


def test_syntax_error_reports_line_number():
    with pytest.raises(AsmSyntaxError) as info:
        parse_asm("addi t0, zero, 1\nnop t0\n")
    assert info.value.line_number == 2
    assert 'line 2' in str(info.value)


def test_tabs_separate_mnemonic_and_operands():
    spaced = parse_asm("main:\n    addi a0, zero, 1\n    beq a0, zero, main\n")
    tabbed = parse_asm("main:\n\taddi\ta0,\tzero,\t1\n\tbeq\ta0, zero,main\n")
    assert tabbed == spaced


def test_data_segment_and_labels():
    program = parse_asm(
        "lw a0, 0(s0)\n"
        ".data 0x10000\n"
        "values: .word 7, -1\n"
        "flag: .byte 3\n"
    )
    assert program.data_base == 0x10000
    assert program.read_word(0x10000) == 7
    assert program.read_word(0x10004) == 0xFFFFFFFF
    assert program.data_labels() == {'values': 0x10000, 'flag': 0x10008}


def test_print_parse_round_trip_over_corpus(corpus):
    for pid, program in corpus.items():
        assert parse_asm(print_asm(program)) == program, pid


# ---------------------------------------------------------------------------
# Branch inversion
# ---------------------------------------------------------------------------

@given(kind=st.sampled_from(list(BranchKind)), v1=WORDS, v2=WORDS)
def test_inverted_branch_negates_condition(kind, v1, v2):
    assert branch_taken(kind.invert(), v1, v2) == (not branch_taken(kind, v1, v2))


@pytest.mark.parametrize('kind', list(BranchKind))
def test_invert_is_an_involution(kind):
    assert kind.invert().invert() is kind
    assert kind.invert() is not kind


def test_invert_branch_keeps_operands_and_target(sum10):
    branch = sum10.branches()[0]
    inverted = invert_branch(branch)
    assert inverted.opcode is branch.branch_kind.invert().opcode
    assert (inverted.address, inverted.rs1, inverted.rs2, inverted.imm, inverted.target) == \
        (branch.address, branch.rs1, branch.rs2, branch.imm, branch.target)
    text = [invert_branch(i) if i.is_branch else i for i in sum10.text]
    assert same_topology([sum10, sum10.with_text(text)])


def test_invert_branch_rejects_non_branches():
    with pytest.raises(ValueError, match="not a conditional branch"):
        invert_branch(Instruction(address=0, opcode=Opcode.ADDI, rd=5, rs1=5, imm=1))


def test_signed_and_unsigned_comparisons_differ():
    assert branch_taken(BranchKind.BLT, 0xFFFFFFFF, 0)
    assert not branch_taken(BranchKind.BLTU, 0xFFFFFFFF, 0)
    assert branch_taken(BranchKind.BGEU, 0x80000000, 0x7FFFFFFF)


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('pid, code', sorted(EXPECTED_EXITS.items()))
def test_corpus_exit_codes(corpus, pid, code):
    state = run(corpus[pid])
    assert state.halted
    assert state.exit_code == code


def test_putchar_output(corpus):
    assert bytes(run(corpus['hello']).output) == b'hello\n'
    assert bytes(run(corpus['threshold']).output) == b'M'
    assert bytes(run(corpus['gate']).output) == b''


def test_x0_is_hardwired_to_zero():
    state = run(parse_asm(
        "addi zero, zero, 5\n"
        "add a0, zero, zero\n"
        "addi a7, zero, 93\n"
        "ecall\n"
    ))
    assert state.exit_code == 0
    assert state.regs[0] == 0


def test_byte_loads_extend_correctly():
    source = (
        "lui s0, 0x10\n"
        "lb a1, 0(s0)\n"
        "lbu a2, 0(s0)\n"
        "sub a0, a2, a1\n"
        "addi a7, zero, 93\n"
        "ecall\n"
        ".data 0x10000\n"
        ".byte 0x80, 0, 0, 0\n"
    )
    state = run(parse_asm(source))
    assert state.regs[11] == 0xFFFFFF80
    assert state.regs[12] == 0x80
    assert state.exit_code == 0x100


def test_arithmetic_wraps_to_32_bits():
    state = run(parse_asm(
        "lui t0, 0xfffff\n"
        "ori t0, t0, 0x7ff\n"
        "slli t0, t0, 1\n"
        "srai a0, t0, 4\n"
        "addi a7, zero, 93\n"
        "ecall\n"
    ))
    assert state.regs[5] == 0xFFFFEFFE
    assert state.exit_code == 0xFFFFFEFF


@pytest.mark.parametrize('source, reason', [
    ("lw a0, 0(zero)\n", "outside mapped memory"),
    ("addi sp, sp, -2\nlw a0, 0(sp)\n", "misaligned"),
    ("addi a7, zero, 1\necall\n", "unknown ecall"),
    ("addi t0, zero, 64\njalr zero, 0(t0)\n", "non-text"),
])
def test_traps(source, reason):
    with pytest.raises(Trap, match=reason):
        run(parse_asm(source))


def test_run_stops_at_max_steps():
    state = run(parse_asm("loop: beq zero, zero, loop\n"), max_steps=100)
    assert not state.halted
