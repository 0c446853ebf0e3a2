"""Tests for the mask-table runtime deobfuscation rewrite."""

import pytest

from drndalo.config import Design, SimConfig
from drndalo.errors import RuntimeDeobfError
from drndalo.isa import BranchKind, parse_asm, run
from drndalo.obfuscation import (
    InversionMask,
    emit_runtime_deobf,
    expansion,
    obfuscate,
    runtime_deobf,
)
from drndalo.obfuscation.runtime_deobf import (
    DEFAULT_MASK_TABLE_BASE,
    MASK_TABLE_LABEL,
    check_runtime_deobf,
)
from drndalo.simulation import simulate


@pytest.mark.parametrize('kind, extra', [
    (BranchKind.BLT, 4),
    (BranchKind.BLTU, 4),
    (BranchKind.BGE, 5),
    (BranchKind.BGEU, 5),
    (BranchKind.BEQ, 5),
    (BranchKind.BNE, 5),
])
def test_expansion_per_kind(kind, extra):
    assert expansion(kind) == extra


def test_rewritten_obfuscated_programs_behave_like_plain(corpus, key, scheme):
    for pid, program in corpus.items():
        plain = run(program)
        obfuscated, mask = obfuscate(program, scheme, key)
        result = runtime_deobf(obfuscated, mask)
        state = run(result.program)
        assert state.halted, pid
        assert state.exit_code == plain.exit_code, pid
        assert bytes(state.output) == bytes(plain.output), pid


def test_rewrite_without_inversions_also_behaves(corpus):
    for pid, program in corpus.items():
        rewritten = emit_runtime_deobf(program, InversionMask.zeros(program))
        assert run(rewritten).exit_code == run(program).exit_code, pid


def test_dynamic_overhead_matches_expansion(corpus, key, lfsr):
    config = SimConfig(design=Design.BASELINE)
    program = corpus['branch_bench']
    obfuscated, mask = obfuscate(program, lfsr, key)
    baseline = simulate(program, config)
    rewritten = simulate(runtime_deobf(obfuscated, mask).program, config)

    expected = sum(
        count * expansion(obfuscated.fetch(address).branch_kind)
        for address, count in baseline.branch_profile.items()
    )
    assert rewritten.instructions - baseline.instructions == expected
    assert rewritten.branches == baseline.branches


def test_static_growth_and_table(corpus, key, lfsr):
    program = corpus['bubble_sort']
    obfuscated, mask = obfuscate(program, lfsr, key)
    result = runtime_deobf(obfuscated, mask)
    assert result.static_growth == sum(expansion(b.branch_kind) for b in obfuscated.branches())
    assert result.program.labels[MASK_TABLE_LABEL] == result.table_base
    assert result.table_base % 4 == 0
    assert result.table_base >= program.data_end
    table = result.program.data[result.table_base - result.program.data_base:]
    assert list(table) == mask.bits().tolist()
    # Only bne remains as a conditional branch
    assert {b.opcode.value for b in result.program.branches()} == {'bne'}


def test_table_placed_after_text_without_data(corpus, key, lfsr):
    program = corpus['sum10']
    assert not program.data
    obfuscated, mask = obfuscate(program, lfsr, key)
    result = runtime_deobf(obfuscated, mask)
    assert result.table_base == max(DEFAULT_MASK_TABLE_BASE, result.program.end)
    assert result.program.data_base == result.table_base


def test_program_without_branches_is_returned_unchanged():
    program = parse_asm("addi a0, zero, 2\naddi a7, zero, 93\necall\n")
    result = runtime_deobf(program, InversionMask.zeros(program))
    assert result.program == program
    assert result.table_base is None
    assert result.static_growth == 0


@pytest.mark.parametrize('source, fragment', [
    ("addi t5, zero, 1\nbeq t5, zero, end\nend: ecall\n", "reserved scratch"),
    ("beq t6, zero, end\nend: ecall\n", "reserved scratch"),
    ("auipc a0, 0\nbeq a0, zero, end\nend: ecall\n", "auipc"),
    ("_mask_table: beq a0, zero, end\nend: ecall\n", "reserved for the mask table"),
])
def test_unsupported_programs_are_rejected(source, fragment):
    program = parse_asm(source)
    with pytest.raises(RuntimeDeobfError, match=fragment):
        check_runtime_deobf(program)
    with pytest.raises(RuntimeDeobfError, match=fragment):
        runtime_deobf(program, InversionMask.zeros(program))


def test_mask_must_cover_program(corpus):
    with pytest.raises(ValueError, match="does not cover"):
        runtime_deobf(corpus['fib'], InversionMask.zeros(corpus['sum10']))
