"""Tests for static obfuscation, masks and per-client binaries."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from drndalo.config import ObfKey
from drndalo.isa import parse_asm, print_asm, run, same_topology
from drndalo.obfuscation import (
    InversionMask,
    LfsrHash,
    Mix64Hash,
    apply_mask,
    compute_mask,
    deobfuscate,
    mask_agreement,
    obfuscate,
    obfuscate_for_clients,
)

KEYS = st.integers(0, (1 << 64) - 1).map(ObfKey)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(key=KEYS, use_lfsr=st.booleans())
def test_deobfuscate_inverts_obfuscate(corpus, key, use_lfsr):
    scheme = LfsrHash() if use_lfsr else Mix64Hash()
    for pid, program in corpus.items():
        obfuscated, mask = obfuscate(program, scheme, key)
        assert same_topology([program, obfuscated]), pid
        assert program.differing_branches(obfuscated) == [a for a, bit in mask.entries.items() if bit]
        assert deobfuscate(obfuscated, scheme, key) == program, pid


def test_obfuscation_preserves_everything_but_branch_opcodes(corpus, key, scheme):
    for program in corpus.values():
        obfuscated, _ = obfuscate(program, scheme, key)
        assert obfuscated.labels == program.labels
        assert obfuscated.data == program.data
        assert obfuscated.entry == program.entry
        for a, b in zip(program.text, obfuscated.text):
            if not a.is_branch:
                assert a == b
            else:
                assert (a.rs1, a.rs2, a.imm, a.target) == (b.rs1, b.rs2, b.imm, b.target)


def test_wrong_key_restores_a_different_program(make_branchy):
    program = make_branchy(64)
    right = ObfKey.from_hex('00000000deadbeef')
    wrong = ObfKey.from_hex('00000000deadbeee')
    obfuscated, right_mask = obfuscate(program, Mix64Hash(), right)
    wrong_mask = compute_mask(program, Mix64Hash(), wrong)
    restored = deobfuscate(obfuscated, Mix64Hash(), wrong)
    expected = [a for a in right_mask.addresses() if right_mask.bit(a) != wrong_mask.bit(a)]
    assert expected
    assert restored.differing_branches(program) == expected


def test_program_without_branches_is_unchanged(key, scheme):
    program = parse_asm("addi a0, zero, 1\naddi a7, zero, 93\necall\n")
    obfuscated, mask = obfuscate(program, scheme, key)
    assert obfuscated == program
    assert mask.branch_count == 0
    assert print_asm(obfuscated) == print_asm(program)


def test_obfuscated_binary_runs_differently_without_key(gate):
    # Plain execution of the obfuscated text follows the inverted conditions
    program = gate
    for bits in (0, 1):
        mask = InversionMask.from_bits({program.branch_addresses()[0]: bits})
        state = run(apply_mask(program, mask))
        assert state.halted
        assert bytes(state.output) == (b'Y' if bits else b'')


# ---------------------------------------------------------------------------
# Mask files
# ---------------------------------------------------------------------------

def test_mask_file_round_trip(tmp_path, corpus, key, lfsr):
    _, mask = obfuscate(corpus['bubble_sort'], lfsr, key)
    path = tmp_path / 'bubble_sort.mask'
    mask.save(path)
    text = path.read_text()
    assert text.splitlines()[0] == f"# n={mask.branch_count}"
    assert InversionMask.load(path) == mask


@pytest.mark.parametrize('text, fragment', [
    ("# n=2\n0x0 1\n", "declares n=2"),
    ("0x0 1\n0x0 0\n", "duplicate address"),
    ("0x0\n", "expected '<addr> <bit>'"),
    ("0x0 2\n", "must be 0 or 1"),
])
def test_malformed_mask_text(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        InversionMask.from_text(text)


def test_apply_mask_rejects_foreign_masks(corpus):
    mask = InversionMask.zeros(corpus['sum10'])
    with pytest.raises(ValueError, match="does not match"):
        apply_mask(corpus['fib'], mask)


def test_zero_mask_is_identity(corpus):
    program = corpus['collatz']
    assert apply_mask(program, InversionMask.zeros(program)) == program


def test_mask_bias_is_half_across_keys(make_branchy, scheme):
    program = make_branchy(64)
    assert InversionMask.zeros(program).set_fraction() == 0.0
    rng = np.random.default_rng(99)
    fractions = [compute_mask(program, scheme, ObfKey.random(rng)).set_fraction() for _ in range(200)]
    assert 0.45 <= np.mean(fractions) <= 0.55
    assert 0.0 < min(fractions) and max(fractions) < 1.0


# ---------------------------------------------------------------------------
# Per-client binaries
# ---------------------------------------------------------------------------

def test_per_client_binaries_differ_in_about_half_the_branches(make_branchy, keys):
    program = make_branchy(400)
    clients = obfuscate_for_clients(program, Mix64Hash(), keys[:2])
    (_, p_a, mask_a), (_, p_b, mask_b) = clients
    agreement = mask_agreement(mask_a, mask_b)
    assert agreement['same'] + agreement['different'] == 400
    assert 160 <= agreement['different'] <= 240
    assert len(p_a.differing_branches(p_b)) == agreement['different']
    assert same_topology([program, p_a, p_b])


def test_client_keys_stay_in_order(sum10, keys, lfsr):
    clients = obfuscate_for_clients(sum10, lfsr, keys)
    assert [k for k, _, _ in clients] == keys
    for client_key, obfuscated, mask in clients:
        assert deobfuscate(obfuscated, lfsr, client_key) == sum10
        assert mask == compute_mask(sum10, lfsr, client_key)


def test_mask_agreement_requires_same_branches(corpus):
    with pytest.raises(ValueError, match="different branch sets"):
        mask_agreement(InversionMask.zeros(corpus['sum10']), InversionMask.zeros(corpus['fib']))
