"""Tests for the keyed inversion decisions and the key/LFSR configuration."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drndalo.config import LFSR_PRESETS, LfsrConfig, ObfKey
from drndalo.obfuscation import (
    InversionMask,
    LfsrHash,
    MaskHash,
    Mix64Hash,
    lfsr_bit,
    mix64,
    mix64_array,
    mix64_bits,
    scheme_from_name,
)

KEYS = st.integers(0, (1 << 64) - 1)
ADDRESSES = st.integers(0, 0xFFFFFFFF).map(lambda a: a & ~3)

TOY = LfsrConfig(n=4, k=5, taps=0b1001)


# ---------------------------------------------------------------------------
# LFSR
# ---------------------------------------------------------------------------

def test_lfsr_hand_trace():
    # seed 0001 -> 0011 -> 0111 -> 1111 -> 1110 -> 1101
    assert lfsr_bit(TOY, ObfKey(0), 1) == 1
    # seed 1000 -> 0001 -> 0011 -> 0111 -> 1111 -> 1110
    assert lfsr_bit(TOY, ObfKey(0), 8) == 0


def test_lfsr_seed_folds_the_key_high_half():
    assert lfsr_bit(TOY, ObfKey(1 << 32), 0) == lfsr_bit(TOY, ObfKey(0), 1)


def test_lfsr_zero_seed_is_replaced():
    # all-zero seed would lock up; all-ones runs 1111 -> 1110 -> 1101 -> 1010 -> 0101 -> 1011
    assert lfsr_bit(TOY, ObfKey(0), 0) == 1


@given(key=KEYS, address=ADDRESSES)
def test_lfsr_is_deterministic(key, address):
    scheme = LfsrHash()
    assert scheme.decide(address, ObfKey(key)) == scheme.decide(address, ObfKey(key))
    assert scheme.decide(address, ObfKey(key)) in (0, 1)


@pytest.mark.parametrize('preset', sorted(LFSR_PRESETS))
def test_presets_are_maximal(preset):
    config = LfsrConfig.from_preset(preset)
    assert config.k > config.n
    assert config.is_maximal()
    assert config.validate_maximal()


def test_non_maximal_taps_are_reported(caplog):
    config = LfsrConfig(n=4, k=5, taps=0b1111)
    assert not config.is_maximal()
    with caplog.at_level('WARNING', logger='drndalo.config'):
        assert not config.validate_maximal()
    assert 'not maximal-length' in caplog.text


def test_maximal_taps_for_wide_registers_use_known_table():
    assert LfsrConfig(n=32, k=40, taps=0xE0000200).is_maximal()
    assert LfsrConfig(n=40, k=48, taps=0x1).is_maximal() is None


@pytest.mark.parametrize('kwargs, fragment', [
    (dict(n=3, k=8, taps=1), 'n must be in'),
    (dict(n=16, k=16, taps=0x8000), 'k must exceed n'),
    (dict(n=8, k=9, taps=0), 'non-zero'),
    (dict(n=4, k=5, taps=0x10), 'do not fit'),
])
def test_lfsr_config_validation(kwargs, fragment):
    with pytest.raises(ValueError, match=fragment):
        LfsrConfig(**kwargs)


def test_unknown_preset_lists_available():
    with pytest.raises(ValueError, match="Available"):
        LfsrConfig.from_preset('lfsr99')


def test_lfsr_decisions_are_balanced():
    key = ObfKey.from_hex('0123456789abcdef')
    scheme = LfsrHash()
    bits = [scheme.decide(address, key) for address in range(0, 4 * 4000, 4)]
    assert 0.45 <= np.mean(bits) <= 0.55


# ---------------------------------------------------------------------------
# Mix64
# ---------------------------------------------------------------------------

@settings(max_examples=200)
@given(key=KEYS, address=ADDRESSES)
def test_vectorized_mix_matches_scalar(key, address):
    vector = mix64_array(np.array([key], dtype=np.uint64), np.array([address], dtype=np.uint64))
    assert int(vector[0]) == mix64(ObfKey(key), address)
    assert int(mix64_bits(np.uint64(key), np.uint64(address))) == Mix64Hash().decide(address, ObfKey(key))


def _bit_count(values: np.ndarray) -> np.ndarray:
    return np.unpackbits(values.view(np.uint8).reshape(-1, 8), axis=1).sum(axis=1)


def test_mix64_avalanche():
    rng = np.random.default_rng(11)
    trials = 10_000
    keys = rng.integers(0, 2**63, size=trials, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    addresses = rng.integers(0, 2**32, size=trials, dtype=np.uint64)
    flips = np.uint64(1) << rng.integers(0, 32, size=trials).astype(np.uint64)

    base = mix64_array(keys, addresses)
    flipped = mix64_array(keys, addresses ^ flips)
    changed = _bit_count(base ^ flipped) / 64.0
    assert 0.48 <= changed.mean() <= 0.52

    key_flips = np.uint64(1) << rng.integers(0, 64, size=trials).astype(np.uint64)
    changed = _bit_count(base ^ mix64_array(keys ^ key_flips, addresses)) / 64.0
    assert 0.48 <= changed.mean() <= 0.52


def test_different_keys_disagree_on_about_half_the_branches():
    addresses = np.arange(0, 4 * 2000, 4, dtype=np.uint64)
    a = mix64_bits(np.uint64(0x1111), addresses)
    b = mix64_bits(np.uint64(0x2222), addresses)
    assert 0.45 <= np.mean(a != b) <= 0.55


# ---------------------------------------------------------------------------
# Keys and schemes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('text, bits', [
    ('00000000deadbeef', 0xDEADBEEF),
    ('0xFFFFFFFFFFFFFFFF', (1 << 64) - 1),
    ('1', 1),
])
def test_key_from_hex(text, bits):
    assert ObfKey.from_hex(text).bits == bits


@pytest.mark.parametrize('text', ['', 'xyz', '1' * 17, '-1'])
def test_bad_keys_rejected(text):
    with pytest.raises(ValueError):
        ObfKey.from_hex(text)


def test_key_repr_is_masked():
    key = ObfKey.from_hex('0123456789abcdef')
    assert 'cdef' in repr(key)
    assert '0123456789ab' not in repr(key)


def test_keyed_schemes_require_a_key():
    for scheme in (LfsrHash(), Mix64Hash()):
        with pytest.raises(ValueError, match="requires a key"):
            scheme.decide(0, None)


def test_mask_scheme_ignores_the_key():
    mask = InversionMask.from_bits({0: 1, 4: 0})
    scheme = MaskHash(mask)
    assert not scheme.keyed
    assert scheme.decide(0) == 1
    assert scheme.decide(4, ObfKey(5)) == 0


def test_scheme_from_name():
    assert scheme_from_name('mix64') == Mix64Hash()
    assert scheme_from_name('lfsr', LfsrConfig.from_preset('lfsr8')) == LfsrHash(LfsrConfig(7, 8, 0x41))
    with pytest.raises(ValueError, match="Available"):
        scheme_from_name('sha3')
