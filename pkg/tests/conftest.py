"""Shared fixtures: bundled corpus, keys, schemes and small hand-written programs."""

from typing import Callable

import numpy as np
import pytest

from drndalo.config import ObfKey
from drndalo.corpus import bundled_corpus, generate_corpus
from drndalo.isa import Program, parse_asm
from drndalo.obfuscation import LfsrHash, Mix64Hash

# Exit codes of the bundled programs under plain execution
EXPECTED_EXITS = {
    'sum10': 45,
    'fib': 6765,
    'gcd': 21,
    'bubble_sort': 20,
    'collatz': 111,
    'popcount': 31,
    'hello': 6,
    'sieve': 25,
    'minmax': 199,
    'unsigned_cmp': 34,
    'branch_bench': 1000,
    'gate': 0,
    'threshold': 12,
    'checksum': 27982,
}

TEST_KEY_HEX = '00000000deadbeef'


@pytest.fixture(scope='session')
def corpus():
    return bundled_corpus()


@pytest.fixture(scope='session')
def synthetic_corpus():
    # ~30 branches per program; 200 programs leave ~3000 test samples after a 75/25 split
    return generate_corpus(200, seed=7)


@pytest.fixture
def key() -> ObfKey:
    return ObfKey.from_hex(TEST_KEY_HEX)


@pytest.fixture(scope='session')
def keys():
    rng = np.random.default_rng(2024)
    return [ObfKey.random(rng) for _ in range(10)]


@pytest.fixture
def lfsr() -> LfsrHash:
    return LfsrHash()


@pytest.fixture
def mix64() -> Mix64Hash:
    return Mix64Hash()


@pytest.fixture(params=['lfsr', 'mix64'])
def scheme(request):
    return LfsrHash() if request.param == 'lfsr' else Mix64Hash()


def _branchy_source(n: int) -> str:
    lines = ['.entry main', 'main:', '    addi t0, zero, 3', '    addi t1, zero, 5']
    kinds = ('beq', 'bne', 'blt', 'bge', 'bltu', 'bgeu')
    for i in range(n):
        lines.append(f"    {kinds[i % len(kinds)]} t0, t1, L{i}")
        lines.append('    addi a0, a0, 1')
        lines.append(f"L{i}:")
    lines.extend(['    addi a7, zero, 93', '    ecall'])
    return '\n'.join(lines) + '\n'


@pytest.fixture
def make_branchy() -> Callable[[int], Program]:
    """Factory for a straight-line program with exactly n forward branches."""
    def build(n: int) -> Program:
        return parse_asm(_branchy_source(n))
    return build


@pytest.fixture
def sum10(corpus) -> Program:
    return corpus['sum10']


@pytest.fixture
def gate(corpus) -> Program:
    return corpus['gate']
