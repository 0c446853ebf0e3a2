"""
Drndalo - Keyed Branch-Inversion Obfuscation for RV32I

Obfuscates programs by inverting conditional branches selected by a keyed
1-bit hash, models processors that undo the inversion at run time, and
measures cost, stealth and keyless attacks.

Main interfaces:
    parse_asm / print_asm: Assembly text <-> Program
    ObfKey, LfsrHash, Mix64Hash: Keys and keyed hashes
    obfuscate / deobfuscate: The keyed rewrite and its inverse
    SimConfig, Design, simulate: Pipeline cost model under four designs
    build_dataset, window_sweep: Classifier-based stealth evaluation
    brute_force, measure_divergence: Keyless attacker harness
    BenchRunner: Corpus benchmark across designs
    ToolConfig: Tool configuration from file, dict or environment
"""

from drndalo.attack import brute_force, measure_divergence
from drndalo.config import Design, ObfKey, SimConfig, ToolConfig
from drndalo.experiments import BenchRunner
from drndalo.isa import Program, parse_asm, print_asm
from drndalo.obfuscation import LfsrHash, Mix64Hash, deobfuscate, obfuscate
from drndalo.simulation import simulate
from drndalo.stealth import build_dataset, window_sweep

__all__ = [
    'parse_asm',
    'print_asm',
    'Program',
    'ObfKey',
    'LfsrHash',
    'Mix64Hash',
    'obfuscate',
    'deobfuscate',
    'Design',
    'SimConfig',
    'simulate',
    'build_dataset',
    'window_sweep',
    'brute_force',
    'measure_divergence',
    'BenchRunner',
    'ToolConfig',
]
