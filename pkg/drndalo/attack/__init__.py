"""
Drndalo Attack Module - Keyless Attacker Harness

Brute-force mask guessing with its 2^-n success bound, and behavioral
divergence of obfuscated binaries executed without the key. Nothing in
this module has access to obfuscation keys.
"""

from drndalo.attack.brute_force import (
    AttackMode,
    AttackReport,
    branch_difference,
    brute_force,
    reconstruct,
    required_flips,
    success_band,
)
from drndalo.attack.divergence import DivergenceResult, measure_divergence, random_inputs

__all__ = [
    'AttackMode',
    'AttackReport',
    'branch_difference',
    'brute_force',
    'reconstruct',
    'required_flips',
    'success_band',
    'DivergenceResult',
    'measure_divergence',
    'random_inputs',
]
