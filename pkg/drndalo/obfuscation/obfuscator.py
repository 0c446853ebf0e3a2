"""
Keyed branch inversion over whole programs.

Obfuscation and static deobfuscation are the same rewrite: every conditional
branch whose decision bit is 1 is replaced by its logical negation. Nothing
else changes, so the control-flow graph keeps its topology.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from drndalo.config.hash_config import ObfKey
from drndalo.isa.instruction import invert_branch
from drndalo.isa.program import Program
from drndalo.obfuscation.keyed_hash import HashScheme
from drndalo.obfuscation.mask import InversionMask

logger = logging.getLogger('drndalo.obfuscation')


def compute_mask(program: Program, scheme: HashScheme, key: Optional[ObfKey]) -> InversionMask:
    """Decision bit for every conditional branch of the program."""
    return InversionMask.from_bits({
        address: scheme.decide(address, key) for address in program.branch_addresses()
    })


def apply_mask(program: Program, mask: InversionMask) -> Program:
    """
    Invert exactly the branches whose mask bit is 1.

    Raises:
        ValueError: If the mask does not cover the program's branches
    """
    if not mask.covers(program):
        raise ValueError(
            f"Mask with {mask.branch_count} entries does not match the program's "
            f"{len(program.branches())} branches"
        )
    if not any(mask.entries.values()):
        return program
    text = [
        invert_branch(instr) if instr.is_branch and mask.bit(instr.address) else instr
        for instr in program.text
    ]
    return program.with_text(text)


def obfuscate(program: Program, scheme: HashScheme, key: Optional[ObfKey]) -> Tuple[Program, InversionMask]:
    """
    Invert every branch whose keyed decision is 1.

    Args:
        program: Plain program
        scheme: Decision function
        key: Program key

    Returns:
        (obfuscated program, mask of the decisions taken)
    """
    mask = compute_mask(program, scheme, key)
    obfuscated = apply_mask(program, mask)
    logger.debug(
        f"Obfuscated {mask.branch_count} branches, inverted {sum(mask.entries.values())}"
    )
    return obfuscated, mask


def deobfuscate(program: Program, scheme: HashScheme, key: Optional[ObfKey]) -> Program:
    """
    Undo `obfuscate` with the same scheme and key.

    Inversion is an involution and addresses are unchanged, so this is the
    same rewrite applied a second time. A wrong key yields a wrong program
    without any error.
    """
    restored, _ = obfuscate(program, scheme, key)
    return restored


def obfuscate_for_clients(
    program: Program,
    scheme: HashScheme,
    keys: Sequence[ObfKey],
) -> List[Tuple[ObfKey, Program, InversionMask]]:
    """
    One independently keyed binary per client key.

    Returns:
        (key, obfuscated program, mask) per client, in key order
    """
    results = []
    for key in keys:
        obfuscated, mask = obfuscate(program, scheme, key)
        results.append((key, obfuscated, mask))
    return results


def mask_agreement(a: InversionMask, b: InversionMask) -> Dict[str, int]:
    """Count branches two masks over the same program agree and disagree on."""
    if a.addresses() != b.addresses():
        raise ValueError("Masks cover different branch sets")
    differ = sum(1 for address in a.entries if a.bit(address) != b.bit(address))
    return {'same': a.branch_count - differ, 'different': differ}
