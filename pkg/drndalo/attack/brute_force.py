"""
Brute-force inversion-mask guessing.

The modeled attacker holds only the obfuscated binary and guesses which
branches were inverted. The plain program is used by the harness as the
success oracle and never by the guesses themselves.
"""

import json
import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import binom

from drndalo.errors import AttackError
from drndalo.isa.instruction import invert_branch
from drndalo.isa.program import Program, same_topology

logger = logging.getLogger('drndalo.attack')

EXHAUSTIVE_MAX_BRANCHES = 20
STRUCTURAL_CHECK_MAX_BRANCHES = 10
SAMPLE_CHUNK = 100_000
# Probability mass of a 3-sigma normal band
THREE_SIGMA = 0.9973


class AttackMode(str, Enum):
    EXHAUSTIVE = 'exhaustive'
    SAMPLED = 'sampled'


@dataclass(frozen=True)
class AttackReport:
    """
    Attributes:
        n: Conditional branch count
        trials: Masks tried
        successes: Masks that reconstruct the plain program exactly
        empirical_p: successes / trials
        theoretical_p: 2^-n
        mode: 'exhaustive' or 'sampled'
        band: Binomial 3-sigma band of the success rate around theoretical_p
        divergence: Fraction of inputs on which plain and unkeyed obfuscated runs differ
    """
    n: int
    trials: int
    successes: int
    empirical_p: float
    theoretical_p: float
    mode: str
    band: Tuple[float, float] = (0.0, 1.0)
    divergence: Optional[float] = None

    @property
    def within_band(self) -> bool:
        return self.band[0] <= self.empirical_p <= self.band[1]

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['band'] = list(self.band)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def required_flips(p_obf: Program, p_plain: Program) -> np.ndarray:
    """
    Which branches must be inverted to restore the plain program.

    Raises:
        ValueError: If the programs differ anywhere other than by branch inversion
    """
    if not same_topology([p_obf, p_plain]):
        raise ValueError("Obfuscated and plain programs do not share a topology")
    flips: List[int] = []
    for obf, plain in zip(p_obf.text, p_plain.text):
        if obf.is_branch:
            if obf == plain:
                flips.append(0)
            elif invert_branch(obf) == plain:
                flips.append(1)
            else:
                raise ValueError(f"Branch at 0x{obf.address:x} is not an inversion of the original")
        elif obf != plain:
            raise ValueError(f"Non-branch instruction at 0x{obf.address:x} differs")
    return np.array(flips, dtype=np.uint8)


def reconstruct(p_obf: Program, guess: np.ndarray) -> Program:
    """Apply a guessed flip vector (branch-address order) to the obfuscated program."""
    flips = iter(guess.tolist())
    text = [
        invert_branch(instr) if instr.is_branch and next(flips) else instr
        for instr in p_obf.text
    ]
    return p_obf.with_text(text)


def success_band(n: int, trials: int, confidence: float = THREE_SIGMA) -> Tuple[float, float]:
    """Binomial band of the success rate for `trials` uniform guesses."""
    if trials <= 0:
        return 0.0, 1.0
    low, high = binom.interval(confidence, trials, 0.5 ** n)
    return float(low) / trials, float(high) / trials


def brute_force(
    p_obf: Program,
    p_plain: Program,
    mode: str = AttackMode.EXHAUSTIVE,
    trials: int = 100_000,
    seed: Optional[int] = None,
) -> AttackReport:
    """
    Guess inversion masks until the plain program is reconstructed.

    Args:
        p_obf: Obfuscated program (what the attacker holds)
        p_plain: Ground-truth original (harness success oracle)
        mode: 'exhaustive' enumerates all 2^n masks; 'sampled' draws uniform masks
        trials: Guesses in sampled mode
        seed: RNG seed for sampled mode

    Returns:
        AttackReport

    Raises:
        AttackError: If exhaustive mode is requested for n > 20, or trials < 1
        ValueError: If the programs are not an obfuscation pair
    """
    mode = AttackMode(mode)
    required = required_flips(p_obf, p_plain)
    n = len(required)
    theoretical = 0.5 ** n

    if mode is AttackMode.EXHAUSTIVE:
        if n > EXHAUSTIVE_MAX_BRANCHES:
            raise AttackError(
                f"Exhaustive search is limited to n <= {EXHAUSTIVE_MAX_BRANCHES} branches, got {n}"
            )
        total, successes = _exhaustive(p_obf, p_plain, required)
        band = (theoretical, theoretical)
    else:
        if trials < 1:
            raise AttackError(f"trials must be >= 1, got {trials}")
        total, successes = trials, _sampled(required, trials, np.random.default_rng(seed))
        band = success_band(n, trials)

    report = AttackReport(
        n=n,
        trials=total,
        successes=successes,
        empirical_p=successes / total,
        theoretical_p=theoretical,
        mode=mode.value,
        band=band,
    )
    logger.info(
        f"{mode.value} attack: n={n}, {successes}/{total} masks reconstruct the original"
    )
    return report


def _exhaustive(p_obf: Program, p_plain: Program, required: np.ndarray) -> Tuple[int, int]:
    n = len(required)
    total = 1 << n
    if n <= STRUCTURAL_CHECK_MAX_BRANCHES:
        successes = 0
        for value in range(total):
            guess = np.array([(value >> i) & 1 for i in range(n)], dtype=np.uint8)
            if reconstruct(p_obf, guess) == p_plain:
                successes += 1
        return total, successes
    masks = np.arange(total, dtype=np.uint32)
    matches = np.ones(total, dtype=bool)
    for i, bit in enumerate(required.tolist()):
        matches &= ((masks >> np.uint32(i)) & np.uint32(1)) == bit
    return total, int(matches.sum())


def _sampled(required: np.ndarray, trials: int, rng: np.random.Generator) -> int:
    n = len(required)
    if n == 0:
        return trials
    successes = 0
    remaining = trials
    while remaining:
        chunk = min(remaining, SAMPLE_CHUNK)
        guesses = rng.integers(0, 2, size=(chunk, n), dtype=np.uint8)
        successes += int((guesses == required).all(axis=1).sum())
        remaining -= chunk
    return successes


def branch_difference(p_a: Program, p_b: Program) -> int:
    """Branches whose opcodes differ between two binaries of the same program."""
    return len(p_a.differing_branches(p_b))
