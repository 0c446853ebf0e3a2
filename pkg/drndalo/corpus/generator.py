"""
Synthetic program generator with a controllable branch-kind distribution.

Generated programs are runnable: every conditional branch either jumps
forward over a few filler instructions or closes a counted loop, so each
program terminates. Loop counters live in s0/s1, which fillers never write;
t5/t6 are never used so the runtime deobfuscation rewrite stays applicable.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from drndalo.isa.assembler import parse_asm
from drndalo.isa.instruction import BranchKind
from drndalo.isa.program import Program

logger = logging.getLogger('drndalo.corpus')

# Relative weights of forward-branch kinds in plain code.
DEFAULT_BRANCH_WEIGHTS: Dict[BranchKind, float] = {
    BranchKind.BLT: 8.0,
    BranchKind.BGE: 2.0,
    BranchKind.BEQ: 6.0,
    BranchKind.BNE: 2.0,
    BranchKind.BLTU: 3.0,
    BranchKind.BGEU: 1.0,
}

UNIFORM_BRANCH_WEIGHTS: Dict[BranchKind, float] = {kind: 1.0 for kind in BranchKind}

FILLER_REGISTERS = ('t0', 't1', 't2', 't3', 't4', 'a0', 'a1', 'a2', 'a3', 'a4', 'a5', 's2', 's3', 's4')
_REG_OPS = ('add', 'sub', 'and', 'or', 'xor', 'slt', 'sltu')
_IMM_OPS = ('addi', 'andi', 'ori', 'xori', 'slti')
_SHIFT_OPS = ('slli', 'srli', 'srai')


@dataclass
class GeneratorConfig:
    """
    Shape of generated programs.

    Attributes:
        branch_weights: Relative frequency of each forward-branch kind
        min_branches, max_branches: Forward branches per program
        loop_probability: Chance that a group of blocks is wrapped in a counted loop
        min_filler, max_filler: Filler instructions before each branch
        max_skip: Most filler instructions a forward branch jumps over
        max_iterations: Largest loop trip count
    """
    branch_weights: Dict[BranchKind, float] = field(default_factory=lambda: dict(DEFAULT_BRANCH_WEIGHTS))
    min_branches: int = 20
    max_branches: int = 40
    loop_probability: float = 0.3
    min_filler: int = 1
    max_filler: int = 6
    max_skip: int = 3
    max_iterations: int = 5

    def __post_init__(self):
        if not self.branch_weights or any(w < 0 for w in self.branch_weights.values()):
            raise ValueError("branch_weights must be non-empty and non-negative")
        if sum(self.branch_weights.values()) <= 0:
            raise ValueError("branch_weights must not all be zero")
        if not 1 <= self.min_branches <= self.max_branches:
            raise ValueError(
                f"Need 1 <= min_branches <= max_branches, got {self.min_branches}, {self.max_branches}"
            )
        if not 0.0 <= self.loop_probability <= 1.0:
            raise ValueError(f"loop_probability must be in [0, 1], got {self.loop_probability}")
        if not 0 <= self.min_filler <= self.max_filler:
            raise ValueError(f"Need 0 <= min_filler <= max_filler, got {self.min_filler}, {self.max_filler}")
        if self.max_skip < 1 or self.max_iterations < 2:
            raise ValueError("max_skip must be >= 1 and max_iterations >= 2")


class ProgramGenerator:
    """Emits random RV32I programs following a GeneratorConfig."""

    def __init__(self, config: Optional[GeneratorConfig] = None, seed: Optional[int] = None):
        self.config = config or GeneratorConfig()
        self.rng = np.random.default_rng(seed)
        kinds = list(self.config.branch_weights)
        weights = np.array([self.config.branch_weights[k] for k in kinds], dtype=float)
        self._kinds = kinds
        self._probabilities = weights / weights.sum()

    # ------------------------------------------------------------------
    # Pieces
    # ------------------------------------------------------------------

    def _reg(self) -> str:
        return FILLER_REGISTERS[self.rng.integers(len(FILLER_REGISTERS))]

    def _filler(self) -> str:
        choice = self.rng.integers(3)
        if choice == 0:
            op = _REG_OPS[self.rng.integers(len(_REG_OPS))]
            return f"{op} {self._reg()}, {self._reg()}, {self._reg()}"
        if choice == 1:
            op = _IMM_OPS[self.rng.integers(len(_IMM_OPS))]
            return f"{op} {self._reg()}, {self._reg()}, {int(self.rng.integers(-64, 64))}"
        op = _SHIFT_OPS[self.rng.integers(len(_SHIFT_OPS))]
        return f"{op} {self._reg()}, {self._reg()}, {int(self.rng.integers(1, 8))}"

    def _fillers(self, low: int, high: int) -> List[str]:
        return [self._filler() for _ in range(int(self.rng.integers(low, high + 1)))]

    def _branch_kind(self) -> BranchKind:
        return self._kinds[self.rng.choice(len(self._kinds), p=self._probabilities)]

    def _block(self, label: str) -> List[str]:
        """Fillers, a forward branch over a short skip, then the branch target label."""
        cfg = self.config
        lines = self._fillers(cfg.min_filler, cfg.max_filler)
        kind = self._branch_kind()
        lines.append(f"{kind.value} {self._reg()}, {self._reg()}, {label}")
        lines.extend(self._fillers(1, cfg.max_skip))
        lines.append(f"{label}:")
        return lines

    # ------------------------------------------------------------------
    # Programs
    # ------------------------------------------------------------------

    def generate_source(self) -> str:
        cfg = self.config
        n_branches = int(self.rng.integers(cfg.min_branches, cfg.max_branches + 1))
        lines = ['.entry main', 'main:']
        lines.extend(f"addi {reg}, zero, {int(self.rng.integers(-100, 100))}" for reg in FILLER_REGISTERS)

        emitted = 0
        loop_id = 0
        while emitted < n_branches:
            group = min(int(self.rng.integers(1, 4)), n_branches - emitted)
            blocks: List[str] = []
            for _ in range(group):
                blocks.extend(self._block(f"L{emitted}"))
                emitted += 1
            if self.rng.random() < cfg.loop_probability:
                iterations = int(self.rng.integers(2, cfg.max_iterations + 1))
                head = f"loop{loop_id}"
                loop_id += 1
                lines.append(f"addi s1, zero, {iterations}")
                lines.append(f"{head}:")
                lines.extend(blocks)
                lines.append("addi s1, s1, -1")
                lines.append(f"blt zero, s1, {head}")
            else:
                lines.extend(blocks)

        lines.extend(['addi a0, zero, 0', 'addi a7, zero, 93', 'ecall'])
        return '\n'.join(
            line if line.endswith(':') or line.startswith('.') else f"    {line}"
            for line in lines
        ) + '\n'

    def generate(self) -> Program:
        return parse_asm(self.generate_source())


def generate_corpus(
    count: int,
    seed: Optional[int] = None,
    config: Optional[GeneratorConfig] = None,
    prefix: str = 'synth',
) -> Dict[str, Program]:
    """
    Generate `count` programs keyed by id ('synth_000', ...).

    Args:
        count: Number of programs
        seed: RNG seed; the same seed reproduces the same corpus
        config: Program shape (default skewed branch distribution)
        prefix: Program id prefix
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    generator = ProgramGenerator(config, seed=seed)
    width = max(3, len(str(count - 1)))
    corpus = {f"{prefix}_{i:0{width}d}": generator.generate() for i in range(count)}
    logger.info(f"Generated {count} synthetic programs (seed={seed})")
    return corpus
