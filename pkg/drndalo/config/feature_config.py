"""
Feature layout for stealth classification.

Each branching-basic-block sample is encoded slot by slot, slot 0 being the
branch itself and slot i the i-th instruction before it:

    slot i: one-hot opcode (32 mnemonics + absent)
            one-hot rs1, rs2, rd (32 registers + absent, each)
    tail:   br_up bit (1 for a backward branch)
"""

from typing import List

from drndalo.config.isa_config import NUM_OPCODES, NUM_REGISTERS

OPCODE_CLASSES = NUM_OPCODES + 1          # + absent
REGISTER_CLASSES = NUM_REGISTERS + 1      # + absent
ABSENT_OPCODE = OPCODE_CLASSES - 1
ABSENT_REGISTER = REGISTER_CLASSES - 1

SLOT_FIELDS = ('op', 'rs1', 'rs2', 'rd')
SLOT_WIDTH = OPCODE_CLASSES + 3 * REGISTER_CLASSES


class StealthConfig:
    """Defaults of the stealth evaluation pipeline."""

    DEFAULT_WINDOWS = (1, 2, 4, 8)
    DEFAULT_MODEL = 'logreg'
    MODELS = ('logreg', 'tree', 'forest')
    DEFAULT_SPLIT_SEED = 0
    TRAIN_FRACTION = 0.75
    PLAIN_KEEP_FRACTION = 1 / 3
    MIN_PROGRAMS = 4

    # Logistic regression
    LEARNING_RATE = 0.5
    L2_PENALTY = 1e-4
    TOLERANCE = 1e-6
    MAX_EPOCHS = 5000

    # Trees
    MAX_DEPTH = 12
    MIN_LEAF = 5
    FOREST_TREES = 25

    @classmethod
    def validate_model(cls, model: str) -> str:
        if model not in cls.MODELS:
            raise ValueError(f"Unknown model '{model}'. Available: {list(cls.MODELS)}")
        return model

    @classmethod
    def validate_windows(cls, windows) -> List[int]:
        windows = [int(w) for w in windows]
        if not windows:
            raise ValueError("At least one window size is required")
        if any(w < 1 for w in windows):
            raise ValueError(f"Window sizes must be >= 1, got {windows}")
        if windows != sorted(set(windows)):
            raise ValueError(f"Window sizes must be strictly ascending, got {windows}")
        return windows


def feature_width(window: int) -> int:
    """Length of the feature vector for window size I."""
    return window * SLOT_WIDTH + 1


def feature_names(window: int) -> List[str]:
    """
    Column names in encoding order, e.g. 'op0_beq', 'rs1_0_x10', 'br_up'.
    """
    from drndalo.isa.instruction import Opcode

    names: List[str] = []
    opcodes = [op.value for op in Opcode] + ['absent']
    registers = [f'x{i}' for i in range(NUM_REGISTERS)] + ['absent']
    for slot in range(window):
        names.extend(f'op{slot}_{op}' for op in opcodes)
        for reg_field in SLOT_FIELDS[1:]:
            names.extend(f'{reg_field}_{slot}_{reg}' for reg in registers)
    names.append('br_up')
    return names
