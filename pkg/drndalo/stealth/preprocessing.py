"""
Program-level train/test split, plain-branch subsampling and one-hot encoding.
"""

import logging
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from drndalo.config.feature_config import (
    ABSENT_OPCODE,
    ABSENT_REGISTER,
    OPCODE_CLASSES,
    REGISTER_CLASSES,
    SLOT_WIDTH,
    StealthConfig,
    feature_width,
)
from drndalo.errors import DatasetError
from drndalo.isa.instruction import OPCODE_INDEX
from drndalo.stealth.dataset import NO_REGISTER, BbblDataset, BbblSample

logger = logging.getLogger('drndalo.stealth')


@dataclass
class EncodedSet:
    """
    Attributes:
        X: (samples, feature_width(window)) uint8 one-hot matrix
        y: (samples,) uint8 labels
        program_ids: Program id of each row
        window: Window size I the matrix was encoded with
    """
    X: np.ndarray
    y: np.ndarray
    program_ids: List[str]
    window: int

    def __len__(self) -> int:
        return len(self.y)

    @property
    def programs(self) -> List[str]:
        return sorted(set(self.program_ids))

    def class_counts(self) -> Tuple[int, int]:
        ones = int(self.y.sum())
        return len(self.y) - ones, ones


def encode(samples: Sequence[BbblSample], window: int) -> np.ndarray:
    """
    One-hot feature matrix; slot 0 is the branch, slot i the i-th instruction before it.
    """
    X = np.zeros((len(samples), feature_width(window)), dtype=np.uint8)
    reg_base = (OPCODE_CLASSES, OPCODE_CLASSES + REGISTER_CLASSES, OPCODE_CLASSES + 2 * REGISTER_CLASSES)
    for row, sample in enumerate(samples):
        records = sample.window[::-1]
        for slot in range(window):
            offset = slot * SLOT_WIDTH
            if slot < len(records):
                record = records[slot]
                X[row, offset + OPCODE_INDEX[record.opcode]] = 1
                for base, reg in zip(reg_base, (record.rs1, record.rs2, record.rd)):
                    X[row, offset + base + (ABSENT_REGISTER if reg == NO_REGISTER else reg)] = 1
            else:
                X[row, offset + ABSENT_OPCODE] = 1
                for base in reg_base:
                    X[row, offset + base + ABSENT_REGISTER] = 1
        X[row, -1] = sample.br_up
    return X


def split_programs(
    program_ids: Sequence[str],
    train_fraction: float = StealthConfig.TRAIN_FRACTION,
    seed: int = StealthConfig.DEFAULT_SPLIT_SEED,
) -> Tuple[List[str], List[str]]:
    """
    Deterministic disjoint split of program ids.

    Both sides keep at least one program.

    Raises:
        ValueError: If train_fraction is not in (0, 1) or there are fewer than two ids
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    ids = sorted(set(program_ids))
    if len(ids) < 2:
        raise ValueError(f"Need at least two programs to split, got {len(ids)}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_train = min(len(ids) - 1, max(1, round(len(ids) * train_fraction)))
    return sorted(ids[:n_train]), sorted(ids[n_train:])


def preprocess(
    dataset: BbblDataset,
    split_seed: int = StealthConfig.DEFAULT_SPLIT_SEED,
    window: Optional[int] = None,
    train_fraction: float = StealthConfig.TRAIN_FRACTION,
    plain_keep_fraction: float = StealthConfig.PLAIN_KEEP_FRACTION,
) -> Tuple[EncodedSet, EncodedSet]:
    """
    Split by program, subsample training label-0 samples, one-hot encode.

    Args:
        dataset: Labeled samples
        split_seed: Seed of the program split and of the subsampling
        window: Window size to encode (defaults to the dataset's)
        train_fraction: Fraction of programs used for training
        plain_keep_fraction: Fraction of training label-0 samples kept

    Returns:
        (train, test)

    Raises:
        DatasetError: With fewer than four programs, or when a class is
            missing from the training set after subsampling
    """
    window = window or dataset.window
    ids = dataset.program_ids
    if len(ids) < StealthConfig.MIN_PROGRAMS:
        raise DatasetError(
            f"Dataset spans {len(ids)} programs; at least {StealthConfig.MIN_PROGRAMS} are required"
        )
    if window != dataset.window:
        dataset = dataset.truncated(window)

    train_ids, test_ids = split_programs(ids, train_fraction, split_seed)
    train_set = set(train_ids)
    train = [s for s in dataset if s.program_id in train_set]
    test = [s for s in dataset if s.program_id not in train_set]

    rng = np.random.default_rng(split_seed)
    plain_rows = [i for i, s in enumerate(train) if s.label == 0]
    keep = round(len(plain_rows) * plain_keep_fraction)
    kept = set(rng.choice(plain_rows, size=keep, replace=False).tolist()) if keep else set()
    train = [s for i, s in enumerate(train) if s.label == 1 or i in kept]

    labels = {s.label for s in train}
    if labels != {0, 1}:
        missing = sorted({0, 1} - labels)
        raise DatasetError(f"Training set lacks class(es) {missing} after subsampling")

    train_encoded = _encoded(train, window)
    test_encoded = _encoded(test, window)
    logger.info(
        f"Split {len(train_ids)} train / {len(test_ids)} test programs: "
        f"{len(train_encoded)} train samples, {len(test_encoded)} test samples"
    )
    return train_encoded, test_encoded


def _encoded(samples: List[BbblSample], window: int) -> EncodedSet:
    return EncodedSet(
        X=encode(samples, window),
        y=np.array([s.label for s in samples], dtype=np.uint8),
        program_ids=[s.program_id for s in samples],
        window=window,
    )
