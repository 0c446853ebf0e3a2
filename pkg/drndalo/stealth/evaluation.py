"""
Classifier training, confusion matrices and window-size sweeps.
"""

import json
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from drndalo.config.feature_config import StealthConfig
from drndalo.config.hash_config import ObfKey
from drndalo.errors import DatasetError
from drndalo.isa.program import Program
from drndalo.obfuscation.keyed_hash import HashScheme
from drndalo.stealth.classifiers import make_classifier
from drndalo.stealth.dataset import BbblDataset, build_dataset
from drndalo.stealth.preprocessing import EncodedSet, preprocess

logger = logging.getLogger('drndalo.stealth')


@dataclass(frozen=True)
class ClassifierReport:
    """
    Test-set performance of one classifier.

    Attributes:
        model: 'logreg', 'tree' or 'forest'
        accuracy: Fraction of correct test predictions
        confusion: [[true plain -> plain, plain -> obf], [obf -> plain, obf -> obf]]
        window: Window size I
        train_programs, test_programs: Program counts on each side of the split
        train_samples, test_samples: Sample counts on each side
        converged: False when training stopped at its epoch limit
    """
    model: str
    accuracy: float
    confusion: List[List[int]]
    window: int
    train_programs: int
    test_programs: int
    train_samples: int = 0
    test_samples: int = 0
    converged: bool = True

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> List[List[int]]:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    matrix = np.zeros((2, 2), dtype=np.int64)
    np.add.at(matrix, (y_true, y_pred), 1)
    return matrix.tolist()


def train_and_evaluate(
    train: EncodedSet,
    test: EncodedSet,
    model: str = StealthConfig.DEFAULT_MODEL,
    seed: Optional[int] = 0,
) -> ClassifierReport:
    """
    Fit a classifier on train and score it on test only.

    Raises:
        DatasetError: If train is empty or lacks a class, or test is empty
        ValueError: If the model name is unknown
    """
    if len(train) == 0 or len(test) == 0:
        raise DatasetError("Train and test sets must both be non-empty")
    if set(np.unique(train.y).tolist()) != {0, 1}:
        raise DatasetError("Both classes must be present in the training set")

    classifier = make_classifier(model, seed=seed).fit(train.X, train.y)
    predictions = classifier.predict(test.X)
    confusion = confusion_matrix(test.y, predictions)
    accuracy = (confusion[0][0] + confusion[1][1]) / len(test)

    converged = bool(getattr(classifier, 'converged', True))
    if not converged:
        logger.warning(f"{model} did not converge (window {train.window})")

    return ClassifierReport(
        model=model,
        accuracy=accuracy,
        confusion=confusion,
        window=train.window,
        train_programs=len(train.programs),
        test_programs=len(test.programs),
        train_samples=len(train),
        test_samples=len(test),
        converged=converged,
    )


def sweep_dataset(
    dataset: BbblDataset,
    windows: Sequence[int],
    model: str = StealthConfig.DEFAULT_MODEL,
    split_seed: int = StealthConfig.DEFAULT_SPLIT_SEED,
) -> List[ClassifierReport]:
    """One report per window, truncating a dataset built at the largest window."""
    windows = StealthConfig.validate_windows(windows)
    reports = []
    for window in windows:
        train, test = preprocess(dataset, split_seed=split_seed, window=window)
        report = train_and_evaluate(train, test, model, seed=split_seed)
        logger.info(f"window={window} model={model} accuracy={report.accuracy:.3f}")
        reports.append(report)
    return reports


def window_sweep(
    corpus: Mapping[str, Program],
    key: ObfKey,
    scheme: HashScheme,
    windows: Sequence[int],
    model: str = StealthConfig.DEFAULT_MODEL,
    split_seed: int = StealthConfig.DEFAULT_SPLIT_SEED,
    workers: int = 1,
) -> List[ClassifierReport]:
    """
    Classifier reports for ascending window sizes, same split seed throughout.

    The dataset is built once at the largest window.
    """
    windows = StealthConfig.validate_windows(windows)
    dataset = build_dataset(corpus, key, scheme, windows[-1], workers=workers)
    return sweep_dataset(dataset, windows, model, split_seed)


def gain_captured(reports: Sequence[ClassifierReport], chance: float = 0.5) -> float:
    """
    Share of the largest window's gain over chance already reached by the smallest.

    Returns 1.0 when the largest window gains nothing.
    """
    first, last = reports[0].accuracy - chance, reports[-1].accuracy - chance
    if last <= 0:
        return 1.0
    return first / last
