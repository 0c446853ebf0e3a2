"""
Drndalo Stealth Module - Classifier-Based Stealth Evaluation

Builds plain/obfuscated branch datasets from a corpus, encodes windowed
branching-basic-block features, and measures how well classifiers can tell
inverted branches apart.

## Quick Start

```python
from drndalo.stealth import build_dataset, preprocess, train_and_evaluate, window_sweep

dataset = build_dataset(corpus, key, scheme, window=4)
train, test = preprocess(dataset, split_seed=0)
report = train_and_evaluate(train, test, model='tree')
print(report.accuracy, report.confusion)

reports = window_sweep(corpus, key, scheme, [1, 2, 4, 8])
```
"""

from drndalo.stealth.cfg import BasicBlock, basic_blocks, branch_windows, find_leaders
from drndalo.stealth.classifiers import DecisionTree, LogisticRegression, RandomForest, make_classifier
from drndalo.stealth.dataset import BbblDataset, BbblSample, WindowRecord, build_dataset, relabel
from drndalo.stealth.evaluation import (
    ClassifierReport,
    confusion_matrix,
    gain_captured,
    sweep_dataset,
    train_and_evaluate,
    window_sweep,
)
from drndalo.stealth.preprocessing import EncodedSet, encode, preprocess, split_programs

__all__ = [
    # Blocks
    'BasicBlock',
    'basic_blocks',
    'branch_windows',
    'find_leaders',

    # Dataset
    'BbblDataset',
    'BbblSample',
    'WindowRecord',
    'build_dataset',
    'relabel',

    # Preprocessing
    'EncodedSet',
    'encode',
    'preprocess',
    'split_programs',

    # Models and evaluation
    'DecisionTree',
    'LogisticRegression',
    'RandomForest',
    'make_classifier',
    'ClassifierReport',
    'confusion_matrix',
    'gain_captured',
    'sweep_dataset',
    'train_and_evaluate',
    'window_sweep',
]
