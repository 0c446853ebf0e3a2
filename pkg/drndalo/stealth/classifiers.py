"""
Binary classifiers over one-hot branch features, implemented on numpy.

    LogisticRegression  single linear layer + sigmoid, full-batch gradient
                        descent with an L2 penalty
    DecisionTree        greedy Gini splits on binary features
    RandomForest        bagged decision trees with per-split feature sampling
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from drndalo.config.feature_config import StealthConfig

logger = logging.getLogger('drndalo.stealth')


class LogisticRegression:
    """Full-batch gradient descent on mean binary cross-entropy + L2."""

    def __init__(
        self,
        learning_rate: float = StealthConfig.LEARNING_RATE,
        l2: float = StealthConfig.L2_PENALTY,
        tol: float = StealthConfig.TOLERANCE,
        max_epochs: int = StealthConfig.MAX_EPOCHS,
    ):
        if learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {learning_rate}")
        if l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {l2}")
        self.learning_rate = learning_rate
        self.l2 = l2
        self.tol = tol
        self.max_epochs = max_epochs
        self.weights: Optional[np.ndarray] = None
        self.bias = 0.0
        self.epochs = 0
        self.converged = False
        self.loss = float('nan')

    def fit(self, X: np.ndarray, y: np.ndarray) -> 'LogisticRegression':
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        previous = np.inf
        self.converged = False
        for epoch in range(1, self.max_epochs + 1):
            p = _sigmoid(X @ w + b)
            loss = _log_loss(y, p) + 0.5 * self.l2 * float(w @ w)
            if abs(previous - loss) < self.tol:
                self.converged = True
                break
            previous = loss
            error = p - y
            w -= self.learning_rate * (X.T @ error / n + self.l2 * w)
            b -= self.learning_rate * float(error.mean())
        self.weights, self.bias = w, b
        self.epochs, self.loss = epoch, loss
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if self.weights is None:
            raise RuntimeError("Model is not fitted")
        return _sigmoid(np.asarray(X, dtype=np.float64) @ self.weights + self.bias)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.uint8)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


@dataclass
class _Node:
    prediction: int
    feature: int = -1
    zero: Optional['_Node'] = None
    one: Optional['_Node'] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _gini(positives: np.ndarray, total: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        p = np.where(total > 0, positives / np.maximum(total, 1), 0.0)
    return 1.0 - p ** 2 - (1.0 - p) ** 2


class DecisionTree:
    """Gini decision tree on binary features."""

    def __init__(
        self,
        max_depth: int = StealthConfig.MAX_DEPTH,
        min_leaf: int = StealthConfig.MIN_LEAF,
        max_features: Optional[int] = None,
        seed: Optional[int] = None,
    ):
        if max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {max_depth}")
        if min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self._rng = np.random.default_rng(seed)
        self.root: Optional[_Node] = None
        self.converged = True

    def fit(self, X: np.ndarray, y: np.ndarray) -> 'DecisionTree':
        X = np.asarray(X, dtype=np.uint8)
        y = np.asarray(y, dtype=np.int64)
        self.root = self._grow(X, y, np.arange(len(y)), 0)
        return self

    def _grow(self, X: np.ndarray, y: np.ndarray, rows: np.ndarray, depth: int) -> _Node:
        n = len(rows)
        positives = int(y[rows].sum())
        node = _Node(prediction=int(positives * 2 > n))
        if depth >= self.max_depth or n < 2 * self.min_leaf or positives in (0, n):
            return node

        Xs = X[rows].astype(np.int64)
        ones = Xs.sum(axis=0)
        pos_ones = y[rows] @ Xs
        zeros = n - ones
        pos_zeros = positives - pos_ones
        impurity = (ones * _gini(pos_ones, ones) + zeros * _gini(pos_zeros, zeros)) / n

        valid = (ones >= self.min_leaf) & (zeros >= self.min_leaf)
        if self.max_features is not None and self.max_features < X.shape[1]:
            allowed = np.zeros(X.shape[1], dtype=bool)
            allowed[self._rng.choice(X.shape[1], size=self.max_features, replace=False)] = True
            valid &= allowed
        if not valid.any():
            return node

        impurity = np.where(valid, impurity, np.inf)
        best = int(np.argmin(impurity))
        parent = float(_gini(np.array([positives]), np.array([n]))[0])
        if impurity[best] >= parent - 1e-12:
            return node

        column = X[rows, best]
        node.feature = best
        node.zero = self._grow(X, y, rows[column == 0], depth + 1)
        node.one = self._grow(X, y, rows[column == 1], depth + 1)
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.predict(X).astype(np.float64)

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.root is None:
            raise RuntimeError("Model is not fitted")
        X = np.asarray(X)
        out = np.zeros(len(X), dtype=np.uint8)
        self._route(self.root, X, np.arange(len(X)), out)
        return out

    def _route(self, node: _Node, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
        if node.is_leaf or len(rows) == 0:
            out[rows] = node.prediction
            return
        column = X[rows, node.feature]
        self._route(node.zero, X, rows[column == 0], out)
        self._route(node.one, X, rows[column == 1], out)

    def depth(self) -> int:
        def walk(node: Optional[_Node]) -> int:
            if node is None or node.is_leaf:
                return 0
            return 1 + max(walk(node.zero), walk(node.one))
        return walk(self.root)


class RandomForest:
    """Bootstrap-aggregated Gini trees with sqrt(d) features tried per split."""

    def __init__(
        self,
        n_trees: int = StealthConfig.FOREST_TREES,
        max_depth: int = StealthConfig.MAX_DEPTH,
        min_leaf: int = StealthConfig.MIN_LEAF,
        seed: Optional[int] = None,
    ):
        if n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {n_trees}")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.seed = seed
        self.trees: List[DecisionTree] = []
        self.converged = True

    def fit(self, X: np.ndarray, y: np.ndarray) -> 'RandomForest':
        X = np.asarray(X, dtype=np.uint8)
        y = np.asarray(y)
        rng = np.random.default_rng(self.seed)
        max_features = max(1, int(np.sqrt(X.shape[1])))
        self.trees = []
        for _ in range(self.n_trees):
            rows = rng.integers(0, len(y), size=len(y))
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_leaf=self.min_leaf,
                max_features=max_features,
                seed=int(rng.integers(0, 2**31)),
            )
            self.trees.append(tree.fit(X[rows], y[rows]))
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if not self.trees:
            raise RuntimeError("Model is not fitted")
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.uint8)


def make_classifier(name: str, seed: Optional[int] = None):
    """
    Build an unfitted classifier by name ('logreg', 'tree' or 'forest').

    Raises:
        ValueError: If the name is unknown
    """
    StealthConfig.validate_model(name)
    if name == 'logreg':
        return LogisticRegression()
    if name == 'tree':
        return DecisionTree(seed=seed)
    return RandomForest(seed=seed)
