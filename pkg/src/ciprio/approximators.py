"""Value-function approximators: a small ReLU regressor and a decision tree.

Both map an encoded test state to a scalar priority. The network is
trained by mini-batch gradient descent on squared error; the tree is
refit from scratch on each batch with binarized targets.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

CHECKPOINT_VERSION = 1


class TrainingDivergenceError(RuntimeError):
    """Loss became non-finite; the caller should reduce the learning rate."""


@dataclass(frozen=True)
class Experience:
    state: tuple[float, ...]
    reward: float

    def __post_init__(self):
        if not np.isfinite(self.reward):
            raise ValueError("reward must be finite")


class ReplayBuffer:
    """Bounded FIFO of experiences; oldest entries are evicted first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._entries: deque[Experience] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._entries)

    def add(self, experience: Experience) -> None:
        self._entries.append(experience)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Experience]:
        """Uniform sample without replacement, the whole buffer if smaller."""
        if len(self._entries) <= batch_size:
            return list(self._entries)
        idx = rng.choice(len(self._entries), size=batch_size, replace=False)
        entries = list(self._entries)
        return [entries[i] for i in sorted(idx)]


class MlpRegressor:
    """Fully-connected ReLU network with identity output, trained on MSE."""

    def __init__(
        self,
        input_dim: int,
        hidden_sizes: Sequence[int] = (32,),
        seed: int = 0,
    ):
        if input_dim < 1:
            raise ValueError("input_dim must be positive")
        if not hidden_sizes or any(h < 1 for h in hidden_sizes):
            raise ValueError("hidden_sizes must be positive integers")
        self.input_dim = input_dim
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        rng = np.random.default_rng(seed)
        sizes = [input_dim, *self.hidden_sizes, 1]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            r = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-r, r, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def _forward(self, X: np.ndarray) -> list[np.ndarray]:
        """Layer activations, input included; hidden layers are rectified."""
        acts = [X]
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ W + b
            if i < len(self.weights) - 1:
                z = np.maximum(z, 0.0)
            acts.append(z)
        return acts

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        if X.shape[1] != self.input_dim:
            raise ValueError(
                f"state length {X.shape[1]} does not match input dim {self.input_dim}"
            )
        out = self._forward(X)[-1][:, 0]
        return out[0] if squeeze else out

    def loss_and_gradients(
        self, X: np.ndarray, y: np.ndarray
    ) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
        """Mean squared error and its gradients w.r.t. weights and biases."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        n = X.shape[0]
        acts = self._forward(X)
        pred = acts[-1][:, 0]
        err = pred - y
        loss = float(np.mean(err**2))

        grad_w = [np.zeros_like(W) for W in self.weights]
        grad_b = [np.zeros_like(b) for b in self.biases]
        delta = (2.0 * err / n)[:, None]
        for i in range(len(self.weights) - 1, -1, -1):
            grad_w[i] = acts[i].T @ delta
            grad_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        return loss, grad_w, grad_b

    def fit(
        self,
        X: np.ndarray,
        y: np.ndarray,
        learning_rate: float = 0.05,
        epochs: int = 1,
    ) -> float:
        """Full-batch gradient descent; returns the final loss."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] == 0:
            raise ValueError("cannot fit on an empty batch")
        loss = np.inf
        for _ in range(epochs):
            loss, grad_w, grad_b = self.loss_and_gradients(X, y)
            if not np.isfinite(loss):
                raise TrainingDivergenceError(f"non-finite loss {loss}")
            for W, b, gW, gb in zip(self.weights, self.biases, grad_w, grad_b):
                W -= learning_rate * gW
                b -= learning_rate * gb
        return float(loss)

    # Flat parameter views, used by checkpoints and gradient checking.

    def get_params(self) -> np.ndarray:
        return np.concatenate(
            [W.ravel() for W in self.weights] + [b.ravel() for b in self.biases]
        )

    def set_params(self, flat: np.ndarray) -> None:
        pos = 0
        for W in self.weights:
            W[...] = flat[pos : pos + W.size].reshape(W.shape)
            pos += W.size
        for b in self.biases:
            b[...] = flat[pos : pos + b.size]
            pos += b.size
        if pos != flat.size:
            raise ValueError("parameter vector length mismatch")

    def to_dict(self) -> dict:
        return {
            "version": CHECKPOINT_VERSION,
            "kind": "network",
            "input_dim": self.input_dim,
            "hidden_sizes": list(self.hidden_sizes),
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MlpRegressor":
        model = cls(data["input_dim"], data["hidden_sizes"])
        model.weights = [np.array(W, dtype=float) for W in data["weights"]]
        model.biases = [np.array(b, dtype=float) for b in data["biases"]]
        return model


def gini_impurity(labels: Sequence[int]) -> float:
    """1 - sum of squared class fractions; 0 for a pure set."""
    if len(labels) == 0:
        raise ValueError("gini_impurity of an empty set is undefined")
    labels = np.asarray(labels)
    p1 = np.mean(labels == 1)
    return float(1.0 - (p1**2 + (1.0 - p1) ** 2))


def entropy_impurity(labels: Sequence[int]) -> float:
    if len(labels) == 0:
        raise ValueError("entropy of an empty set is undefined")
    labels = np.asarray(labels)
    p1 = np.mean(labels == 1)
    out = 0.0
    for p in (p1, 1.0 - p1):
        if p > 0:
            out -= p * np.log2(p)
    return float(out)


_CRITERIA = {"gini": gini_impurity, "entropy": entropy_impurity}


@dataclass
class TreeNode:
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    value: Optional[float] = None  # positive-label fraction at a leaf

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


class DecisionTreeModel:
    """Greedy binary tree over axis-aligned splits; leaves predict the
    fraction of positive labels seen during fitting."""

    def __init__(
        self,
        criterion: str = "gini",
        max_depth: int = 20,
        min_samples_split: int = 3,
    ):
        if criterion not in _CRITERIA:
            raise ValueError(f"criterion must be one of {sorted(_CRITERIA)}")
        if min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.root: Optional[TreeNode] = None
        self.input_dim: Optional[int] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTreeModel":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=int)
        if X.shape[0] == 0:
            raise ValueError("cannot fit on an empty batch")
        self.input_dim = X.shape[1]
        self.root = self._build(X, y, depth=0)
        return self

    def _build(self, X: np.ndarray, y: np.ndarray, depth: int) -> TreeNode:
        value = float(np.mean(y))
        impurity = _CRITERIA[self.criterion](y)
        if (
            impurity == 0.0
            or depth >= self.max_depth
            or len(y) < self.min_samples_split
        ):
            return TreeNode(value=value)

        split = self._best_split(X, y)
        if split is None:
            return TreeNode(value=value)
        feature, threshold = split
        mask = X[:, feature] <= threshold
        return TreeNode(
            feature=feature,
            threshold=threshold,
            left=self._build(X[mask], y[mask], depth + 1),
            right=self._build(X[~mask], y[~mask], depth + 1),
            value=value,
        )

    def _impurity_from_fraction(self, p1: np.ndarray) -> np.ndarray:
        if self.criterion == "gini":
            return 1.0 - (p1**2 + (1.0 - p1) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -(p1 * np.log2(p1)) - (1.0 - p1) * np.log2(1.0 - p1)
        return np.nan_to_num(out)

    def _best_split(self, X: np.ndarray, y: np.ndarray) -> Optional[tuple[int, float]]:
        """Highest impurity decrease; ties go to the lowest feature index,
        then the lowest threshold. Thresholds are midpoints of consecutive
        distinct feature values."""
        n = len(y)
        parent = float(self._impurity_from_fraction(np.array(np.mean(y))))
        best = None
        best_gain = 0.0
        for feature in range(X.shape[1]):
            order = np.argsort(X[:, feature], kind="stable")
            xs = X[order, feature]
            ys = y[order]
            cut = np.nonzero(xs[1:] != xs[:-1])[0]  # last index of each left block
            if cut.size == 0:
                continue
            pos = np.cumsum(ys)
            n_left = cut + 1.0
            n_right = n - n_left
            p_left = pos[cut] / n_left
            p_right = (pos[-1] - pos[cut]) / n_right
            weighted = (
                n_left / n * self._impurity_from_fraction(p_left)
                + n_right / n * self._impurity_from_fraction(p_right)
            )
            gains = parent - weighted
            top = float(np.max(gains))
            if top > best_gain + 1e-12:
                # thresholds ascend with the sort, so the first index at the
                # maximum is the lowest qualifying threshold
                i = int(np.nonzero(gains >= top - 1e-12)[0][0])
                best_gain = gains[i]
                best = (feature, float((xs[cut[i]] + xs[cut[i] + 1]) / 2.0))
        return best

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.root is None:
            raise RuntimeError("tree has not been fitted")
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        if X.shape[1] != self.input_dim:
            raise ValueError(
                f"state length {X.shape[1]} does not match input dim {self.input_dim}"
            )
        out = np.array([self._descend(row) for row in X])
        return out[0] if squeeze else out

    def _descend(self, row: np.ndarray) -> float:
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.value

    def depth(self) -> int:
        def walk(node: Optional[TreeNode]) -> int:
            if node is None or node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def to_dict(self) -> dict:
        def encode(node: Optional[TreeNode]):
            if node is None:
                return None
            return {
                "feature": node.feature,
                "threshold": node.threshold,
                "value": node.value,
                "left": encode(node.left),
                "right": encode(node.right),
            }

        return {
            "version": CHECKPOINT_VERSION,
            "kind": "tree",
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "input_dim": self.input_dim,
            "root": encode(self.root),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTreeModel":
        model = cls(data["criterion"], data["max_depth"], data["min_samples_split"])
        model.input_dim = data["input_dim"]

        def decode(blob) -> Optional[TreeNode]:
            if blob is None:
                return None
            return TreeNode(
                feature=blob["feature"],
                threshold=blob["threshold"],
                value=blob["value"],
                left=decode(blob["left"]),
                right=decode(blob["right"]),
            )

        model.root = decode(data["root"])
        return model


def fit_neural(
    model: MlpRegressor,
    batch: Sequence[Experience],
    learning_rate: float = 0.05,
    epochs: int = 1,
) -> MlpRegressor:
    """Train the network in place on (state, reward) pairs."""
    if not batch:
        raise ValueError("cannot fit on an empty batch")
    X = np.array([e.state for e in batch], dtype=float)
    y = np.array([e.reward for e in batch], dtype=float)
    model.fit(X, y, learning_rate=learning_rate, epochs=epochs)
    return model


def fit_tree(
    batch: Sequence[Experience],
    criterion: str = "gini",
    max_depth: int = 20,
    min_samples_split: int = 3,
) -> DecisionTreeModel:
    """Induce a tree from experiences; targets are binarized (reward > 0)."""
    if not batch:
        raise ValueError("cannot fit on an empty batch")
    X = np.array([e.state for e in batch], dtype=float)
    y = np.array([1 if e.reward > 0 else 0 for e in batch])
    return DecisionTreeModel(criterion, max_depth, min_samples_split).fit(X, y)


def save_checkpoint(model, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh)


def load_checkpoint(path):
    with open(path) as fh:
        data = json.load(fh)
    if data.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data.get('version')!r}")
    if data["kind"] == "network":
        return MlpRegressor.from_dict(data)
    if data["kind"] == "tree":
        return DecisionTreeModel.from_dict(data)
    raise ValueError(f"unknown checkpoint kind {data['kind']!r}")
