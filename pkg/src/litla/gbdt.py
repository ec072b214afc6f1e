"""Gradient-boosted regression trees on logistic loss, from first principles.

Each round fits a depth-bounded regression tree to the negative gradients
(residuals y - p) with exact greedy variance-reduction splits; leaf values
are Newton steps sum(g)/sum(h) clipped to [-4, 4]. Deterministic for a
fixed seed and input order; models serialize to versioned JSON exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MODEL_FORMAT = "litla-gbdt"
MODEL_VERSION = 1
LEAF_CLIP = 4.0


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _log_loss(y, p):
    eps = 1e-15
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _fit_tree(X, grad, hess, max_depth, min_leaf):
    """Greedy regression tree on residuals; returns a nested dict."""

    def leaf(idx):
        g = grad[idx].sum()
        h = hess[idx].sum()
        value = g / max(h, 1e-12)
        return {"leaf": float(np.clip(value, -LEAF_CLIP, LEAF_CLIP))}

    def best_split(idx):
        g = grad[idx]
        total = g.sum()
        n = len(idx)
        if n < 2 * min_leaf:
            return None
        best = None  # (gain, feature, threshold)
        pos = np.arange(1, n)
        sizes_ok = (pos >= min_leaf) & (n - pos >= min_leaf)
        for f in range(X.shape[1]):
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            col_sorted = col[order]
            prefix = np.cumsum(g[order])[:-1]
            # candidate splits between consecutive distinct values only
            ok = sizes_ok & (col_sorted[:-1] != col_sorted[1:])
            if not ok.any():
                continue
            gain = (prefix ** 2 / pos + (total - prefix) ** 2 / (n - pos)
                    - total * total / n)
            gain[~ok] = -np.inf
            at = int(np.argmax(gain))
            if best is None or gain[at] > best[0]:
                thr = (col_sorted[at] + col_sorted[at + 1]) / 2.0
                best = (float(gain[at]), f, float(thr))
        return best

    def build(idx, depth):
        if depth >= max_depth or len(idx) < 2 * min_leaf:
            return leaf(idx)
        split = best_split(idx)
        if split is None or split[0] <= 1e-12:
            return leaf(idx)
        _gain, f, thr = split
        mask = X[idx, f] <= thr
        return {
            "feature": int(f),
            "threshold": thr,
            "left": build(idx[mask], depth + 1),
            "right": build(idx[~mask], depth + 1),
        }

    return build(np.arange(len(grad)), 0)


def _eval_tree(node, X, out=None, idx=None):
    if out is None:
        out = np.zeros(len(X))
        idx = np.arange(len(X))
    if "leaf" in node:
        out[idx] = node["leaf"]
        return out
    mask = X[idx, node["feature"]] <= node["threshold"]
    _eval_tree(node["left"], X, out, idx[mask])
    _eval_tree(node["right"], X, out, idx[~mask])
    return out


@dataclass
class GbdtModel:
    trees: list[dict]
    learning_rate: float
    base_score: float            # log-odds prior
    n_features: int
    loss_curve: list[float] = field(default_factory=list)

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected (n, {self.n_features}) feature matrix")
        z = np.full(len(X), self.base_score)
        for tree in self.trees:
            z += self.learning_rate * _eval_tree(tree, X)
        return z

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)

    def to_json(self) -> str:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "learning_rate": self.learning_rate,
            "base_score": self.base_score,
            "n_features": self.n_features,
            "trees": self.trees,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GbdtModel":
        payload = json.loads(text)
        if payload.get("format") != MODEL_FORMAT:
            raise ValueError("not a litla-gbdt model")
        if payload.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {payload.get('version')}")
        return cls(trees=payload["trees"], learning_rate=payload["learning_rate"],
                   base_score=payload["base_score"], n_features=payload["n_features"])

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "GbdtModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train_gbdt(X, y, n_trees: int = 100, max_depth: int = 3,
               learning_rate: float = 0.1, min_leaf: int = 1,
               seed: int = 0) -> GbdtModel:
    """Boost ``n_trees`` rounds of logistic-loss trees.

    The base score is the log-odds of the positive rate; training requires
    both classes. ``loss_curve`` records the training loss before boosting
    and after every round. ``seed`` is reserved for subsampling variants
    and does not currently affect the exact greedy fit.
    """
    del seed
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, d) with matching labels")
    if set(np.unique(y)) != {0.0, 1.0}:
        raise ValueError("training requires both classes with 0/1 labels")
    if min_leaf < 1:
        raise ValueError("min_leaf must be at least 1")
    rate = float(y.mean())
    rate = min(max(rate, 1e-12), 1.0 - 1e-12)
    base = float(np.log(rate / (1.0 - rate)))
    z = np.full(len(y), base)
    model = GbdtModel(trees=[], learning_rate=learning_rate, base_score=base,
                      n_features=X.shape[1])
    model.loss_curve.append(_log_loss(y, _sigmoid(z)))
    for _round in range(n_trees):
        p = _sigmoid(z)
        grad = y - p
        hess = p * (1.0 - p)
        tree = _fit_tree(X, grad, hess, max_depth, min_leaf)
        model.trees.append(tree)
        z += learning_rate * _eval_tree(tree, X)
        model.loss_curve.append(_log_loss(y, _sigmoid(z)))
    return model
