"""Regression forest with variance-reduction splits and feature importances.

Trees are grown exhaustively: every candidate feature is scanned with a
prefix-sum sweep over the sorted column and the split lands at the midpoint
between adjacent distinct values that maximizes the drop in within-node
sum of squared errors.  Randomness (bootstrap resampling and per-node
feature subsets) comes from numpy's PCG64 generators seeded through a
SeedSequence spawn tree, so a forest is a pure function of (data, config):
the same seed reproduces the same forest bit for bit, and per-tree
substreams make tree construction order-independent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .econometrics.design import DesignMatrix
from .errors import DesignError, InsufficientDataError


class MaxFeaturesRule(str, enum.Enum):
    ALL_OVER_THREE = "AllOverThree"
    SQRT = "Sqrt"
    ALL = "All"

    def resolve(self, p: int) -> int:
        if self is MaxFeaturesRule.ALL_OVER_THREE:
            return max(1, p // 3)
        if self is MaxFeaturesRule.SQRT:
            return max(1, int(math.isqrt(p)))
        return p


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 500
    max_features: MaxFeaturesRule = MaxFeaturesRule.ALL_OVER_THREE
    min_leaf: int = 5
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise DesignError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_leaf < 1:
            raise DesignError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if not isinstance(self.max_features, MaxFeaturesRule):
            object.__setattr__(self, "max_features", MaxFeaturesRule(self.max_features))


@dataclass
class _Tree:
    # parallel node arrays; feature == -1 marks a leaf
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    importance: np.ndarray  # summed weighted SSE reduction per feature
    in_bag: np.ndarray  # unique training row indices seen by this tree

    @property
    def n_splits(self) -> int:
        return int(np.sum(self.feature >= 0))

    def predict(self, X: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        out = np.empty(n)
        node = np.zeros(n, dtype=np.int64)
        active = np.arange(n)
        while active.size:
            nd = node[active]
            leaf_mask = self.feature[nd] < 0
            done = active[leaf_mask]
            out[done] = self.value[nd[leaf_mask]]
            active = active[~leaf_mask]
            if not active.size:
                break
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
        return out


@dataclass(frozen=True)
class Forest:
    trees: tuple[_Tree, ...]
    feature_names: tuple[str, ...]
    config: ForestConfig
    n_train: int

    @property
    def has_splits(self) -> bool:
        return any(t.n_splits > 0 for t in self.trees)

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise DesignError(
                f"feature matrix has shape {X.shape}, expected (*, {len(self.feature_names)})"
            )
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)


@dataclass(frozen=True)
class ImportanceReport:
    gini: dict[str, float]
    permutation: dict[str, float]
    repeats: int
    seed: int
    no_splits: bool = False

    def to_dict(self) -> dict:
        return {
            "gini": self.gini,
            "permutation": self.permutation,
            "repeats": self.repeats,
            "seed": self.seed,
            "no_splits": self.no_splits,
        }


def _best_split(xs: np.ndarray, ys: np.ndarray, min_leaf: int):
    """Best (threshold, children_sse) on one sorted feature, or None."""
    m = xs.size
    idx = np.arange(min_leaf, m - min_leaf + 1)
    if idx.size == 0:
        return None
    distinct = xs[idx] > xs[idx - 1]
    idx = idx[distinct]
    if idx.size == 0:
        return None
    csum = np.cumsum(ys)
    csq = np.cumsum(ys * ys)
    left_n = idx.astype(float)
    left_sum = csum[idx - 1]
    left_sq = csq[idx - 1]
    right_n = m - left_n
    right_sum = csum[-1] - left_sum
    right_sq = csq[-1] - left_sq
    sse = (left_sq - left_sum**2 / left_n) + (right_sq - right_sum**2 / right_n)
    j = int(np.argmin(sse))
    pos = idx[j]
    return 0.5 * (xs[pos - 1] + xs[pos]), float(sse[j])


def _grow_tree(
    X: np.ndarray, y: np.ndarray, config: ForestConfig, rng: np.random.Generator
) -> _Tree:
    n, p = X.shape
    m_try = config.max_features.resolve(p)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    importance = np.zeros(p)

    if config.bootstrap:
        rows = rng.integers(0, n, size=n)
    else:
        rows = np.arange(n)
    Xb, yb = X[rows], y[rows]

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def build(node: int, idx: np.ndarray):
        ys = yb[idx]
        m = ys.size
        mean = float(ys.mean())
        value[node] = mean
        sse_parent = float(ys @ ys) - m * mean * mean
        if m < 2 * config.min_leaf or sse_parent <= 0.0:
            return
        if m_try >= p:
            candidates = np.arange(p)
        else:
            candidates = np.sort(rng.choice(p, size=m_try, replace=False))
        best = None  # (children_sse, feat, threshold)
        for f in candidates:
            col = Xb[idx, f]
            order = np.argsort(col, kind="stable")
            found = _best_split(col[order], ys[order], config.min_leaf)
            if found is None:
                continue
            thr, sse_children = found
            if best is None or sse_children < best[0]:
                best = (sse_children, int(f), thr)
        if best is None or best[0] >= sse_parent:
            return
        sse_children, f, thr = best
        importance[f] += (sse_parent - sse_children) / len(yb)
        go_left = Xb[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        build(left_id, idx[go_left])
        build(right_id, idx[~go_left])

    root = new_node()
    build(root, np.arange(n))
    return _Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value),
        importance=importance,
        in_bag=np.unique(rows),
    )


def fit_forest(X: DesignMatrix, config: ForestConfig) -> Forest:
    """Train the forest on the design's named columns (no intercept)."""
    if not X.names:
        raise DesignError("forest needs at least one feature column")
    if X.n < 2 * config.min_leaf:
        raise InsufficientDataError(
            f"need at least 2*min_leaf={2 * config.min_leaf} rows, got {X.n}"
        )
    features = np.column_stack([X.columns[name] for name in X.names])
    streams = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees = tuple(
        _grow_tree(features, X.y, config, np.random.default_rng(s)) for s in streams
    )
    return Forest(trees=trees, feature_names=X.names, config=config, n_train=X.n)


def predict(forest: Forest, x) -> float:
    """Mean of the per-tree leaf means for a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(forest.feature_names),):
        raise DesignError(
            f"feature vector has shape {x.shape}, expected ({len(forest.feature_names)},)"
        )
    return float(forest.predict_batch(x[None, :])[0])


def _r2(y: np.ndarray, pred: np.ndarray) -> float:
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        return 1.0 if np.allclose(pred, y) else 0.0
    return 1.0 - float(np.sum((y - pred) ** 2)) / tss


def gini_importance(forest: Forest) -> dict[str, float]:
    """Split-gain importance, normalized to sum 1 when any split exists."""
    total = np.zeros(len(forest.feature_names))
    for tree in forest.trees:
        total += tree.importance
    total /= len(forest.trees)
    mass = total.sum()
    if mass > 0:
        total = total / mass
    return {name: float(v) for name, v in zip(forest.feature_names, total)}


def permutation_importance(
    forest: Forest, X: DesignMatrix, repeats: int = 10, seed: int = 0
) -> dict[str, float]:
    """Mean drop in R^2 when one column is shuffled, per feature.

    Scoring happens on whatever design is passed in: the training design for
    in-sample importance, or a held-out design when the caller split the
    sample.  Shuffles are drawn feature-by-feature from a seeded generator.
    """
    if repeats < 1:
        raise DesignError(f"repeats must be >= 1, got {repeats}")
    if X.names != forest.feature_names:
        raise DesignError(
            f"design columns {X.names} do not match forest features {forest.feature_names}"
        )
    features = np.column_stack([X.columns[name] for name in X.names])
    baseline = _r2(X.y, forest.predict_batch(features))
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out: dict[str, float] = {}
    for j, name in enumerate(forest.feature_names):
        drops = np.empty(repeats)
        for r in range(repeats):
            perm = rng.permutation(X.n)
            shuffled = features.copy()
            shuffled[:, j] = features[perm, j]
            drops[r] = baseline - _r2(X.y, forest.predict_batch(shuffled))
        out[name] = float(drops.mean())
    return out


def importance_report(
    forest: Forest,
    X: DesignMatrix,
    repeats: int = 10,
    seed: int = 0,
) -> ImportanceReport:
    return ImportanceReport(
        gini=gini_importance(forest),
        permutation=permutation_importance(forest, X, repeats=repeats, seed=seed),
        repeats=repeats,
        seed=seed,
        no_splits=not forest.has_splits,
    )


def oob_mse(forest: Forest, X: DesignMatrix) -> float:
    """Mean squared error of out-of-bag averaged predictions."""
    features = np.column_stack([X.columns[name] for name in X.names])
    acc = np.zeros(X.n)
    count = np.zeros(X.n)
    for tree in forest.trees:
        mask = np.ones(X.n, dtype=bool)
        mask[tree.in_bag] = False
        if not mask.any():
            continue
        acc[mask] += tree.predict(features[mask])
        count[mask] += 1
    scored = count > 0
    if not scored.any():
        raise InsufficientDataError("no out-of-bag observations; grow more trees")
    pred = acc[scored] / count[scored]
    return float(np.mean((X.y[scored] - pred) ** 2))
