"""CART random forests and the hybrid pretrained/fine-tuned ensemble.

A hybrid forest combines trees fitted on a simulated cohort (pretrained)
with trees fitted on real training data (fine-tuned); prediction averages
all per-tree leaf fractions with equal weight.  Pretrained trees may live
on a projected feature subset of the real space; the projection is applied
at inference time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._induction import grow_tree
from .errors import (
    EmptyData,
    InvalidWeight,
    SchemaMismatch,
    StratificationError,
)
from .rngutil import stream_seed, substream

__all__ = [
    "PRETRAINED",
    "FINE_TUNED",
    "ForestParams",
    "DecisionTree",
    "HybridForest",
    "split_tree_counts",
    "fit_tree",
    "fit_forest",
    "fit_hybrid",
    "predict_proba",
    "classify",
    "grid_search",
    "default_grid",
    "serialize_forest",
]

PRETRAINED = "pretrained"
FINE_TUNED = "fine_tuned"

MAX_FEATURES_CHOICES = ("sqrt", "log2")


@dataclass(frozen=True)
class ForestParams:
    """Hyperparameters of one forest.

    ``max_features`` is "sqrt", "log2", or a fixed integer; fractions are
    of the training rows available to each tree.
    """

    max_features: str | int = "sqrt"
    min_samples_leaf: int = 1
    max_samples_fraction: float = 1.0
    n_trees: int = 200

    def __post_init__(self):
        if isinstance(self.max_features, str) and self.max_features not in MAX_FEATURES_CHOICES:
            raise ValueError(f"max_features must be sqrt, log2, or an int, got {self.max_features!r}")
        if isinstance(self.max_features, int) and self.max_features < 1:
            raise ValueError(f"max_features must be >= 1, got {self.max_features}")
        if self.min_samples_leaf < 1:
            raise ValueError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if not (0 < self.max_samples_fraction <= 1):
            raise ValueError(
                f"max_samples_fraction must be in (0, 1], got {self.max_samples_fraction}"
            )
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")

    def resolve_max_features(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features == "log2":
            return max(1, int(math.log2(n_features)))
        return min(int(self.max_features), n_features)


def default_grid(n_trees: int = 200) -> list[ForestParams]:
    """The full tuning grid: 4 feature rules x 4 leaf sizes x 3 fractions."""
    grid = []
    for mf in ("sqrt", "log2", 4, 5):
        for leaf in (1, 3, 5, 10):
            for frac in (0.66, 0.80, 1.00):
                grid.append(
                    ForestParams(
                        max_features=mf,
                        min_samples_leaf=leaf,
                        max_samples_fraction=frac,
                        n_trees=n_trees,
                    )
                )
    return grid


@dataclass
class DecisionTree:
    """Flat-array binary tree; leaves have feature -1 and store the
    positive-class fraction plus the training row count."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    fraction: np.ndarray
    count: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf fraction for each row of X (X already in this tree's feature space)."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            f = self.feature[node]
            live = np.flatnonzero(f >= 0)
            if live.size == 0:
                break
            cur = node[live]
            go_left = X[live, f[live]] <= self.threshold[cur]
            node[live] = np.where(go_left, self.left[cur], self.right[cur])
        return self.fraction[node]


@dataclass
class HybridForest:
    """Ensemble of (tree, provenance) pairs over a common real feature space.

    ``sim_feature_map`` gives, for each pretrained-tree feature index, the
    corresponding column in the real space; None means identity.
    """

    trees: list[tuple[DecisionTree, str]]
    n_features: int
    sim_feature_map: np.ndarray | None = None

    @property
    def n_pretrained(self) -> int:
        return sum(1 for _, p in self.trees if p == PRETRAINED)

    @property
    def n_fine_tuned(self) -> int:
        return sum(1 for _, p in self.trees if p == FINE_TUNED)


def split_tree_counts(total: int, weight: float) -> tuple[int, int]:
    """Allocate a fixed tree budget between pretraining and fine-tuning.

    ``weight`` is the ratio of pretrained to fine-tuned trees; the
    fine-tuned count is total / (1 + weight) rounded half-up.
    """
    if total < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    if weight < 0:
        raise InvalidWeight(f"weight must be >= 0, got {weight}")
    n_fine = int(math.floor(total / (1.0 + weight) + 0.5))
    return total - n_fine, n_fine


def _as_training_arrays(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2:
        raise SchemaMismatch(f"expected a 2-D feature matrix, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise EmptyData(f"cannot fit on data of shape {X.shape}")
    if len(y) != X.shape[0]:
        raise SchemaMismatch(f"{len(y)} labels for {X.shape[0]} rows")
    return X, y


def fit_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator) -> DecisionTree:
    """Fit one CART tree on the given rows (no resampling here)."""
    X, y = _as_training_arrays(X, y)
    m_try = params.resolve_max_features(X.shape[1])
    seed = int(rng.integers(0, 2**63, dtype=np.int64))
    feature, threshold, left, right, fraction, count = grow_tree(
        X, y, m_try, params.min_samples_leaf, seed
    )
    return DecisionTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        fraction=fraction,
        count=count,
        n_features=X.shape[1],
    )


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams,
    seed: int,
    n_trees: int | None = None,
    provenance: str = FINE_TUNED,
) -> HybridForest:
    """Fit a standard forest: each tree on a with-replacement subsample of
    ceil(max_samples_fraction * n) rows, with an independent stream per
    tree derived from (seed, tree index)."""
    X, y = _as_training_arrays(X, y)
    n = X.shape[0]
    size = math.ceil(params.max_samples_fraction * n)
    total = params.n_trees if n_trees is None else n_trees
    trees = []
    for k in range(total):
        rng_k = substream(seed, k)
        idx = rng_k.integers(0, n, size=size)
        trees.append((fit_tree(X[idx], y[idx], params, rng_k), provenance))
    return HybridForest(trees=trees, n_features=X.shape[1])


def fit_hybrid(
    sim_X: np.ndarray,
    sim_y: np.ndarray,
    real_X: np.ndarray,
    real_y: np.ndarray,
    weight: float,
    params_sim: ForestParams,
    params_real: ForestParams,
    total_trees: int,
    seed: int,
    sim_feature_map: Sequence[int] | None = None,
) -> HybridForest:
    """Fit the hybrid ensemble: pretrained trees on the simulated cohort,
    fine-tuned trees on the real data.

    Fine-tuned trees draw from the same per-tree streams as
    ``fit_forest(real_X, real_y, params_real, seed)``, so a weight of 0
    reproduces the standard forest bit for bit.  ``sim_feature_map`` maps
    simulated columns into the real feature space (None = identical
    spaces).
    """
    n_pre, n_fine = split_tree_counts(total_trees, weight)
    real_X, real_y = _as_training_arrays(real_X, real_y)
    if sim_feature_map is not None:
        sim_feature_map = np.asarray(sim_feature_map, dtype=np.int64)
        if sim_feature_map.max(initial=-1) >= real_X.shape[1] or (
            n_pre > 0 and len(sim_feature_map) != np.asarray(sim_X).shape[1]
        ):
            raise SchemaMismatch(
                "sim_feature_map does not project the simulated columns into the real space"
            )
    elif n_pre > 0 and np.asarray(sim_X).shape[1] != real_X.shape[1]:
        raise SchemaMismatch(
            f"simulated data has {np.asarray(sim_X).shape[1]} features, real data "
            f"{real_X.shape[1]}, and no projection was declared"
        )

    trees: list[tuple[DecisionTree, str]] = []
    if n_pre > 0:
        sim_X, sim_y = _as_training_arrays(sim_X, sim_y)
        n = sim_X.shape[0]
        size = math.ceil(params_sim.max_samples_fraction * n)
        for k in range(n_pre):
            rng_k = substream(seed, "pretrain", k)
            idx = rng_k.integers(0, n, size=size)
            trees.append((fit_tree(sim_X[idx], sim_y[idx], params_sim, rng_k), PRETRAINED))
    n = real_X.shape[0]
    size = math.ceil(params_real.max_samples_fraction * n)
    for k in range(n_fine):
        rng_k = substream(seed, k)
        idx = rng_k.integers(0, n, size=size)
        trees.append((fit_tree(real_X[idx], real_y[idx], params_real, rng_k), FINE_TUNED))
    return HybridForest(
        trees=trees,
        n_features=real_X.shape[1],
        sim_feature_map=None if sim_feature_map is None else np.asarray(sim_feature_map),
    )


def predict_proba(forest: HybridForest, X: np.ndarray) -> np.ndarray | float:
    """Unweighted mean of per-tree leaf fractions; pretrained trees read
    the projected columns.  Accepts a single row or a matrix."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != forest.n_features:
        raise SchemaMismatch(f"row width {X.shape[1]} != forest feature count {forest.n_features}")
    if not forest.trees:
        raise EmptyData("forest has no trees")
    X_sim = X if forest.sim_feature_map is None else X[:, forest.sim_feature_map]
    total = np.zeros(X.shape[0])
    for tree, provenance in forest.trees:
        total += tree.predict(X_sim if provenance == PRETRAINED else X)
    proba = total / len(forest.trees)
    return float(proba[0]) if single else proba


def classify(forest: HybridForest, X: np.ndarray) -> np.ndarray | int:
    """Thresholded decision: 1 iff the averaged probability is strictly above 0.5."""
    proba = predict_proba(forest, X)
    if isinstance(proba, float):
        return int(proba > 0.5)
    return (proba > 0.5).astype(np.int8)


def _balanced_accuracy_from_proba(y_true: np.ndarray, proba: np.ndarray) -> float:
    pred = proba > 0.5
    pos = y_true == 1
    neg = ~pos
    sens = (pred & pos).sum() / pos.sum()
    spec = (~pred & neg).sum() / neg.sum()
    return float((sens + spec) / 2.0)


def stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Assign each row to a fold, dealing shuffled per-class indices round-robin."""
    y = np.asarray(y)
    assignment = np.empty(len(y), dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if len(idx) < folds:
            raise StratificationError(
                f"class {cls} has {len(idx)} rows; cannot fill {folds} folds"
            )
        idx = rng.permutation(idx)
        assignment[idx] = np.arange(len(idx)) % folds
    return assignment


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    grid: Sequence[ForestParams],
    folds: int = 5,
    metric: Callable[[np.ndarray, np.ndarray], float] | None = None,
    seed: int = 0,
) -> ForestParams:
    """Pick the grid point with the best mean validation metric over
    stratified folds; ties go to the earliest grid entry.

    ``metric(y_true, proba)`` defaults to balanced accuracy at the 0.5
    threshold.  Folds are shared across grid points; each (combo, fold)
    fit draws from its own labeled stream so an independent re-evaluation
    can reproduce the scores.
    """
    if not grid:
        raise ValueError("grid is empty")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if metric is None:
        metric = _balanced_accuracy_from_proba
    assignment = stratified_folds(y, folds, substream(seed, "folds"))
    scores = []
    for c, params in enumerate(grid):
        fold_scores = []
        for f in range(folds):
            val = assignment == f
            forest = fit_forest(
                X[~val], y[~val], params, stream_seed(seed, "combo", c, "fold", f)
            )
            fold_scores.append(metric(y[val], predict_proba(forest, X[val])))
        scores.append(float(np.mean(fold_scores)))
    best = int(np.argmax(scores))
    return grid[best]


# ---------------------------------------------------------------------------
# Serialization: flat text dump for inspection and model-equality checks.

FOREST_FORMAT_VERSION = 1


def serialize_forest(forest: HybridForest) -> str:
    """Versioned flat text dump of every node of every tree."""
    lines = [f"litforest-forest v{FOREST_FORMAT_VERSION}"]
    lines.append(f"n_features {forest.n_features}")
    if forest.sim_feature_map is None:
        lines.append("sim_feature_map identity")
    else:
        lines.append("sim_feature_map " + " ".join(str(int(i)) for i in forest.sim_feature_map))
    lines.append(f"n_trees {len(forest.trees)}")
    for t, (tree, provenance) in enumerate(forest.trees):
        lines.append(f"tree {t} {provenance} {tree.n_nodes}")
        for i in range(tree.n_nodes):
            lines.append(
                f"{tree.feature[i]} {tree.threshold[i]!r} {tree.left[i]} "
                f"{tree.right[i]} {tree.fraction[i]!r} {tree.count[i]}"
            )
    return "\n".join(lines) + "\n"
