"""Real-data preparation.

One-hot encoding is schema-driven (category lists are fixed up front), so
the transform never learns anything from data.  Imputation and balancing
are fitted on / applied to the train split only; the evaluation split
must never influence a fitted transform.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateReliability,
    EmptyColumn,
    InsufficientData,
    SchemaMismatch,
    SingleClass,
)

__all__ = [
    "CONTINUOUS",
    "CATEGORICAL",
    "SchemaColumn",
    "FeatureSchema",
    "TabularDataset",
    "OutcomeSpec",
    "UnseenCategoryWarning",
    "one_hot_encode",
    "Imputer",
    "fit_imputer",
    "apply_imputer",
    "label_response",
    "label_remission",
    "smotenc_balance",
    "load_schema",
    "save_schema",
    "load_dataset",
    "save_dataset",
]

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


class UnseenCategoryWarning(UserWarning):
    """A categorical cell held a value missing from the schema's category list."""


@dataclass(frozen=True)
class SchemaColumn:
    name: str
    kind: str
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, CATEGORICAL):
            raise ValueError(f"unknown column kind {self.kind!r} for {self.name!r}")
        if self.kind == CATEGORICAL and len(self.categories) < 1:
            raise ValueError(f"categorical column {self.name!r} needs >= 1 category")


@dataclass(frozen=True)
class FeatureSchema:
    columns: tuple[SchemaColumn, ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("schema column names must be unique")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> SchemaColumn:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_continuous(self) -> bool:
        return all(c.kind == CONTINUOUS for c in self.columns)

    @staticmethod
    def continuous(names: list[str]) -> "FeatureSchema":
        return FeatureSchema(tuple(SchemaColumn(n, CONTINUOUS) for n in names))


@dataclass
class TabularDataset:
    """Column-oriented table: float arrays (NaN = missing) for continuous
    columns, object arrays (None = missing) for categorical ones."""

    schema: FeatureSchema
    data: dict[str, np.ndarray]
    labels: np.ndarray | None = None

    def __post_init__(self):
        names = self.schema.names
        if set(self.data) != set(names):
            raise SchemaMismatch(
                f"data columns {sorted(self.data)} do not match schema {sorted(names)}"
            )
        lengths = {len(v) for v in self.data.values()}
        if len(lengths) > 1:
            raise SchemaMismatch(f"columns have unequal lengths {sorted(lengths)}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int8)
            if len(self.labels) != self.n_rows:
                raise SchemaMismatch(
                    f"{len(self.labels)} labels for {self.n_rows} rows"
                )

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0

    def column(self, name: str) -> np.ndarray:
        return self.data[name]

    def matrix(self) -> np.ndarray:
        """Feature matrix in schema order; requires an all-continuous schema."""
        if not self.schema.all_continuous:
            raise SchemaMismatch("matrix() requires an all-continuous schema")
        return np.column_stack([self.data[n] for n in self.schema.names])

    def take(self, indices: np.ndarray) -> "TabularDataset":
        indices = np.asarray(indices)
        return TabularDataset(
            schema=self.schema,
            data={n: v[indices] for n, v in self.data.items()},
            labels=None if self.labels is None else self.labels[indices],
        )

    def drop(self, names: list[str]) -> "TabularDataset":
        keep = tuple(c for c in self.schema.columns if c.name not in names)
        return TabularDataset(
            schema=FeatureSchema(keep),
            data={c.name: self.data[c.name] for c in keep},
            labels=self.labels,
        )

    def with_labels(self, labels: np.ndarray) -> "TabularDataset":
        return TabularDataset(schema=self.schema, data=dict(self.data), labels=labels)

    @staticmethod
    def from_matrix(
        matrix: np.ndarray, names: list[str], labels: np.ndarray | None = None
    ) -> "TabularDataset":
        matrix = np.asarray(matrix, dtype=float)
        return TabularDataset(
            schema=FeatureSchema.continuous(list(names)),
            data={n: matrix[:, i].copy() for i, n in enumerate(names)},
            labels=labels,
        )


@dataclass
class OutcomeSpec:
    """How the binary outcome label is derived from pre/post scores.

    Response mode applies the reliable change index to (pre, post);
    remission mode thresholds the post score.  ``sd_pre_reference`` may be
    pinned in configuration; when None the pipeline estimates it from the
    observed pre-scores of the current train split.
    """

    mode: str
    score_variable_post: str
    score_variable_pre: str | None = None
    reliability: float = 0.80
    rci_cutoff: float = 1.96
    remission_threshold: float | None = None
    sd_pre_reference: float | None = None

    def __post_init__(self):
        if self.mode not in ("response", "remission"):
            raise ValueError(f"unknown outcome mode {self.mode!r}")
        if self.mode == "response":
            if self.score_variable_pre is None:
                raise ValueError("response mode requires score_variable_pre")
            if not (0 < self.reliability <= 1):
                raise ValueError(f"reliability must be in (0, 1], got {self.reliability}")
            if self.rci_cutoff <= 0:
                raise ValueError(f"rci_cutoff must be > 0, got {self.rci_cutoff}")
        if self.mode == "remission" and self.remission_threshold is None:
            raise ValueError("remission mode requires remission_threshold")


# ---------------------------------------------------------------------------
# One-hot encoding


def one_hot_encode(data: TabularDataset) -> TabularDataset:
    """Expand each categorical column into one indicator per category.

    The full encoding is kept (no dropped level).  A missing categorical
    cell propagates as NaN across all of its indicators; a value absent
    from the schema's category list encodes as all zeros and emits an
    ``UnseenCategoryWarning``.
    """
    columns: list[SchemaColumn] = []
    out: dict[str, np.ndarray] = {}
    for col in data.schema.columns:
        if col.kind == CONTINUOUS:
            columns.append(col)
            out[col.name] = np.asarray(data.data[col.name], dtype=float).copy()
            continue
        values = data.data[col.name]
        indicators = {c: np.zeros(len(values)) for c in col.categories}
        for i, v in enumerate(values):
            if v is None:
                for c in col.categories:
                    indicators[c][i] = np.nan
            elif v in col.categories:
                indicators[v][i] = 1.0
            else:
                warnings.warn(
                    f"column {col.name!r}: value {v!r} not in schema categories",
                    UnseenCategoryWarning,
                    stacklevel=2,
                )
        for c in col.categories:
            name = f"{col.name}={c}"
            columns.append(SchemaColumn(name, CONTINUOUS))
            out[name] = indicators[c]
    return TabularDataset(schema=FeatureSchema(tuple(columns)), data=out, labels=data.labels)


# ---------------------------------------------------------------------------
# Chained-equations imputation (single completion)


@dataclass
class Imputer:
    """Train-anchored chained-equations imputer.

    Holds the train-column means used for the initial fill and, per
    column, the least-squares coefficients (intercept first) of that
    column regressed on all others over the completed train matrix.
    """

    names: list[str]
    means: np.ndarray
    coefs: np.ndarray  # (d, d) row c: [intercept, others...] in column order minus c
    sweeps: int


def _ols(design: np.ndarray, target: np.ndarray) -> np.ndarray:
    ones = np.ones((design.shape[0], 1))
    beta, *_ = np.linalg.lstsq(np.hstack([ones, design]), target, rcond=None)
    return beta


def fit_imputer(train: TabularDataset, sweeps: int = 5) -> Imputer:
    """Fit the imputer on the train split.

    Missing cells start at the train-column mean; each sweep re-regresses
    every incomplete column on all others (over rows where the column is
    observed) and replaces its missing cells with predictions.  The stored
    per-column models are refit on the completed matrix so that apply can
    handle missingness in any column, including ones complete here.
    """
    if not train.schema.all_continuous:
        raise SchemaMismatch("imputation requires an all-continuous schema (encode first)")
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    names = train.schema.names
    X = train.matrix().copy()
    n, d = X.shape
    observed = ~np.isnan(X)
    for j, name in enumerate(names):
        if not observed[:, j].any():
            raise EmptyColumn(f"column {name!r} has no observed value in the train split")
    means = np.array([X[observed[:, j], j].mean() for j in range(d)])
    for j in range(d):
        X[~observed[:, j], j] = means[j]
    incomplete = [j for j in range(d) if not observed[:, j].all()]
    for _ in range(sweeps):
        for j in incomplete:
            rows = observed[:, j]
            others = np.delete(X, j, axis=1)
            beta = _ols(others[rows], X[rows, j])
            miss = ~rows
            X[miss, j] = beta[0] + others[miss] @ beta[1:]
    coefs = np.zeros((d, d))
    for j in range(d):
        rows = observed[:, j]
        others = np.delete(X, j, axis=1)
        coefs[j] = _ols(others[rows], X[rows, j])
    return Imputer(names=list(names), means=means, coefs=coefs, sweeps=sweeps)


def apply_imputer(imp: Imputer, data: TabularDataset) -> TabularDataset:
    """Complete ``data`` using models fitted on the train split only."""
    if data.schema.names != imp.names:
        raise SchemaMismatch(
            f"dataset columns {data.schema.names} do not match imputer columns {imp.names}"
        )
    X = data.matrix().copy()
    missing = np.isnan(X)
    if not missing.any():
        return data
    d = X.shape[1]
    for j in range(d):
        X[missing[:, j], j] = imp.means[j]
    incomplete = [j for j in range(d) if missing[:, j].any()]
    for _ in range(imp.sweeps):
        for j in incomplete:
            others = np.delete(X, j, axis=1)
            rows = missing[:, j]
            X[rows, j] = imp.coefs[j, 0] + others[rows] @ imp.coefs[j, 1:]
    return TabularDataset.from_matrix(X, imp.names, labels=data.labels)


# ---------------------------------------------------------------------------
# Outcome labeling


def label_response(pre: float, post: float, spec: OutcomeSpec, sd_pre_reference: float) -> int:
    """Reliable-change label: 1 when the pre-to-post drop is reliable.

    RC = (post - pre) / (sqrt(2) * sd * sqrt(1 - reliability)); symptom
    scales fall on improvement, so label 1 iff RC <= -cutoff (boundary
    inclusive).
    """
    if sd_pre_reference <= 0:
        raise ValueError(f"sd_pre_reference must be > 0, got {sd_pre_reference}")
    s_diff = np.sqrt(2.0) * sd_pre_reference * np.sqrt(1.0 - spec.reliability)
    if s_diff == 0.0:
        if post == pre:
            return 0
        raise DegenerateReliability(
            "reliability of 1 leaves no measurement error to test change against"
        )
    rc = (post - pre) / s_diff
    return int(rc <= -spec.rci_cutoff)


def label_remission(post: float, spec: OutcomeSpec) -> int:
    """Threshold label: 1 when the post score is at or below the cutoff."""
    if spec.remission_threshold is None:
        raise ValueError("remission_threshold is not set")
    return int(post <= spec.remission_threshold)


# ---------------------------------------------------------------------------
# SMOTE-NC balancing


def _smote_distances(cont: np.ndarray, cats: list[np.ndarray], med_sq: float) -> np.ndarray:
    """Pairwise squared distances: Euclidean over continuous coordinates
    plus the median-of-SDs penalty per differing categorical value."""
    n = cont.shape[0] if cont.size else len(cats[0]) if cats else 0
    d2 = np.zeros((n, n))
    if cont.size:
        diff = cont[:, None, :] - cont[None, :, :]
        d2 += (diff**2).sum(axis=2)
    for col in cats:
        d2 += med_sq * (col[:, None] != col[None, :])
    return d2


def smotenc_balance(
    data: TabularDataset,
    k_neighbors: int = 5,
    rng: np.random.Generator | None = None,
) -> TabularDataset:
    """Oversample the minority class until both classes are equal in count.

    Synthetic rows interpolate a minority row toward one of its k nearest
    minority neighbors at a single uniform step; categorical features take
    the most frequent value among those k neighbors.  Original rows are
    preserved verbatim.  Distances are Euclidean over continuous features
    with the median of continuous-feature standard deviations entering
    (squared) once per differing categorical value.
    """
    if data.labels is None:
        raise ValueError("smotenc_balance needs a labeled dataset")
    if rng is None:
        rng = np.random.default_rng()
    labels = data.labels
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise SingleClass(f"only class {classes[0]} present")
    minority = classes[np.argmin(counts)]
    n_min, n_maj = counts.min(), counts.max()
    need = int(n_maj - n_min)
    if need == 0:
        return data
    if n_min < 2:
        raise InsufficientData(f"minority class has {n_min} row(s); need >= 2")
    k = k_neighbors
    if k >= n_min:
        k = int(n_min - 1)
        warnings.warn(
            f"k_neighbors={k_neighbors} >= minority size {n_min}; using k={k}",
            stacklevel=2,
        )
    if k < 1:
        raise ValueError(f"k_neighbors must be >= 1, got {k_neighbors}")

    min_idx = np.flatnonzero(labels == minority)
    cont_cols = [c.name for c in data.schema.columns if c.kind == CONTINUOUS]
    cat_cols = [c.name for c in data.schema.columns if c.kind == CATEGORICAL]
    cont = (
        np.column_stack([data.data[c][min_idx] for c in cont_cols])
        if cont_cols
        else np.zeros((len(min_idx), 0))
    )
    if np.isnan(cont).any():
        raise ValueError("smotenc_balance requires complete data (impute first)")
    cats = [data.data[c][min_idx] for c in cat_cols]
    if cont_cols:
        med = float(np.median(cont.std(axis=0, ddof=1)))
    else:
        med = 1.0
    d2 = _smote_distances(cont, cats, med**2)
    np.fill_diagonal(d2, np.inf)
    neighbor_ids = np.argsort(d2, axis=1, kind="stable")[:, :k]

    new_cont = np.zeros((need, len(cont_cols)))
    new_cats = {c: np.empty(need, dtype=object) for c in cat_cols}
    for s in range(need):
        base = int(rng.integers(len(min_idx)))
        nb = int(neighbor_ids[base, rng.integers(k)])
        lam = rng.random()
        if cont_cols:
            new_cont[s] = cont[base] + lam * (cont[nb] - cont[base])
        for ci, c in enumerate(cat_cols):
            votes = cats[ci][neighbor_ids[base]]
            order = data.schema.column(c).categories
            best = max(order, key=lambda cat: (votes == cat).sum())
            new_cats[c][s] = best

    out: dict[str, np.ndarray] = {}
    for ci, c in enumerate(cont_cols):
        out[c] = np.concatenate([data.data[c], new_cont[:, ci]])
    for c in cat_cols:
        out[c] = np.concatenate([data.data[c], new_cats[c]])
    new_labels = np.concatenate([labels, np.full(need, minority, dtype=labels.dtype)])
    return TabularDataset(schema=data.schema, data=out, labels=new_labels)


# ---------------------------------------------------------------------------
# Dataset files: delimited text with header; schema sidecar maps each
# column to its kind and (for categoricals) a |-separated category list.


def load_schema(path: str | Path) -> FeatureSchema:
    cols = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["name", "kind"]:
            raise ValueError(f"{path}: expected header name,kind,categories")
        for row in reader:
            if not row or not any(cell.strip() for cell in row):
                continue
            name, kind = row[0].strip(), row[1].strip()
            raw = row[2].strip() if len(row) > 2 else ""
            categories = tuple(c for c in raw.split("|") if c) if raw else ()
            cols.append(SchemaColumn(name, kind, categories))
    return FeatureSchema(tuple(cols))


def save_schema(schema: FeatureSchema, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "kind", "categories"])
        for c in schema.columns:
            writer.writerow([c.name, c.kind, "|".join(c.categories)])


def load_dataset(
    path: str | Path, schema: FeatureSchema, missing_token: str = ""
) -> TabularDataset:
    """Read a delimited dataset; cells equal to ``missing_token`` are missing."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        header = [h.strip() for h in header]
        missing_cols = [n for n in schema.names if n not in header]
        if missing_cols:
            raise SchemaMismatch(f"{path}: columns missing from header: {missing_cols}")
        index = {n: header.index(n) for n in schema.names}
        # an all-empty row is a row of missing cells, not a blank line
        raw_rows = [row for row in reader if row]
    n = len(raw_rows)
    data: dict[str, np.ndarray] = {}
    for col in schema.columns:
        i = index[col.name]
        if col.kind == CONTINUOUS:
            vals = np.empty(n)
            for r, row in enumerate(raw_rows):
                cell = row[i].strip()
                vals[r] = np.nan if cell == missing_token else float(cell)
        else:
            vals = np.empty(n, dtype=object)
            for r, row in enumerate(raw_rows):
                cell = row[i].strip()
                vals[r] = None if cell == missing_token else cell
        data[col.name] = vals
    return TabularDataset(schema=schema, data=data)


def save_dataset(data: TabularDataset, path: str | Path, missing_token: str = "") -> None:
    names = data.schema.names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for r in range(data.n_rows):
            row = []
            for col in data.schema.columns:
                v = data.data[col.name][r]
                if col.kind == CONTINUOUS:
                    row.append(missing_token if np.isnan(v) else repr(float(v)))
                else:
                    row.append(missing_token if v is None else str(v))
            writer.writerow(row)
