"""Metrics, the MCCV orchestrator, and the corrected resampled t-test.

One MCCV iteration = one random train/test split followed by the full
per-approach pipeline (preprocess, simulate, balance, tune, fit) with the
test split touched only at evaluation time.  Every random decision draws
from a stream addressed by (master_seed, "iteration", i, stage labels...),
so results are independent of execution order and approaches that share a
stage share its stream: simulating the same dataset mode twice in one
iteration yields the same cohort, which the runner exploits by caching.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .cohort import (
    LITERATURE,
    TRAIN_SPLIT,
    SimulatedCohort,
    extend_all_features,
    nearest_psd,
    simulate_cohort,
)
from .errors import (
    DegenerateVariance,
    InsufficientIterations,
    PairingError,
    UndefinedRate,
)
from .evidence import EvidenceSet, build_class_distribution, subset_evidence
from .forest import (
    ForestParams,
    HybridForest,
    classify,
    default_grid,
    fit_forest,
    fit_hybrid,
    grid_search,
    predict_proba,
)
from .preprocess import (
    OutcomeSpec,
    TabularDataset,
    apply_imputer,
    fit_imputer,
    label_remission,
    label_response,
    one_hot_encode,
    smotenc_balance,
)
from .rngutil import stream_seed, substream

__all__ = [
    "SIM_MODES",
    "MetricsRecord",
    "ComparisonResult",
    "ApproachSpec",
    "RunConfig",
    "MccvReport",
    "confusion",
    "sensitivity",
    "specificity",
    "balanced_accuracy",
    "auroc",
    "student_t_sf",
    "corrected_resampled_ttest",
    "mccv_run",
    "run_iteration",
    "compare_best",
    "summary_rows",
    "write_records",
    "write_summary",
    "write_comparison",
]

SIM_MODES = (
    "features_of_interest",
    "features_plus_extra",
    "all_features",
    "all_features_plus_extra",
)


# ---------------------------------------------------------------------------
# Metrics


def confusion(labels: np.ndarray, predictions: np.ndarray) -> tuple[int, int, int, int]:
    """Counts (tp, fp, tn, fn) for binary labels and predictions."""
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape:
        raise ValueError(f"length mismatch: {labels.shape} vs {predictions.shape}")
    pos = labels == 1
    pred_pos = predictions == 1
    tp = int((pos & pred_pos).sum())
    fp = int((~pos & pred_pos).sum())
    tn = int((~pos & ~pred_pos).sum())
    fn = int((pos & ~pred_pos).sum())
    return tp, fp, tn, fn


def sensitivity(labels: np.ndarray, predictions: np.ndarray) -> float:
    tp, _, _, fn = confusion(labels, predictions)
    if tp + fn == 0:
        raise UndefinedRate("sensitivity undefined: no positive labels")
    return tp / (tp + fn)


def specificity(labels: np.ndarray, predictions: np.ndarray) -> float:
    _, fp, tn, _ = confusion(labels, predictions)
    if tn + fp == 0:
        raise UndefinedRate("specificity undefined: no negative labels")
    return tn / (tn + fp)


def balanced_accuracy(labels: np.ndarray, predictions: np.ndarray) -> float:
    """Mean of sensitivity and specificity."""
    return (sensitivity(labels, predictions) + specificity(labels, predictions)) / 2.0


def auroc(labels: np.ndarray, scores: np.ndarray) -> float:
    """Probability that a random positive outscores a random negative,
    ties counted half (rank formulation of the Mann-Whitney statistic)."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRate("auroc undefined: both classes must be present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum_pos = ranks[labels == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


# ---------------------------------------------------------------------------
# Student-t tail probability (regularized incomplete beta, Lentz's method)


def _betacf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: int) -> float:
    """One-sided upper-tail probability P(T_df >= t)."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    x = df / (df + t * t)
    tail = 0.5 * _reg_inc_beta(df / 2.0, 0.5, x)
    return tail if t >= 0 else 1.0 - tail


@dataclass(frozen=True)
class ComparisonResult:
    approach_a: str
    approach_b: str
    mean_diff: float
    t_stat: float
    df: int
    p_one_sided: float


def corrected_resampled_ttest(
    diffs: np.ndarray,
    n_train: int,
    n_test: int,
    approach_a: str = "a",
    approach_b: str = "b",
) -> ComparisonResult:
    """Paired t-test on per-split differences with the variance inflated by
    (1/k + n_test/n_train) to account for overlapping resamples."""
    diffs = np.asarray(diffs, dtype=float)
    k = len(diffs)
    if k < 2:
        raise InsufficientIterations(f"need >= 2 paired differences, got {k}")
    mean = float(diffs.mean())
    var = float(diffs.var(ddof=1))
    if var == 0.0:
        if mean == 0.0:
            return ComparisonResult(approach_a, approach_b, 0.0, 0.0, k - 1, 0.5)
        raise DegenerateVariance(
            f"all differences identical ({mean}); the t-statistic diverges"
        )
    t = mean / math.sqrt((1.0 / k + n_test / n_train) * var)
    return ComparisonResult(approach_a, approach_b, mean, t, k - 1, student_t_sf(t, k - 1))


# ---------------------------------------------------------------------------
# Run configuration


@dataclass(frozen=True)
class ApproachSpec:
    """One row of the experiment: the standard forest or a hybrid variant."""

    kind: str  # "standard" | "hybrid"
    sim_dataset: str | None = None
    weight: float | None = None
    balancing: str = "smote"

    def __post_init__(self):
        if self.kind not in ("standard", "hybrid"):
            raise ValueError(f"unknown approach kind {self.kind!r}")
        if self.balancing not in ("smote", "none"):
            raise ValueError(f"unknown balancing {self.balancing!r}")
        if self.kind == "hybrid":
            if self.sim_dataset not in SIM_MODES:
                raise ValueError(f"unknown simulation dataset {self.sim_dataset!r}")
            if self.weight is None or self.weight < 0:
                raise ValueError(f"hybrid approach needs a weight >= 0, got {self.weight}")
        elif self.sim_dataset is not None or self.weight is not None:
            raise ValueError("standard approach takes no simulation dataset or weight")

    def label(self, n_core: int, n_extra: int) -> str:
        if self.kind == "standard":
            base = "standard"
        else:
            pct = int(round(self.weight * 100))
            if self.sim_dataset == "features_of_interest":
                base = f"{n_core} features simulated, {pct}% weight"
            elif self.sim_dataset == "features_plus_extra":
                base = f"{n_core + n_extra} features simulated, {pct}% weight"
            elif self.sim_dataset == "all_features":
                base = f"all features simulated, {pct}% weight"
            else:
                base = f"all features simulated, {pct}% weight, extra included"
        if self.balancing == "none":
            base += ", unbalanced"
        return base


@dataclass
class RunConfig:
    """Everything mccv_run needs besides the evidence and the dataset."""

    master_seed: int
    outcome: OutcomeSpec
    variables_of_interest: list[str]
    approaches: list[ApproachSpec]
    extra_variables: list[str] = field(default_factory=list)
    iterations: int = 100
    test_fraction: float = 0.2
    total_trees: int = 200
    n_per_class: int = 500
    folds: int = 5
    grid: list[ForestParams] | None = None
    smote_k: int = 5
    imputer_sweeps: int = 5

    def __post_init__(self):
        if self.iterations < 2:
            raise ValueError(f"iterations must be >= 2, got {self.iterations}")
        if not (0 < self.test_fraction < 1):
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if not self.approaches:
            raise ValueError("at least one approach is required")
        labels = self.approach_labels()
        if len(set(labels)) != len(labels):
            raise ValueError(f"approach labels are not unique: {labels}")

    def approach_labels(self) -> list[str]:
        n_core = len(self.variables_of_interest)
        n_extra = len(self.extra_variables)
        return [a.label(n_core, n_extra) for a in self.approaches]

    def resolved_grid(self) -> list[ForestParams]:
        if self.grid is not None:
            return [replace(p, n_trees=self.total_trees) for p in self.grid]
        return default_grid(self.total_trees)


@dataclass(frozen=True)
class MetricsRecord:
    approach: str
    iteration: int
    balanced_accuracy: float
    auc: float
    sensitivity: float
    specificity: float
    n_train: int
    n_test: int
    seed: int


@dataclass
class MccvReport:
    records: list[MetricsRecord]
    approaches: list[str]
    approach_specs: dict[str, ApproachSpec]
    n_train: int
    n_test: int
    iterations: int


# ---------------------------------------------------------------------------
# The per-iteration pipeline


@dataclass
class _Prepared:
    """Inputs shared by every iteration: the encoded dataset (outcome score
    columns still present) and the resolved configuration."""

    enc: TabularDataset
    evidence: EvidenceSet
    config: RunConfig
    feature_names: list[str]
    grid: list[ForestParams]


def _prepare(config: RunConfig, evidence: EvidenceSet, real_data: TabularDataset) -> _Prepared:
    enc = one_hot_encode(real_data)
    outcome = config.outcome
    needed = [outcome.score_variable_post]
    if outcome.mode == "response":
        needed.append(outcome.score_variable_pre)
    for name in needed:
        if name not in enc.schema.names:
            raise ValueError(f"outcome column {name!r} not in the encoded dataset")
    # the post-treatment score defines the label and is never a feature
    feature_names = [n for n in enc.schema.names if n != outcome.score_variable_post]
    for v in list(config.variables_of_interest) + list(config.extra_variables):
        if v not in feature_names:
            raise ValueError(f"literature variable {v!r} is not an encoded feature column")
    return _Prepared(
        enc=enc,
        evidence=evidence,
        config=config,
        feature_names=feature_names,
        grid=config.resolved_grid(),
    )


def _labels_for(matrix_rows: np.ndarray, pre_i: int, post_i: int, spec: OutcomeSpec, sd_ref: float) -> np.ndarray:
    labels = np.empty(len(matrix_rows), dtype=np.int8)
    for r, row in enumerate(matrix_rows):
        if spec.mode == "response":
            labels[r] = label_response(row[pre_i], row[post_i], spec, sd_ref)
        else:
            labels[r] = label_remission(row[post_i], spec)
    return labels


def _simulate_for_mode(
    prep: _Prepared,
    mode: str,
    X_train: np.ndarray,
    y_train: np.ndarray,
    master_seed: int,
    iteration: int,
) -> tuple[SimulatedCohort, np.ndarray | None]:
    """Build the cohort for one simulation dataset mode.

    Returns the cohort and, for the projected (features-of-interest style)
    modes, the map from simulated columns to real feature columns.
    """
    config = prep.config
    lit_vars = list(config.variables_of_interest)
    if mode in ("features_plus_extra", "all_features_plus_extra"):
        lit_vars += list(config.extra_variables)
    evidence = subset_evidence(prep.evidence, lit_vars)
    lit_idx = np.array([prep.feature_names.index(v) for v in lit_vars])
    pos_group, neg_group = evidence.groups
    rng = substream(master_seed, "iteration", iteration, "simulate", mode)

    dists = {}
    for group, y_val in ((pos_group, 1), (neg_group, 0)):
        class_rows = X_train[y_train == y_val]
        fallback = None
        if class_rows.shape[0] >= 2:
            fallback = np.atleast_2d(np.cov(class_rows[:, lit_idx], rowvar=False, ddof=1))
        lit_dist = build_class_distribution(evidence, group, fallback_cov=fallback)
        if mode.startswith("all_features"):
            dists[y_val] = extend_all_features(lit_dist, class_rows, prep.feature_names)
        else:
            lit_dist.sigma = nearest_psd(lit_dist.sigma)
            dists[y_val] = lit_dist

    if mode.startswith("all_features"):
        provenance = {
            v: (LITERATURE if v in lit_vars else TRAIN_SPLIT) for v in prep.feature_names
        }
        cohort = simulate_cohort(
            dists[1], dists[0], config.n_per_class, rng, provenance=provenance
        )
        return cohort, None
    cohort = simulate_cohort(dists[1], dists[0], config.n_per_class, rng)
    return cohort, lit_idx


def run_iteration(
    prep: _Prepared, iteration: int
) -> tuple[list[MetricsRecord], dict[str, HybridForest]]:
    """Run one MCCV iteration; returns the per-approach records and the
    fitted ensembles (keyed by approach label)."""
    config = prep.config
    enc = prep.enc
    outcome = config.outcome
    master = config.master_seed
    n = enc.n_rows
    n_test = min(max(int(round(config.test_fraction * n)), 1), n - 1)

    perm = substream(master, "iteration", iteration, "split").permutation(n)
    test_idx, train_idx = perm[:n_test], perm[n_test:]

    imputer = fit_imputer(enc.take(train_idx), sweeps=config.imputer_sweeps)
    train_full = apply_imputer(imputer, enc.take(train_idx)).matrix()
    test_full = apply_imputer(imputer, enc.take(test_idx)).matrix()

    names = enc.schema.names
    pre_i = names.index(outcome.score_variable_pre) if outcome.mode == "response" else -1
    post_i = names.index(outcome.score_variable_post)
    sd_ref = outcome.sd_pre_reference
    if sd_ref is None and outcome.mode == "response":
        observed = enc.data[outcome.score_variable_pre][train_idx]
        observed = observed[~np.isnan(observed)]
        sd_ref = float(np.std(observed, ddof=1))
    y_train = _labels_for(train_full, pre_i, post_i, outcome, sd_ref)
    y_test = _labels_for(test_full, pre_i, post_i, outcome, sd_ref)

    feat_cols = np.array([names.index(f) for f in prep.feature_names])
    X_train = train_full[:, feat_cols]
    X_test = test_full[:, feat_cols]

    cache: dict[tuple, object] = {}
    labels = config.approach_labels()
    records = []
    models: dict[str, HybridForest] = {}
    iteration_seed = stream_seed(master, "iteration", iteration)

    for approach, label in zip(config.approaches, labels):
        try:
            key = ("balanced", approach.balancing)
            if key not in cache:
                if approach.balancing == "smote":
                    ds = TabularDataset.from_matrix(X_train, prep.feature_names, labels=y_train)
                    rng = substream(master, "iteration", iteration, "smote")
                    bal = smotenc_balance(ds, k_neighbors=config.smote_k, rng=rng)
                    cache[key] = (bal.matrix(), np.asarray(bal.labels, dtype=np.int64))
                else:
                    cache[key] = (X_train, y_train.astype(np.int64))
            X_bal, y_bal = cache[key]

            key = ("params_real", approach.balancing)
            if key not in cache:
                cache[key] = grid_search(
                    X_bal,
                    y_bal,
                    prep.grid,
                    folds=config.folds,
                    seed=stream_seed(master, "iteration", iteration, "grid", "real", approach.balancing),
                )
            params_real = cache[key]

            fit_seed = stream_seed(master, "iteration", iteration, "fit", label)
            if approach.kind == "standard":
                forest = fit_forest(X_bal, y_bal, params_real, fit_seed, n_trees=config.total_trees)
            else:
                mode = approach.sim_dataset
                key = ("cohort", mode)
                if key not in cache:
                    cache[key] = _simulate_for_mode(
                        prep, mode, X_train, y_train, master, iteration
                    )
                cohort, feature_map = cache[key]

                key = ("params_sim", mode)
                if key not in cache:
                    cache[key] = grid_search(
                        cohort.features,
                        cohort.labels.astype(np.int64),
                        prep.grid,
                        folds=config.folds,
                        seed=stream_seed(master, "iteration", iteration, "grid", mode),
                    )
                params_sim = cache[key]

                forest = fit_hybrid(
                    cohort.features,
                    cohort.labels.astype(np.int64),
                    X_bal,
                    y_bal,
                    approach.weight,
                    params_sim,
                    params_real,
                    config.total_trees,
                    fit_seed,
                    sim_feature_map=feature_map,
                )

            proba = predict_proba(forest, X_test)
            pred = classify(forest, X_test)
            sens = sensitivity(y_test, pred)
            spec = specificity(y_test, pred)
            records.append(
                MetricsRecord(
                    approach=label,
                    iteration=iteration,
                    balanced_accuracy=(sens + spec) / 2.0,
                    auc=auroc(y_test, proba),
                    sensitivity=sens,
                    specificity=spec,
                    n_train=len(train_idx),
                    n_test=len(test_idx),
                    seed=iteration_seed,
                )
            )
            models[label] = forest
        except Exception as exc:
            try:
                wrapped = type(exc)(f"approach {label!r}, iteration {iteration}: {exc}")
            except Exception:
                raise exc
            raise wrapped from exc
    return records, models


def _iteration_task(args: tuple[_Prepared, int]) -> tuple[int, list[MetricsRecord]]:
    prep, iteration = args
    records, _ = run_iteration(prep, iteration)
    return iteration, records


def mccv_run(
    config: RunConfig,
    evidence: EvidenceSet,
    real_data: TabularDataset,
    threads: int = 1,
    progress=None,
) -> MccvReport:
    """Run the full Monte Carlo cross-validation experiment.

    ``progress``, when given, is called with each finished iteration's
    record list (in iteration order).  ``threads`` > 1 runs iterations in
    worker processes; results are identical either way.
    """
    prep = _prepare(config, evidence, real_data)
    all_records: list[list[MetricsRecord]] = [None] * config.iterations
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for iteration, records in pool.map(
                _iteration_task, [(prep, i) for i in range(config.iterations)]
            ):
                all_records[iteration] = records
                if progress is not None:
                    progress(records)
    else:
        for i in range(config.iterations):
            all_records[i] = run_iteration(prep, i)[0]
            if progress is not None:
                progress(all_records[i])
    flat = [rec for records in all_records for rec in records]
    return MccvReport(
        records=flat,
        approaches=config.approach_labels(),
        approach_specs=dict(zip(config.approach_labels(), config.approaches)),
        n_train=flat[0].n_train,
        n_test=flat[0].n_test,
        iterations=config.iterations,
    )


# ---------------------------------------------------------------------------
# Comparison and report emission


def _per_iteration_metric(report: MccvReport, approach: str) -> np.ndarray:
    rows = sorted(
        (r for r in report.records if r.approach == approach), key=lambda r: r.iteration
    )
    return np.array([r.balanced_accuracy for r in rows]), [r.iteration for r in rows]


def compare_best(report: MccvReport, baseline_approach: str = "standard") -> ComparisonResult:
    """Corrected t-test of the best pretrained approach (by mean balanced
    accuracy) against the baseline, paired by iteration."""
    if baseline_approach not in report.approaches:
        raise PairingError(f"baseline approach {baseline_approach!r} not in the report")
    pretrained = [
        a
        for a in report.approaches
        if report.approach_specs[a].kind == "hybrid"
    ]
    if not pretrained:
        raise PairingError("report contains no pretrained approach")
    base_vals, base_iters = _per_iteration_metric(report, baseline_approach)
    best = max(pretrained, key=lambda a: float(_per_iteration_metric(report, a)[0].mean()))
    best_vals, best_iters = _per_iteration_metric(report, best)
    if base_iters != best_iters:
        raise PairingError(
            f"iteration mismatch between {best!r} and {baseline_approach!r}"
        )
    return corrected_resampled_ttest(
        best_vals - base_vals,
        n_train=report.n_train,
        n_test=report.n_test,
        approach_a=best,
        approach_b=baseline_approach,
    )


def summary_rows(report: MccvReport) -> list[dict]:
    """Mean/SD of every metric per approach, in configured approach order."""
    out = []
    for approach in report.approaches:
        rows = [r for r in report.records if r.approach == approach]
        metrics = {
            "balanced_accuracy": np.array([r.balanced_accuracy for r in rows]),
            "auc": np.array([r.auc for r in rows]),
            "sensitivity": np.array([r.sensitivity for r in rows]),
            "specificity": np.array([r.specificity for r in rows]),
        }
        row = {"approach": approach}
        for name, vals in metrics.items():
            row[f"{name}_mean"] = float(vals.mean())
            row[f"{name}_sd"] = float(vals.std(ddof=1))
        out.append(row)
    return out


_RECORD_FIELDS = (
    "approach",
    "iteration",
    "balanced_accuracy",
    "auc",
    "sensitivity",
    "specificity",
    "n_train",
    "n_test",
    "seed",
)


def write_records(report: MccvReport, path) -> None:
    """Per-iteration records as delimited text, full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_RECORD_FIELDS)
        for r in report.records:
            writer.writerow(
                [
                    r.approach,
                    r.iteration,
                    repr(r.balanced_accuracy),
                    repr(r.auc),
                    repr(r.sensitivity),
                    repr(r.specificity),
                    r.n_train,
                    r.n_test,
                    r.seed,
                ]
            )


def write_summary(report: MccvReport, path, comparison: ComparisonResult | None = None) -> None:
    """Summary table (3 decimals) with one row per approach; the best
    pretrained approach carries the one-sided p against the baseline."""
    header = [
        "approach",
        "balanced_accuracy_mean",
        "balanced_accuracy_sd",
        "auc_mean",
        "auc_sd",
        "sensitivity_mean",
        "sensitivity_sd",
        "specificity_mean",
        "specificity_sd",
        "p_h1",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in summary_rows(report):
            p = "-"
            if comparison is not None and row["approach"] == comparison.approach_a:
                p = f"{comparison.p_one_sided:.3f}"
            writer.writerow(
                [row["approach"]]
                + [f"{row[k]:.3f}" for k in header[1:-1]]
                + [p]
            )


def write_comparison(comparison: ComparisonResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["approach_a", "approach_b", "mean_diff", "t_stat", "df", "p_one_sided"])
        writer.writerow(
            [
                comparison.approach_a,
                comparison.approach_b,
                repr(comparison.mean_diff),
                repr(comparison.t_stat),
                comparison.df,
                repr(comparison.p_one_sided),
            ]
        )
