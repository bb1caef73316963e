"""Desk-scale fixture generation.

Builds everything needed to run the full pipeline without clinical data:
an evidence file encoding published per-group summary statistics as a
single pseudo-study, a synthetic correlation table, a pseudo-real dataset
whose per-group feature statistics mirror the real-data descriptives, and
a ready-to-run configuration.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .preprocess import (
    CATEGORICAL,
    CONTINUOUS,
    FeatureSchema,
    SchemaColumn,
    TabularDataset,
    save_dataset,
    save_schema,
)

__all__ = ["make_fixture", "FIXTURE_VARIABLES", "FIXTURE_EXTRA_VARIABLE"]

POSITIVE_GROUP = "responder"
NEGATIVE_GROUP = "non_responder"

FIXTURE_VARIABLES = ["ybocs", "bdi", "gaf", "ocir", "onset", "age"]
FIXTURE_EXTRA_VARIABLE = "madrs"

# Published pooled moments per group: variable -> (mean_pos, sd_pos, mean_neg, sd_neg).
_EVIDENCE_MOMENTS = {
    "ybocs": (25.38, 5.60, 24.96, 5.82),
    "bdi": (16.80, 9.33, 22.53, 11.20),
    "gaf": (59.11, 7.08, 57.85, 8.28),
    "ocir": (26.07, 12.12, 26.47, 12.93),
    "onset": (18.92, 8.00, 16.57, 8.76),
    "age": (30.43, 8.98, 33.61, 10.76),
    # no eligible treatment study; kept as an exploratory extra variable
    "madrs": (20.50, 6.10, 23.80, 6.90),
}

# Synthetic pooled correlations standing in for the published coefficients.
# The (ocir, gaf) and (ocir, onset) pairs are deliberately absent so the
# train-split fallback path is exercised.
_EVIDENCE_CORRELATIONS = {
    ("ybocs", "bdi"): 0.32,
    ("ybocs", "gaf"): -0.30,
    ("ybocs", "ocir"): 0.53,
    ("ybocs", "onset"): -0.05,
    ("ybocs", "age"): 0.02,
    ("bdi", "gaf"): -0.35,
    ("bdi", "ocir"): 0.38,
    ("bdi", "age"): 0.05,
    ("bdi", "onset"): -0.08,
    ("gaf", "age"): -0.10,
    ("gaf", "onset"): 0.06,
    ("age", "onset"): 0.55,
    ("ocir", "age"): 0.04,
    ("madrs", "ybocs"): 0.30,
    ("madrs", "bdi"): 0.65,
    ("madrs", "gaf"): -0.28,
    ("madrs", "ocir"): 0.25,
    ("madrs", "age"): 0.03,
    ("madrs", "onset"): -0.05,
}

# Per-group real-data descriptives driving the pseudo-real dataset.
_DATASET_MOMENTS = {
    "ybocs": (23.70, 5.12, 20.84, 5.97),
    "bdi": (18.63, 10.96, 18.05, 10.19),
    "gaf": (55.46, 10.22, 56.12, 10.05),
    "ocir": (27.36, 11.67, 27.40, 13.20),
    "onset": (18.14, 9.74, 18.28, 8.83),
    "age": (32.85, 10.62, 32.94, 9.11),
    "madrs": (19.90, 6.40, 23.10, 6.80),
    "med_count": (1.10, 0.90, 1.60, 1.10),
    "prior_episodes": (1.80, 1.30, 2.30, 1.60),
}

_CONTINUOUS_ORDER = list(_DATASET_MOMENTS)

# Generating correlation matrix for the pseudo-real data (both groups).
_GEN_CORRELATIONS = dict(_EVIDENCE_CORRELATIONS)
_GEN_CORRELATIONS.update(
    {
        ("ocir", "gaf"): -0.22,
        ("ocir", "onset"): -0.03,
        ("med_count", "ybocs"): 0.18,
        ("med_count", "bdi"): 0.22,
        ("med_count", "age"): 0.25,
        ("med_count", "madrs"): 0.20,
        ("prior_episodes", "ybocs"): 0.15,
        ("prior_episodes", "age"): 0.35,
        ("prior_episodes", "onset"): -0.20,
        ("prior_episodes", "med_count"): 0.30,
    }
)

_SEX_P_FEMALE = {POSITIVE_GROUP: 0.60, NEGATIVE_GROUP: 0.50}
_SITE_P = (0.40, 0.35, 0.25)

CONFIG_NAME = "config.txt"


def _correlation_matrix() -> np.ndarray:
    d = len(_CONTINUOUS_ORDER)
    R = np.eye(d)
    for (a, b), r in _GEN_CORRELATIONS.items():
        i, j = _CONTINUOUS_ORDER.index(a), _CONTINUOUS_ORDER.index(b)
        R[i, j] = R[j, i] = r
    return R


def _write_evidence(out_dir: Path, pseudo_n: int) -> tuple[Path, Path]:
    moments_path = out_dir / "moments.csv"
    with open(moments_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["study_id", "variable", "group", "mean", "sd", "n_total", "note"])
        for variable, (m_pos, s_pos, m_neg, s_neg) in _EVIDENCE_MOMENTS.items():
            study = "pooled_panel" if variable != "madrs" else "exploratory_madrs"
            note = "" if variable != "madrs" else "no treatment-matched study; exploratory"
            writer.writerow([study, variable, POSITIVE_GROUP, m_pos, s_pos, pseudo_n, note])
            writer.writerow([study, variable, NEGATIVE_GROUP, m_neg, s_neg, pseudo_n, note])
    corr_path = out_dir / "correlations.csv"
    with open(corr_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["study_id", "var_a", "var_b", "r", "n_total"])
        for (a, b), r in _EVIDENCE_CORRELATIONS.items():
            writer.writerow(["pooled_panel", a, b, r, pseudo_n])
    return moments_path, corr_path


def _schema() -> FeatureSchema:
    cols = [SchemaColumn(v, CONTINUOUS) for v in _CONTINUOUS_ORDER]
    cols.append(SchemaColumn("sex", CATEGORICAL, ("female", "male")))
    cols.append(SchemaColumn("site", CATEGORICAL, ("a", "b", "c")))
    cols.append(SchemaColumn("ybocs_post", CONTINUOUS))
    return FeatureSchema(tuple(cols))


def make_fixture(
    seed: int,
    out_dir: str | Path,
    n_rows: int = 463,
    prevalence: float = 0.72,
    label_noise: float = 0.10,
    missingness: float = 0.05,
) -> dict[str, Path]:
    """Write the fixture files into ``out_dir`` and return their paths.

    ``label_noise`` swaps the outcome-generating rule between matched
    responder/non-responder pairs, so the realized class balance stays at
    ``prevalence`` while the feature-outcome link degrades.  ``missingness``
    is the per-cell missing probability over feature columns (the post
    score is always complete).
    """
    if not (0 < prevalence < 1):
        raise ValueError(f"prevalence must be in (0, 1), got {prevalence}")
    if not (0 <= label_noise <= 1):
        raise ValueError(f"label_noise must be in [0, 1], got {label_noise}")
    if not (0 <= missingness < 1):
        raise ValueError(f"missingness must be in [0, 1), got {missingness}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    n_pos = int(round(prevalence * n_rows))
    groups = np.array([POSITIVE_GROUP] * n_pos + [NEGATIVE_GROUP] * (n_rows - n_pos))
    rng.shuffle(groups)

    R = _correlation_matrix()
    L = np.linalg.cholesky(R)
    d = len(_CONTINUOUS_ORDER)
    cont = np.empty((n_rows, d))
    for group in (POSITIVE_GROUP, NEGATIVE_GROUP):
        rows = np.flatnonzero(groups == group)
        col = 0 if group == POSITIVE_GROUP else 2
        mu = np.array([_DATASET_MOMENTS[v][col] for v in _CONTINUOUS_ORDER])
        sd = np.array([_DATASET_MOMENTS[v][col + 1] for v in _CONTINUOUS_ORDER])
        z = rng.standard_normal(size=(len(rows), d))
        cont[rows] = mu + (z @ L.T) * sd
    cont[:, _CONTINUOUS_ORDER.index("med_count")] = np.clip(
        np.round(cont[:, _CONTINUOUS_ORDER.index("med_count")]), 0, None
    )
    cont[:, _CONTINUOUS_ORDER.index("prior_episodes")] = np.clip(
        np.round(cont[:, _CONTINUOUS_ORDER.index("prior_episodes")]), 0, None
    )

    sex = np.where(
        rng.random(n_rows) < np.vectorize(_SEX_P_FEMALE.get)(groups), "female", "male"
    ).astype(object)
    site = np.array(["a", "b", "c"], dtype=object)[
        rng.choice(3, size=n_rows, p=_SITE_P)
    ]

    # outcome rule per row; label noise swaps rules between matched pairs
    rule_positive = groups == POSITIVE_GROUP
    n_swap = int(round(label_noise * min(n_pos, n_rows - n_pos) / 2)) * 2
    if n_swap:
        pos_rows = rng.permutation(np.flatnonzero(rule_positive))[: n_swap // 2]
        neg_rows = rng.permutation(np.flatnonzero(~rule_positive))[: n_swap // 2]
        rule_positive[pos_rows] = False
        rule_positive[neg_rows] = True

    pre = cont[:, _CONTINUOUS_ORDER.index("ybocs")]
    drop = np.where(
        rule_positive,
        8.5 + rng.exponential(scale=2.0, size=n_rows),
        2.0 + rng.normal(scale=2.0, size=n_rows),
    )
    post = np.clip(pre - drop, 0.0, None)

    if missingness > 0:
        mask = rng.random(size=(n_rows, d)) < missingness
        cont[mask] = np.nan
        sex[rng.random(n_rows) < missingness] = None
        site[rng.random(n_rows) < missingness] = None

    schema = _schema()
    data = {v: cont[:, i].copy() for i, v in enumerate(_CONTINUOUS_ORDER)}
    data["sex"] = sex
    data["site"] = site
    data["ybocs_post"] = post
    dataset = TabularDataset(schema=schema, data=data)

    dataset_path = out_dir / "dataset.csv"
    schema_path = out_dir / "schema.csv"
    save_dataset(dataset, dataset_path)
    save_schema(schema, schema_path)
    moments_path, corr_path = _write_evidence(out_dir, pseudo_n=n_rows)
    config_path = out_dir / CONFIG_NAME
    config_path.write_text(_desk_config(seed), encoding="utf-8")
    return {
        "dataset": dataset_path,
        "schema": schema_path,
        "moments": moments_path,
        "correlations": corr_path,
        "config": config_path,
    }


def _desk_config(seed: int) -> str:
    """A ready-to-run desk-scale configuration next to the fixture files."""
    approaches = "; ".join(
        ["standard"]
        + [f"hybrid:features_of_interest:{w}" for w in (0.2, 0.5, 1.0)]
        + [f"hybrid:all_features:{w}" for w in (0.2, 0.5, 1.0)]
    )
    lines = [
        "# desk-scale run over the bundled fixture",
        "dataset = dataset.csv",
        "schema = schema.csv",
        "moments = moments.csv",
        "correlations = correlations.csv",
        "out_dir = out",
        f"positive_group = {POSITIVE_GROUP}",
        f"negative_group = {NEGATIVE_GROUP}",
        "variables_of_interest = " + ", ".join(FIXTURE_VARIABLES),
        f"extra_variables = {FIXTURE_EXTRA_VARIABLE}",
        "outcome_mode = response",
        "score_pre = ybocs",
        "score_post = ybocs_post",
        "reliability = 0.8",
        "rci_cutoff = 1.96",
        "iterations = 10",
        "test_fraction = 0.2",
        f"master_seed = {seed}",
        "total_trees = 50",
        "n_per_class = 500",
        "folds = 5",
        "smote_k = 5",
        "imputer_sweeps = 5",
        "balancing = smote",
        f"approaches = {approaches}",
        "grid_max_features = sqrt",
        "grid_min_samples_leaf = 3, 10",
        "grid_max_samples_fraction = 0.8",
        "threads = 1",
        "verbosity = info",
    ]
    return "\n".join(lines) + "\n"
