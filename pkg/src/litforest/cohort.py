"""Sampling labeled synthetic cohorts from class distributions.

Covariance matrices pooled from disjoint studies are not guaranteed
positive semidefinite, so sampling is preceded by an eigenvalue-clipping
repair.  The Cholesky factorization accepts semidefinite input (zero
pivots produce zero columns) so that degenerate distributions sample
exactly at their mean.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientData, NotPositiveSemidefinite, SchemaMismatch, ShapeError
from .evidence import ClassDistribution

__all__ = [
    "SimulatedCohort",
    "nearest_psd",
    "cholesky_lower",
    "sample_mvnd",
    "simulate_cohort",
    "extend_all_features",
    "save_cohort",
]

LITERATURE = "literature"
TRAIN_SPLIT = "train-split"


@dataclass
class SimulatedCohort:
    """A labeled, shuffled synthetic sample.

    ``provenance`` tags each variable with the origin of its simulation
    parameters: pooled literature statistics or the caller's train split.
    """

    features: np.ndarray
    labels: np.ndarray
    variables: list[str]
    provenance: dict[str, str]

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


def nearest_psd(sigma: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Repair a symmetric matrix by clipping eigenvalues below ``eps`` to ``eps``.

    Preserves the eigenbasis; already-PSD input with smallest eigenvalue
    >= eps comes back unchanged up to symmetrization round-off.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, atol=1e-8):
        raise ShapeError("input matrix is not symmetric")
    eigval, eigvec = np.linalg.eigh((sigma + sigma.T) / 2.0)
    if eigval.min() >= eps:
        return sigma
    clipped = np.maximum(eigval, eps)
    repaired = (eigvec * clipped) @ eigvec.T
    return (repaired + repaired.T) / 2.0


def cholesky_lower(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T == sigma, accepting semidefinite input.

    Pivots within round-off of zero yield zero columns; a clearly negative
    pivot means the matrix was never repaired and raises
    ``NotPositiveSemidefinite``.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, atol=1e-8):
        raise ShapeError("input matrix is not symmetric")
    d = sigma.shape[0]
    scale = max(1.0, float(np.abs(np.diag(sigma)).max(initial=0.0)))
    tol = 1e-10 * scale
    L = np.zeros((d, d))
    for j in range(d):
        pivot = sigma[j, j] - L[j, :j] @ L[j, :j]
        if pivot < -tol:
            raise NotPositiveSemidefinite(
                f"negative pivot {pivot:.3e} at column {j}; run nearest_psd first"
            )
        L[j, j] = np.sqrt(max(pivot, 0.0))
        if L[j, j] > 0.0:
            for i in range(j + 1, d):
                L[i, j] = (sigma[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


def sample_mvnd(dist: ClassDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows from N(mu, sigma) as mu + L z with z standard normal."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    L = cholesky_lower(dist.sigma)
    z = rng.standard_normal(size=(n, len(dist.variables)))
    return dist.mu + z @ L.T


def simulate_cohort(
    pos: ClassDistribution,
    neg: ClassDistribution,
    n_per_class: int = 500,
    rng: np.random.Generator | None = None,
    provenance: dict[str, str] | None = None,
    shuffle: bool = True,
) -> SimulatedCohort:
    """Sample ``n_per_class`` rows per class, label by source, and shuffle.

    Label 1 marks rows drawn from ``pos``.  The 50/50 class ratio lets the
    pretrained trees learn both classes equally well.
    """
    if pos.variables != neg.variables:
        raise SchemaMismatch(
            f"class distributions disagree on variables: {pos.variables} vs {neg.variables}"
        )
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    if rng is None:
        rng = np.random.default_rng()
    features = np.vstack([sample_mvnd(pos, n_per_class, rng), sample_mvnd(neg, n_per_class, rng)])
    labels = np.concatenate(
        [np.ones(n_per_class, dtype=np.int8), np.zeros(n_per_class, dtype=np.int8)]
    )
    if shuffle:
        order = rng.permutation(2 * n_per_class)
        features = features[order]
        labels = labels[order]
    if provenance is None:
        provenance = {v: LITERATURE for v in pos.variables}
    return SimulatedCohort(
        features=features,
        labels=labels,
        variables=list(pos.variables),
        provenance=dict(provenance),
    )


def extend_all_features(
    lit_dist: ClassDistribution,
    train_features: np.ndarray,
    all_variables: list[str],
    eps: float = 1e-9,
) -> ClassDistribution:
    """Graft literature statistics onto train-split statistics for one class.

    ``train_features`` holds this class's train rows over ``all_variables``
    (numerically encoded, no missing cells).  Mean and covariance are
    estimated from those rows, then the entries covered by ``lit_dist``
    are overwritten with the literature values, and the result is passed
    through ``nearest_psd``.
    """
    train_features = np.asarray(train_features, dtype=float)
    missing = [v for v in lit_dist.variables if v not in all_variables]
    if missing:
        raise SchemaMismatch(f"literature variables not in the full feature space: {missing}")
    if train_features.ndim != 2 or train_features.shape[1] != len(all_variables):
        raise SchemaMismatch(
            f"train split has {train_features.shape} but {len(all_variables)} variables expected"
        )
    if train_features.shape[0] < 2:
        raise InsufficientData(
            f"class {lit_dist.group!r} has {train_features.shape[0]} train rows; need >= 2"
        )
    mu = train_features.mean(axis=0)
    sigma = np.cov(train_features, rowvar=False, ddof=1)
    sigma = np.atleast_2d(sigma)
    lit_idx = np.array([all_variables.index(v) for v in lit_dist.variables])
    mu[lit_idx] = lit_dist.mu
    sigma[np.ix_(lit_idx, lit_idx)] = lit_dist.sigma
    return ClassDistribution(
        group=lit_dist.group,
        variables=list(all_variables),
        mu=mu,
        sigma=nearest_psd(sigma, eps=eps),
    )


def save_cohort(cohort: SimulatedCohort, path: str | Path) -> None:
    """Write a cohort as delimited text (label column last) plus a
    ``<path>.meta`` sidecar with per-variable provenance tags."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(cohort.variables) + ["label"])
        for row, label in zip(cohort.features, cohort.labels):
            writer.writerow([repr(float(x)) for x in row] + [int(label)])
    with open(path.with_suffix(path.suffix + ".meta"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variable", "provenance"])
        for v in cohort.variables:
            writer.writerow([v, cohort.provenance[v]])
