"""Pooling of published per-study summary statistics.

Studies report per-group means and standard deviations for a set of
variables, plus pairwise correlations (usually without a group split).
This module pools them into one mean vector and covariance matrix per
outcome class, weighting every coefficient by the study's overall sample
size.  Pairs with no published correlation are reported as absent so the
caller can substitute a covariance estimated from its own training data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MissingEvidence, MissingFallback, ShapeError

__all__ = [
    "StudyMoment",
    "StudyCorrelation",
    "EvidenceSet",
    "PooledMoment",
    "ClassDistribution",
    "pool_moments",
    "pool_correlation",
    "build_class_distribution",
    "subset_evidence",
    "load_moments",
    "load_correlations",
    "load_evidence",
]


@dataclass(frozen=True)
class StudyMoment:
    """Mean and standard deviation one study reports for (variable, group).

    ``n_total`` is the study's overall sample size, not the group size;
    weighting by group sizes would let a study's class split distort the
    pooled group contrast.  ``note`` records free-text provenance, e.g.
    that an equivalent instrument version was accepted as-is.
    """

    study_id: str
    variable: str
    group: str
    mean: float
    sd: float
    n_total: int
    note: str = ""

    def __post_init__(self):
        if self.sd < 0:
            raise ValueError(f"sd must be >= 0, got {self.sd} ({self.study_id}/{self.variable})")
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total} ({self.study_id})")


@dataclass(frozen=True)
class StudyCorrelation:
    """Correlation one study reports for an unordered variable pair."""

    study_id: str
    var_a: str
    var_b: str
    r: float
    n_total: int

    def __post_init__(self):
        if abs(self.r) > 1:
            raise ValueError(f"|r| must be <= 1, got {self.r} ({self.study_id})")
        if self.var_a == self.var_b:
            raise ValueError(f"correlation needs two distinct variables ({self.study_id})")
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total} ({self.study_id})")


@dataclass
class EvidenceSet:
    """All extracted study statistics for one prediction problem.

    ``groups`` lists exactly two class labels, positive class first.
    """

    moments: list[StudyMoment]
    correlations: list[StudyCorrelation]
    variables: list[str]
    groups: list[str]

    def __post_init__(self):
        if len(self.groups) != 2:
            raise ValueError(f"exactly two groups expected, got {self.groups}")
        known = set(self.variables)
        seen_m = set()
        for m in self.moments:
            if m.variable not in known:
                raise ValueError(f"moment references unknown variable {m.variable!r}")
            if m.group not in self.groups:
                raise ValueError(f"moment references unknown group {m.group!r}")
            k = (m.study_id, m.variable, m.group)
            if k in seen_m:
                raise ValueError(f"duplicate moment {k}")
            seen_m.add(k)
        seen_c = set()
        for c in self.correlations:
            if c.var_a not in known or c.var_b not in known:
                raise ValueError(f"correlation references unknown variable ({c.var_a}, {c.var_b})")
            k = (c.study_id, frozenset((c.var_a, c.var_b)))
            if k in seen_c:
                raise ValueError(f"duplicate correlation {k}")
            seen_c.add(k)


@dataclass(frozen=True)
class PooledMoment:
    """Sample-size-weighted mean and variance for one (variable, group)."""

    variable: str
    group: str
    mean: float
    variance: float
    effective_n: int


@dataclass
class ClassDistribution:
    """Mean vector and covariance matrix for one outcome class."""

    group: str
    variables: list[str]
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        d = len(self.variables)
        if self.mu.shape != (d,):
            raise ShapeError(f"mu has shape {self.mu.shape}, expected ({d},)")
        if self.sigma.shape != (d, d):
            raise ShapeError(f"sigma has shape {self.sigma.shape}, expected ({d}, {d})")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-10):
            raise ShapeError("sigma is not symmetric")


def pool_moments(evidence: EvidenceSet, variable: str, group: str) -> PooledMoment:
    """Pool all study moments for (variable, group).

    The pooled mean is the n-weighted average of study means; the pooled
    variance is the n-weighted average of squared study SDs.  Weights are
    each study's overall n.
    """
    rows = [m for m in evidence.moments if m.variable == variable and m.group == group]
    if not rows:
        raise MissingEvidence(f"no study reports ({variable!r}, {group!r})")
    weights = np.array([m.n_total for m in rows], dtype=float)
    means = np.array([m.mean for m in rows])
    variances = np.array([m.sd**2 for m in rows])
    total = weights.sum()
    return PooledMoment(
        variable=variable,
        group=group,
        mean=float(weights @ means / total),
        variance=float(weights @ variances / total),
        effective_n=int(sum(m.n_total for m in rows)),
    )


def pool_correlation(evidence: EvidenceSet, var_a: str, var_b: str) -> float | None:
    """Pool study correlations for an unordered pair; None when no study reports it.

    Weighted averaging cannot leave [-1, 1]; the clamp only guards float
    round-off.
    """
    pair = frozenset((var_a, var_b))
    rows = [c for c in evidence.correlations if frozenset((c.var_a, c.var_b)) == pair]
    if not rows:
        return None
    weights = np.array([c.n_total for c in rows], dtype=float)
    rs = np.array([c.r for c in rows])
    return float(np.clip(weights @ rs / weights.sum(), -1.0, 1.0))


def build_class_distribution(
    evidence: EvidenceSet,
    group: str,
    fallback_cov: np.ndarray | None = None,
) -> ClassDistribution:
    """Assemble the mean vector and covariance matrix for one class.

    Diagonal entries are pooled variances; off-diagonal entries turn the
    pooled correlation into a covariance using this group's SDs.  The same
    pooled correlations serve both classes, so the two covariance matrices
    differ only through the group variances.  Pairs without a pooled
    correlation take their entry from ``fallback_cov`` (typically the
    sample covariance of the caller's train split); omitting the fallback
    while a pair is absent raises ``MissingFallback``.
    """
    variables = evidence.variables
    d = len(variables)
    if fallback_cov is not None:
        fallback_cov = np.asarray(fallback_cov, dtype=float)
        if fallback_cov.shape != (d, d):
            raise ShapeError(
                f"fallback_cov has shape {fallback_cov.shape}, expected ({d}, {d})"
            )
    pooled = [pool_moments(evidence, v, group) for v in variables]
    mu = np.array([p.mean for p in pooled])
    sd = np.sqrt([p.variance for p in pooled])
    sigma = np.diag([p.variance for p in pooled])
    for i in range(d):
        for j in range(i + 1, d):
            r = pool_correlation(evidence, variables[i], variables[j])
            if r is not None:
                cov = r * sd[i] * sd[j]
            elif fallback_cov is not None:
                cov = fallback_cov[i, j]
            else:
                raise MissingFallback(
                    f"no pooled correlation for ({variables[i]!r}, {variables[j]!r}) "
                    "and no fallback covariance given"
                )
            sigma[i, j] = sigma[j, i] = cov
    return ClassDistribution(group=group, variables=list(variables), mu=mu, sigma=sigma)


def subset_evidence(evidence: EvidenceSet, variables: list[str]) -> EvidenceSet:
    """Restrict an EvidenceSet to the given variables (same groups)."""
    keep = set(variables)
    unknown = keep - set(evidence.variables)
    if unknown:
        raise ValueError(f"variables not in the evidence set: {sorted(unknown)}")
    return EvidenceSet(
        moments=[m for m in evidence.moments if m.variable in keep],
        correlations=[
            c for c in evidence.correlations if c.var_a in keep and c.var_b in keep
        ],
        variables=list(variables),
        groups=list(evidence.groups),
    )


# ---------------------------------------------------------------------------
# Evidence files: delimited text, one record per row, header row required.
# Moments:      study_id,variable,group,mean,sd,n_total[,note]
# Correlations: study_id,var_a,var_b,r,n_total

_MOMENT_FIELDS = ("study_id", "variable", "group", "mean", "sd", "n_total")
_CORRELATION_FIELDS = ("study_id", "var_a", "var_b", "r", "n_total")


def _check_header(found: list[str] | None, required: tuple[str, ...], path: Path) -> None:
    if found is None or [f.strip() for f in found[: len(required)]] != list(required):
        raise ValueError(f"{path}: expected header {','.join(required)}")


def load_moments(path: str | Path) -> list[StudyMoment]:
    """Read study moments from a delimited text file."""
    path = Path(path)
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, _MOMENT_FIELDS, path)
        for row in reader:
            if not row or not any(cell.strip() for cell in row):
                continue
            note = row[6].strip() if len(row) > 6 else ""
            out.append(
                StudyMoment(
                    study_id=row[0].strip(),
                    variable=row[1].strip(),
                    group=row[2].strip(),
                    mean=float(row[3]),
                    sd=float(row[4]),
                    n_total=int(row[5]),
                    note=note,
                )
            )
    return out


def load_correlations(path: str | Path) -> list[StudyCorrelation]:
    """Read study correlations from a delimited text file."""
    path = Path(path)
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, _CORRELATION_FIELDS, path)
        for row in reader:
            if not row or not any(cell.strip() for cell in row):
                continue
            out.append(
                StudyCorrelation(
                    study_id=row[0].strip(),
                    var_a=row[1].strip(),
                    var_b=row[2].strip(),
                    r=float(row[3]),
                    n_total=int(row[4]),
                )
            )
    return out


def load_evidence(
    moments_path: str | Path,
    correlations_path: str | Path,
    groups: tuple[str, str],
    variables: list[str] | None = None,
) -> EvidenceSet:
    """Load an EvidenceSet from a moments file and a correlations file.

    When ``variables`` is omitted the variable order is the order of first
    appearance in the moments file.
    """
    moments = load_moments(moments_path)
    correlations = load_correlations(correlations_path)
    if variables is None:
        variables = []
        for m in moments:
            if m.variable not in variables:
                variables.append(m.variable)
    return EvidenceSet(
        moments=moments,
        correlations=correlations,
        variables=list(variables),
        groups=list(groups),
    )
