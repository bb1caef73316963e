"""Batch command-line entry point.

Subcommands:

* ``run --config PATH [--out DIR] [--threads N]`` — full MCCV experiment;
  writes per-iteration records, the summary table, the comparison against
  the standard forest, and a manifest that reproduces the run byte for byte.
* ``validate --config PATH`` — parse and cross-check a configuration and
  its referenced files without running anything.
* ``make-fixture --seed N --out DIR`` — generate the synthetic desk-scale
  fixture (evidence, dataset, schema, config).

Configuration files are flat ``key = value`` text; ``#`` starts a comment.
Relative paths are resolved against the configuration file's directory.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import (
    DegenerateReliability,
    DegenerateVariance,
    EmptyColumn,
    EmptyData,
    InsufficientData,
    InsufficientIterations,
    InvalidWeight,
    MissingEvidence,
    MissingFallback,
    NotPositiveSemidefinite,
    PairingError,
    SchemaMismatch,
    ShapeError,
    SingleClass,
    StratificationError,
    UndefinedRate,
)
from .evaluation import (
    ApproachSpec,
    RunConfig,
    compare_best,
    mccv_run,
    write_comparison,
    write_records,
    write_summary,
)
from .evidence import load_evidence, pool_moments
from .fixtures import make_fixture
from .forest import ForestParams
from .preprocess import CONTINUOUS, OutcomeSpec, load_dataset, load_schema

logger = logging.getLogger("litforest")

_CONFIG_KEYS = (
    "dataset",
    "schema",
    "moments",
    "correlations",
    "out_dir",
    "positive_group",
    "negative_group",
    "variables_of_interest",
    "extra_variables",
    "outcome_mode",
    "score_pre",
    "score_post",
    "reliability",
    "rci_cutoff",
    "remission_threshold",
    "sd_pre_reference",
    "iterations",
    "test_fraction",
    "master_seed",
    "total_trees",
    "n_per_class",
    "folds",
    "smote_k",
    "imputer_sweeps",
    "balancing",
    "approaches",
    "grid_max_features",
    "grid_min_samples_leaf",
    "grid_max_samples_fraction",
    "threads",
    "verbosity",
    "missing_token",
)


@dataclass
class CliConfig:
    dataset: Path
    schema: Path
    moments: Path
    correlations: Path
    out_dir: Path
    positive_group: str
    negative_group: str
    variables_of_interest: list[str]
    extra_variables: list[str]
    outcome_mode: str
    score_pre: str
    score_post: str
    reliability: float
    rci_cutoff: float
    remission_threshold: float | None
    sd_pre_reference: float | None
    iterations: int
    test_fraction: float
    master_seed: int
    total_trees: int
    n_per_class: int
    folds: int
    smote_k: int
    imputer_sweeps: int
    balancing: str
    approaches: list[str]
    grid_max_features: list[str | int]
    grid_min_samples_leaf: list[int]
    grid_max_samples_fraction: list[float]
    threads: int
    verbosity: str
    missing_token: str


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def parse_config(path: str | Path) -> CliConfig:
    """Parse a flat key = value configuration file."""
    path = Path(path)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value

    required = ("dataset", "schema", "moments", "correlations", "approaches",
                "positive_group", "negative_group", "variables_of_interest",
                "score_pre", "score_post", "master_seed")
    missing = [k for k in required if k not in raw]
    if missing:
        raise ValueError(f"{path}: missing required keys: {', '.join(missing)}")

    base = path.parent

    def _path(key: str, default: str | None = None) -> Path:
        value = raw.get(key, default)
        p = Path(value)
        return p if p.is_absolute() else (base / p)

    def _float(key: str, default: float | None) -> float | None:
        if key not in raw:
            return default
        return float(raw[key])

    def _int(key: str, default: int) -> int:
        return int(raw[key]) if key in raw else default

    mf: list[str | int] = []
    for item in _split_list(raw.get("grid_max_features", "sqrt, log2, 4, 5")):
        mf.append(item if item in ("sqrt", "log2") else int(item))

    return CliConfig(
        dataset=_path("dataset"),
        schema=_path("schema"),
        moments=_path("moments"),
        correlations=_path("correlations"),
        out_dir=_path("out_dir", "out"),
        positive_group=raw["positive_group"],
        negative_group=raw["negative_group"],
        variables_of_interest=_split_list(raw["variables_of_interest"]),
        extra_variables=_split_list(raw.get("extra_variables", "")),
        outcome_mode=raw.get("outcome_mode", "response"),
        score_pre=raw["score_pre"],
        score_post=raw["score_post"],
        reliability=_float("reliability", 0.80),
        rci_cutoff=_float("rci_cutoff", 1.96),
        remission_threshold=_float("remission_threshold", 12.0),
        sd_pre_reference=_float("sd_pre_reference", None),
        iterations=_int("iterations", 100),
        test_fraction=_float("test_fraction", 0.2),
        master_seed=_int("master_seed", 0),
        total_trees=_int("total_trees", 200),
        n_per_class=_int("n_per_class", 500),
        folds=_int("folds", 5),
        smote_k=_int("smote_k", 5),
        imputer_sweeps=_int("imputer_sweeps", 5),
        balancing=raw.get("balancing", "smote"),
        approaches=[a.strip() for a in raw["approaches"].split(";") if a.strip()],
        grid_max_features=mf,
        grid_min_samples_leaf=[int(x) for x in _split_list(raw.get("grid_min_samples_leaf", "1, 3, 5, 10"))],
        grid_max_samples_fraction=[float(x) for x in _split_list(raw.get("grid_max_samples_fraction", "0.66, 0.80, 1.00"))],
        threads=_int("threads", 0),
        verbosity=raw.get("verbosity", "info"),
        missing_token=raw.get("missing_token", ""),
    )


def parse_approach(token: str, default_balancing: str) -> ApproachSpec:
    """Parse 'standard[:BAL]' or 'hybrid:MODE:WEIGHT[:BAL]'."""
    parts = token.split(":")
    if parts[0] == "standard":
        if len(parts) > 2:
            raise ValueError(f"malformed approach {token!r}")
        bal = parts[1] if len(parts) == 2 else default_balancing
        return ApproachSpec(kind="standard", balancing=bal)
    if parts[0] == "hybrid":
        if len(parts) not in (3, 4):
            raise ValueError(f"malformed approach {token!r}")
        weight = float(parts[2])
        if weight < 0:
            raise InvalidWeight(f"approach {token!r}: weight must be >= 0")
        bal = parts[3] if len(parts) == 4 else default_balancing
        return ApproachSpec(kind="hybrid", sim_dataset=parts[1], weight=weight, balancing=bal)
    raise ValueError(f"unknown approach kind in {token!r}")


def build_run_config(cfg: CliConfig) -> RunConfig:
    outcome = OutcomeSpec(
        mode=cfg.outcome_mode,
        score_variable_pre=cfg.score_pre,
        score_variable_post=cfg.score_post,
        reliability=cfg.reliability,
        rci_cutoff=cfg.rci_cutoff,
        remission_threshold=cfg.remission_threshold,
        sd_pre_reference=cfg.sd_pre_reference,
    )
    grid = [
        ForestParams(max_features=mf, min_samples_leaf=leaf, max_samples_fraction=frac)
        for mf in cfg.grid_max_features
        for leaf in cfg.grid_min_samples_leaf
        for frac in cfg.grid_max_samples_fraction
    ]
    return RunConfig(
        master_seed=cfg.master_seed,
        outcome=outcome,
        variables_of_interest=cfg.variables_of_interest,
        extra_variables=cfg.extra_variables,
        approaches=[parse_approach(a, cfg.balancing) for a in cfg.approaches],
        iterations=cfg.iterations,
        test_fraction=cfg.test_fraction,
        total_trees=cfg.total_trees,
        n_per_class=cfg.n_per_class,
        folds=cfg.folds,
        grid=grid,
        smote_k=cfg.smote_k,
        imputer_sweeps=cfg.imputer_sweeps,
    )


def emit_manifest(cfg: CliConfig, out_dir: Path, path: Path) -> None:
    """Write the normalized configuration; re-running from it reproduces
    the outputs byte for byte."""
    lines = [
        f"# litforest v{__version__} run manifest (re-runnable configuration)",
        f"dataset = {cfg.dataset.resolve()}",
        f"schema = {cfg.schema.resolve()}",
        f"moments = {cfg.moments.resolve()}",
        f"correlations = {cfg.correlations.resolve()}",
        f"out_dir = {out_dir.resolve()}",
        f"positive_group = {cfg.positive_group}",
        f"negative_group = {cfg.negative_group}",
        "variables_of_interest = " + ", ".join(cfg.variables_of_interest),
        "extra_variables = " + ", ".join(cfg.extra_variables),
        f"outcome_mode = {cfg.outcome_mode}",
        f"score_pre = {cfg.score_pre}",
        f"score_post = {cfg.score_post}",
        f"reliability = {cfg.reliability!r}",
        f"rci_cutoff = {cfg.rci_cutoff!r}",
        f"remission_threshold = {cfg.remission_threshold!r}",
        f"iterations = {cfg.iterations}",
        f"test_fraction = {cfg.test_fraction!r}",
        f"master_seed = {cfg.master_seed}",
        f"total_trees = {cfg.total_trees}",
        f"n_per_class = {cfg.n_per_class}",
        f"folds = {cfg.folds}",
        f"smote_k = {cfg.smote_k}",
        f"imputer_sweeps = {cfg.imputer_sweeps}",
        f"balancing = {cfg.balancing}",
        "approaches = " + "; ".join(cfg.approaches),
        "grid_max_features = " + ", ".join(str(x) for x in cfg.grid_max_features),
        "grid_min_samples_leaf = " + ", ".join(str(x) for x in cfg.grid_min_samples_leaf),
        "grid_max_samples_fraction = " + ", ".join(repr(x) for x in cfg.grid_max_samples_fraction),
        f"threads = {cfg.threads}",
        f"verbosity = {cfg.verbosity}",
        f"missing_token = {cfg.missing_token}",
    ]
    if cfg.sd_pre_reference is not None:
        lines.insert(lines.index(f"iterations = {cfg.iterations}"),
                     f"sd_pre_reference = {cfg.sd_pre_reference!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_STAGE_BY_ERROR = {
    DegenerateReliability: "label",
    MissingEvidence: "simulate",
    MissingFallback: "simulate",
    ShapeError: "simulate",
    NotPositiveSemidefinite: "simulate",
    InsufficientData: "simulate",
    SchemaMismatch: "simulate",
    EmptyData: "fit",
    EmptyColumn: "fit",
    InvalidWeight: "fit",
    StratificationError: "fit",
    SingleClass: "fit",
    UndefinedRate: "evaluate",
    InsufficientIterations: "evaluate",
    DegenerateVariance: "evaluate",
    PairingError: "evaluate",
}


def _stage_of(exc: Exception) -> str:
    for cls, stage in _STAGE_BY_ERROR.items():
        if isinstance(exc, cls):
            return stage
    return "fit"


def _fail(stage: str, exc: Exception) -> int:
    print(f"error: stage={stage}: {exc}", file=sys.stderr)
    return 1


def _setup_logging(verbosity: str) -> None:
    level = {"debug": logging.DEBUG, "info": logging.INFO, "quiet": logging.WARNING}.get(
        verbosity, logging.INFO
    )
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr, force=True)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = parse_config(args.config)
        if args.out:
            cfg.out_dir = Path(args.out)
        if args.threads is not None:
            cfg.threads = args.threads
        run_config = build_run_config(cfg)
    except Exception as exc:
        return _fail("parse", exc)

    try:
        schema = load_schema(cfg.schema)
        dataset = load_dataset(cfg.dataset, schema, missing_token=cfg.missing_token)
        evidence = load_evidence(
            cfg.moments, cfg.correlations, groups=(cfg.positive_group, cfg.negative_group)
        )
    except Exception as exc:
        return _fail("load", exc)

    _setup_logging(cfg.verbosity)
    threads = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)

    def _log_progress(records):
        for r in records:
            logger.info(
                "iteration %3d  %-50s bal_acc=%.3f auc=%.3f sens=%.3f spec=%.3f",
                r.iteration,
                r.approach,
                r.balanced_accuracy,
                r.auc,
                r.sensitivity,
                r.specificity,
            )

    try:
        report = mccv_run(run_config, evidence, dataset, threads=threads, progress=_log_progress)
    except Exception as exc:
        return _fail(_stage_of(exc), exc)

    try:
        comparison = None
        if any(a.kind == "hybrid" for a in run_config.approaches) and any(
            a.kind == "standard" for a in run_config.approaches
        ):
            baseline = next(
                label
                for label, a in zip(run_config.approach_labels(), run_config.approaches)
                if a.kind == "standard"
            )
            comparison = compare_best(report, baseline_approach=baseline)
    except Exception as exc:
        return _fail("evaluate", exc)

    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records(report, out_dir / "records.csv")
    write_summary(report, out_dir / "summary.csv", comparison)
    if comparison is not None:
        write_comparison(comparison, out_dir / "comparison.csv")
        logger.info(
            "comparison: %s vs %s: mean diff %.3f, t(%d) = %.3f, one-sided p = %.3f",
            comparison.approach_a,
            comparison.approach_b,
            comparison.mean_diff,
            comparison.df,
            comparison.t_stat,
            comparison.p_one_sided,
        )
    emit_manifest(cfg, out_dir, out_dir / "manifest.txt")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    findings: list[str] = []
    try:
        cfg = parse_config(args.config)
    except Exception as exc:
        print(f"finding: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    run_config = None
    try:
        run_config = build_run_config(cfg)
    except Exception as exc:
        findings.append(f"{type(exc).__name__}: {exc}")

    dataset = evidence = None
    for key in ("dataset", "schema", "moments", "correlations"):
        if not getattr(cfg, key).is_file():
            findings.append(f"MissingFile: {key} path {getattr(cfg, key)} does not exist")
    if not findings:
        try:
            schema = load_schema(cfg.schema)
            dataset = load_dataset(cfg.dataset, schema, missing_token=cfg.missing_token)
        except Exception as exc:
            findings.append(f"{type(exc).__name__}: {exc}")
        try:
            evidence = load_evidence(
                cfg.moments, cfg.correlations, groups=(cfg.positive_group, cfg.negative_group)
            )
        except Exception as exc:
            findings.append(f"{type(exc).__name__}: {exc}")

    if dataset is not None and run_config is not None:
        names = dataset.schema.names
        for col in (cfg.score_pre, cfg.score_post):
            if col not in names:
                findings.append(f"SchemaMismatch: outcome column {col!r} not in the dataset")
        needed = list(cfg.variables_of_interest)
        if any(a.sim_dataset in ("features_plus_extra", "all_features_plus_extra")
               for a in run_config.approaches if a.kind == "hybrid"):
            needed += list(cfg.extra_variables)
        for var in needed:
            if var not in names:
                findings.append(f"SchemaMismatch: literature variable {var!r} not in the dataset")
            elif dataset.schema.column(var).kind != CONTINUOUS:
                findings.append(f"SchemaMismatch: literature variable {var!r} is not continuous")
        if evidence is not None:
            for var in needed:
                for group in (cfg.positive_group, cfg.negative_group):
                    try:
                        pool_moments(evidence, var, group)
                    except MissingEvidence as exc:
                        findings.append(f"MissingEvidence: {exc}")

    for finding in findings:
        print(f"finding: {finding}", file=sys.stderr)
    if findings:
        return 1
    print("ok: configuration is runnable", file=sys.stderr)
    return 0


def cmd_make_fixture(args: argparse.Namespace) -> int:
    try:
        paths = make_fixture(
            seed=args.seed,
            out_dir=args.out,
            n_rows=args.rows,
            prevalence=args.prevalence,
            label_noise=args.label_noise,
            missingness=args.missingness,
        )
    except Exception as exc:
        print(f"error: stage=fixture: {exc}", file=sys.stderr)
        return 1
    for name, p in paths.items():
        print(f"{name}: {p}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="litforest",
        description="Literature-informed pretraining of random forests",
    )
    parser.add_argument("--version", action="version", version=f"litforest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full MCCV experiment")
    p_run.add_argument("--config", required=True, help="configuration file")
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--threads", type=int, default=None, help="worker processes (0 = auto)")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="check a configuration without running")
    p_val.add_argument("--config", required=True, help="configuration file")
    p_val.set_defaults(func=cmd_validate)

    p_fix = sub.add_parser("make-fixture", help="generate the synthetic desk-scale fixture")
    p_fix.add_argument("--seed", type=int, default=0)
    p_fix.add_argument("--out", required=True, help="output directory")
    p_fix.add_argument("--rows", type=int, default=463)
    p_fix.add_argument("--prevalence", type=float, default=0.72)
    p_fix.add_argument("--label-noise", type=float, default=0.10)
    p_fix.add_argument("--missingness", type=float, default=0.05)
    p_fix.set_defaults(func=cmd_make_fixture)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
