import numpy as np
import pytest

from litforest.evaluation import ApproachSpec, RunConfig
from litforest.evidence import EvidenceSet, StudyCorrelation, StudyMoment
from litforest.forest import ForestParams
from litforest.preprocess import (
    CATEGORICAL,
    CONTINUOUS,
    FeatureSchema,
    OutcomeSpec,
    SchemaColumn,
    TabularDataset,
)

POS, NEG = "pos", "neg"
TINY_VARIABLES = ["a", "b", "c"]
TINY_MU_POS = np.array([1.2, 1.2, 1.2])
TINY_MU_NEG = np.zeros(3)


def tiny_evidence() -> EvidenceSet:
    """Evidence matching the generating distributions of tiny_dataset."""
    moments = []
    for i, v in enumerate(TINY_VARIABLES):
        moments.append(StudyMoment("truth", v, POS, float(TINY_MU_POS[i]), 1.0, 100))
        moments.append(StudyMoment("truth", v, NEG, float(TINY_MU_NEG[i]), 1.0, 100))
    correlations = [
        StudyCorrelation("truth", a, b, 0.0, 100)
        for a, b in (("a", "b"), ("a", "c"), ("b", "c"))
    ]
    return EvidenceSet(
        moments=moments, correlations=correlations, variables=list(TINY_VARIABLES), groups=[POS, NEG]
    )


def tiny_dataset(
    seed: int = 7,
    n: int = 80,
    prevalence: float = 0.5,
    missingness: float = 0.0,
    with_categorical: bool = False,
) -> TabularDataset:
    """Small labeled problem: three informative continuous features and a
    post score that encodes the class for remission labeling."""
    rng = np.random.default_rng(seed)
    n_pos = int(round(prevalence * n))
    cls = np.array([1] * n_pos + [0] * (n - n_pos))
    rng.shuffle(cls)
    X = rng.standard_normal((n, 3)) + np.where(cls[:, None] == 1, TINY_MU_POS, TINY_MU_NEG)
    if missingness > 0:
        X[rng.random(size=X.shape) < missingness] = np.nan
        X[0] = 0.0
    post = np.where(cls == 1, 5.0, 50.0)
    cols = [SchemaColumn(v, CONTINUOUS) for v in TINY_VARIABLES]
    data = {v: X[:, i].copy() for i, v in enumerate(TINY_VARIABLES)}
    if with_categorical:
        cols.append(SchemaColumn("site", CATEGORICAL, ("x", "y")))
        data["site"] = np.where(rng.random(n) < 0.5, "x", "y").astype(object)
    cols.append(SchemaColumn("outcome_score", CONTINUOUS))
    data["outcome_score"] = post
    return TabularDataset(schema=FeatureSchema(tuple(cols)), data=data)


def tiny_config(
    approaches: list[ApproachSpec],
    iterations: int = 2,
    master_seed: int = 5,
    total_trees: int = 6,
    folds: int = 2,
    test_fraction: float = 0.25,
) -> RunConfig:
    return RunConfig(
        master_seed=master_seed,
        outcome=OutcomeSpec(
            mode="remission", score_variable_post="outcome_score", remission_threshold=12.0
        ),
        variables_of_interest=list(TINY_VARIABLES),
        approaches=approaches,
        iterations=iterations,
        test_fraction=test_fraction,
        total_trees=total_trees,
        folds=folds,
        grid=[ForestParams(max_features="sqrt", min_samples_leaf=2, max_samples_fraction=0.8)],
    )


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """A generated desk fixture shared by CLI and acceptance tests."""
    from litforest.fixtures import make_fixture

    out = tmp_path_factory.mktemp("fixture")
    paths = make_fixture(seed=0, out_dir=out)
    return paths
