import numpy as np
import pytest

from litforest.errors import MissingEvidence, MissingFallback
from litforest.evidence import (
    EvidenceSet,
    StudyCorrelation,
    StudyMoment,
    build_class_distribution,
    load_evidence,
    pool_correlation,
    pool_moments,
)

POS, NEG = "responder", "non_responder"


def make_evidence(moments, correlations=(), variables=None):
    if variables is None:
        variables = []
        for m in moments:
            if m.variable not in variables:
                variables.append(m.variable)
    return EvidenceSet(
        moments=list(moments),
        correlations=list(correlations),
        variables=variables,
        groups=[POS, NEG],
    )


class TestPoolMoments:
    def test_weighted_mean_anchor(self):
        ev = make_evidence(
            [
                StudyMoment("s1", "bdi", POS, mean=18, sd=1, n_total=20),
                StudyMoment("s2", "bdi", POS, mean=24, sd=1, n_total=40),
            ]
        )
        assert pool_moments(ev, "bdi", POS).mean == 22.0

    def test_single_study_identity(self):
        ev = make_evidence([StudyMoment("s1", "ybocs", POS, 25.38, 5.60, 39)])
        pm = pool_moments(ev, "ybocs", POS)
        assert pm.mean == 25.38
        assert pm.variance == pytest.approx(31.36, abs=1e-12)
        assert pm.effective_n == 39

    def test_variance_pools_squared_sds(self):
        # oracle: (4*10 + 16*30) / 40 = 13
        ev = make_evidence(
            [
                StudyMoment("s1", "x", POS, 0, sd=2, n_total=10),
                StudyMoment("s2", "x", POS, 0, sd=4, n_total=30),
            ]
        )
        assert pool_moments(ev, "x", POS).variance == pytest.approx(13.0)

    def test_missing_evidence_names_variable_and_group(self):
        ev = make_evidence([StudyMoment("s1", "x", POS, 0, 1, 10)])
        with pytest.raises(MissingEvidence, match="'x'.*'non_responder'"):
            pool_moments(ev, "x", NEG)

    def test_weight_invariance(self):
        studies = [(18.0, 2.0, 20), (24.0, 4.0, 40), (21.0, 3.0, 13)]
        pooled = []
        for scale in (1, 7):
            ev = make_evidence(
                [
                    StudyMoment(f"s{i}", "x", POS, m, s, n * scale)
                    for i, (m, s, n) in enumerate(studies)
                ]
            )
            pooled.append(pool_moments(ev, "x", POS))
        assert pooled[0].mean == pytest.approx(pooled[1].mean, abs=1e-12)
        assert pooled[0].variance == pytest.approx(pooled[1].variance, abs=1e-12)

    def test_convexity(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = rng.integers(1, 6)
            moments = [
                StudyMoment(
                    f"s{i}",
                    "x",
                    POS,
                    mean=float(rng.normal(20, 5)),
                    sd=float(rng.uniform(0.5, 10)),
                    n_total=int(rng.integers(5, 400)),
                )
                for i in range(k)
            ]
            pm = pool_moments(make_evidence(moments), "x", POS)
            means = [m.mean for m in moments]
            variances = [m.sd**2 for m in moments]
            assert min(means) - 1e-12 <= pm.mean <= max(means) + 1e-12
            assert min(variances) - 1e-12 <= pm.variance <= max(variances) + 1e-12


class TestPoolCorrelation:
    def test_weighted_average(self):
        # oracle: (0.2*50 + 0.6*150) / 200 = 0.5
        ev = make_evidence(
            [StudyMoment("s1", "a", POS, 0, 1, 1), StudyMoment("s1", "b", POS, 0, 1, 1)],
            [
                StudyCorrelation("s1", "a", "b", 0.2, 50),
                StudyCorrelation("s2", "a", "b", 0.6, 150),
            ],
        )
        assert pool_correlation(ev, "a", "b") == pytest.approx(0.5)

    def test_single_study_identity(self):
        ev = make_evidence(
            [StudyMoment("s1", "a", POS, 0, 1, 1), StudyMoment("s1", "b", POS, 0, 1, 1)],
            [StudyCorrelation("s1", "a", "b", -0.3, 46)],
        )
        assert pool_correlation(ev, "a", "b") == pytest.approx(-0.3)

    def test_absent_pair_returns_none(self):
        ev = make_evidence(
            [
                StudyMoment("s1", "ocir", POS, 0, 1, 1),
                StudyMoment("s1", "onset", POS, 0, 1, 1),
            ]
        )
        assert pool_correlation(ev, "ocir", "onset") is None

    def test_argument_order_is_irrelevant(self):
        ev = make_evidence(
            [StudyMoment("s1", "a", POS, 0, 1, 1), StudyMoment("s1", "b", POS, 0, 1, 1)],
            [StudyCorrelation("s1", "a", "b", 0.41, 50)],
        )
        assert pool_correlation(ev, "a", "b") == pool_correlation(ev, "b", "a")


def two_group_moments(variables, stats):
    """stats: variable -> (mean_pos, sd_pos, mean_neg, sd_neg)"""
    moments = []
    for v in variables:
        mp, sp, mn, sn = stats[v]
        moments.append(StudyMoment("s1", v, POS, mp, sp, 100))
        moments.append(StudyMoment("s1", v, NEG, mn, sn, 100))
    return moments


class TestBuildClassDistribution:
    def test_zero_correlations_give_diagonal(self):
        variables = ["a", "b"]
        ev = make_evidence(
            two_group_moments(variables, {"a": (1, 2, 0, 1), "b": (3, 4, 2, 3)}),
            [StudyCorrelation("s1", "a", "b", 0.0, 100)],
            variables,
        )
        dist = build_class_distribution(ev, POS)
        assert np.allclose(dist.sigma, np.diag([4.0, 16.0]))

    def test_off_diagonal_from_pooled_correlation(self):
        # oracle: 0.5 * 9.33 * 5.60 = 26.124
        variables = ["bdi", "ybocs"]
        ev = make_evidence(
            two_group_moments(
                variables, {"bdi": (16.8, 9.33, 22.53, 11.2), "ybocs": (25.38, 5.6, 24.96, 5.82)}
            ),
            [StudyCorrelation("s1", "bdi", "ybocs", 0.5, 100)],
            variables,
        )
        dist = build_class_distribution(ev, POS)
        assert dist.sigma[0, 1] == pytest.approx(26.124, abs=1e-9)
        assert dist.sigma[1, 0] == dist.sigma[0, 1]

    def test_fallback_fills_absent_pairs(self):
        variables = ["a", "b"]
        ev = make_evidence(
            two_group_moments(variables, {"a": (0, 1, 0, 1), "b": (0, 2, 0, 2)}),
            [],
            variables,
        )
        fallback = np.array([[9.0, 0.7], [0.7, 9.0]])
        dist = build_class_distribution(ev, POS, fallback_cov=fallback)
        assert dist.sigma[0, 1] == 0.7
        # diagonal still comes from the pooled variances, not the fallback
        assert dist.sigma[0, 0] == pytest.approx(1.0)

    def test_absent_pair_without_fallback_raises(self):
        variables = ["a", "b"]
        ev = make_evidence(
            two_group_moments(variables, {"a": (0, 1, 0, 1), "b": (0, 2, 0, 2)}),
            [],
            variables,
        )
        with pytest.raises(MissingFallback):
            build_class_distribution(ev, POS)

    def test_missing_moment_raises(self):
        ev = make_evidence(
            [StudyMoment("s1", "a", POS, 0, 1, 10), StudyMoment("s1", "b", POS, 0, 1, 10)],
            [StudyCorrelation("s1", "a", "b", 0.1, 10)],
            ["a", "b"],
        )
        with pytest.raises(MissingEvidence):
            build_class_distribution(ev, NEG)

    def test_shared_correlations_differing_covariances(self):
        variables = ["a", "b"]
        ev = make_evidence(
            two_group_moments(variables, {"a": (1, 2, 0, 3), "b": (5, 4, 4, 5)}),
            [StudyCorrelation("s1", "a", "b", 0.37, 100)],
            variables,
        )
        pos = build_class_distribution(ev, POS)
        neg = build_class_distribution(ev, NEG)
        assert pos.sigma[0, 1] != neg.sigma[0, 1]
        r_pos = pos.sigma[0, 1] / np.sqrt(pos.sigma[0, 0] * pos.sigma[1, 1])
        r_neg = neg.sigma[0, 1] / np.sqrt(neg.sigma[0, 0] * neg.sigma[1, 1])
        assert r_pos == pytest.approx(r_neg, abs=1e-12)
        assert r_pos == pytest.approx(0.37, abs=1e-12)


def test_evidence_file_round_trip(tmp_path):
    moments = tmp_path / "moments.csv"
    moments.write_text(
        "study_id,variable,group,mean,sd,n_total,note\n"
        "s1,ybocs,responder,25.38,5.60,39,\n"
        "s1,ybocs,non_responder,24.96,5.82,39,\n"
        "s2,ybocs,responder,20.0,5.0,61,BDI treated as BDI-II\n",
        encoding="utf-8",
    )
    correlations = tmp_path / "correlations.csv"
    correlations.write_text(
        "study_id,var_a,var_b,r,n_total\n", encoding="utf-8"
    )
    ev = load_evidence(moments, correlations, groups=(POS, NEG))
    assert ev.variables == ["ybocs"]
    assert len(ev.moments) == 3
    assert ev.moments[2].note == "BDI treated as BDI-II"
    pm = pool_moments(ev, "ybocs", POS)
    assert pm.mean == pytest.approx((25.38 * 39 + 20.0 * 61) / 100)


def test_duplicate_moment_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        make_evidence(
            [
                StudyMoment("s1", "a", POS, 0, 1, 10),
                StudyMoment("s1", "a", POS, 1, 1, 10),
            ]
        )


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        StudyMoment("s1", "a", POS, 0, sd=-1, n_total=10)
    with pytest.raises(ValueError):
        StudyMoment("s1", "a", POS, 0, sd=1, n_total=0)
    with pytest.raises(ValueError):
        StudyCorrelation("s1", "a", "b", r=1.2, n_total=10)
    with pytest.raises(ValueError):
        StudyCorrelation("s1", "a", "a", r=0.5, n_total=10)
