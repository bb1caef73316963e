import numpy as np
import pytest

from litforest.cohort import (
    cholesky_lower,
    extend_all_features,
    nearest_psd,
    sample_mvnd,
    save_cohort,
    simulate_cohort,
)
from litforest.errors import (
    InsufficientData,
    NotPositiveSemidefinite,
    SchemaMismatch,
    ShapeError,
)
from litforest.evidence import ClassDistribution


def dist(mu, sigma, variables=None, group="pos"):
    mu = np.asarray(mu, dtype=float)
    if variables is None:
        variables = [f"v{i}" for i in range(len(mu))]
    return ClassDistribution(group=group, variables=list(variables), mu=mu, sigma=np.asarray(sigma, dtype=float))


class TestNearestPsd:
    def test_identity_unchanged(self):
        assert np.array_equal(nearest_psd(np.eye(3)), np.eye(3))

    def test_positive_diagonal_unchanged(self):
        d = np.diag([4.0, 0.5, 2.0])
        assert np.array_equal(nearest_psd(d), d)

    def test_indefinite_two_by_two(self):
        # eigenvalues of [[1,2],[2,1]] are 3 and -1 in the (1,1)/(1,-1) basis
        repaired = nearest_psd(np.array([[1.0, 2.0], [2.0, 1.0]]), eps=1e-9)
        eigval, eigvec = np.linalg.eigh(repaired)
        assert eigval == pytest.approx([1e-9, 3.0], abs=1e-12)
        v = eigvec[:, 1]
        assert abs(v[0]) == pytest.approx(abs(v[1]), abs=1e-12)

    def test_non_symmetric_raises(self):
        with pytest.raises(ShapeError):
            nearest_psd(np.array([[1.0, 0.5], [0.0, 1.0]]))
        with pytest.raises(ShapeError):
            nearest_psd(np.ones((2, 3)))

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.normal(size=(5, 5))
            sym = (a + a.T) / 2
            once = nearest_psd(sym)
            twice = nearest_psd(once)
            assert np.max(np.abs(twice - once)) <= 1e-12


class TestCholeskyLower:
    def test_identity(self):
        assert np.array_equal(cholesky_lower(np.eye(4)), np.eye(4))

    def test_known_factor(self):
        L = cholesky_lower(np.array([[4.0, 2.0], [2.0, 3.0]]))
        assert L == pytest.approx(np.array([[2.0, 0.0], [1.0, np.sqrt(2.0)]]))

    def test_reconstruction_tolerance(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=(6, 6))
            sigma = a @ a.T
            L = cholesky_lower(sigma)
            assert np.tril(L) == pytest.approx(L)
            err = np.max(np.abs(L @ L.T - sigma))
            assert err <= 1e-9 * max(1.0, np.max(np.abs(sigma)))

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveSemidefinite):
            cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_semidefinite_zero_matrix(self):
        assert np.array_equal(cholesky_lower(np.zeros((3, 3))), np.zeros((3, 3)))


class TestSampleMvnd:
    def test_degenerate_distribution_hits_mean_exactly(self):
        d = dist([3.0, 7.0], np.zeros((2, 2)))
        rows = sample_mvnd(d, 50, np.random.default_rng(0))
        assert np.array_equal(rows, np.tile([3.0, 7.0], (50, 1)))

    def test_deterministic_for_fixed_seed(self):
        d = dist([0.0, 1.0], [[2.0, 0.3], [0.3, 1.0]])
        a = sample_mvnd(d, 100, np.random.default_rng(42))
        b = sample_mvnd(d, 100, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_covariance_recovery(self):
        # oracle: empirical covariance of 200k draws, ~5 standard errors
        sigma = np.array([[9.33**2, 26.124], [26.124, 5.60**2]])
        d = dist([16.8, 25.38], sigma)
        rows = sample_mvnd(d, 200_000, np.random.default_rng(11))
        emp = np.cov(rows, rowvar=False)
        assert emp[0, 1] == pytest.approx(26.124, abs=0.5)

    def test_moment_recovery_five_standard_errors(self):
        n = 100_000
        sigma = np.array([[4.0, 0.8], [0.8, 1.0]])
        d = dist([5.0, -2.0], sigma)
        rows = sample_mvnd(d, n, np.random.default_rng(5))
        for j, (mean, var) in enumerate([(5.0, 4.0), (-2.0, 1.0)]):
            se_mean = np.sqrt(var / n)
            assert rows[:, j].mean() == pytest.approx(mean, abs=5 * se_mean)
            se_var = var * np.sqrt(2.0 / (n - 1))
            assert rows[:, j].var(ddof=1) == pytest.approx(var, abs=5 * se_var)

    def test_propagates_indefinite(self):
        d = dist([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NotPositiveSemidefinite):
            sample_mvnd(d, 10, np.random.default_rng(0))


class TestSimulateCohort:
    def pos_neg(self):
        pos = dist([1.0, 2.0], np.eye(2), group="pos")
        neg = dist([0.0, 0.0], np.eye(2), group="neg")
        return pos, neg

    def test_default_cohort_size(self):
        pos, neg = self.pos_neg()
        cohort = simulate_cohort(pos, neg, 500, np.random.default_rng(0))
        assert cohort.n_rows == 1000
        assert int(cohort.labels.sum()) == 500
        assert int((cohort.labels == 0).sum()) == 500

    def test_minimal_cohort(self):
        pos, neg = self.pos_neg()
        cohort = simulate_cohort(pos, neg, 1, np.random.default_rng(0))
        assert sorted(cohort.labels.tolist()) == [0, 1]

    def test_deterministic(self):
        pos, neg = self.pos_neg()
        a = simulate_cohort(pos, neg, 100, np.random.default_rng(9))
        b = simulate_cohort(pos, neg, 100, np.random.default_rng(9))
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_shuffle_only_reorders(self):
        pos, neg = self.pos_neg()
        shuffled = simulate_cohort(pos, neg, 50, np.random.default_rng(3))
        plain = simulate_cohort(pos, neg, 50, np.random.default_rng(3), shuffle=False)
        assert not np.array_equal(shuffled.labels, plain.labels)

        def multiset(cohort):
            rows = np.column_stack([cohort.features, cohort.labels])
            return sorted(map(tuple, rows.tolist()))

        assert multiset(shuffled) == multiset(plain)

    def test_variable_mismatch_raises(self):
        pos = dist([0.0], np.eye(1), variables=["a"])
        neg = dist([0.0], np.eye(1), variables=["b"])
        with pytest.raises(SchemaMismatch):
            simulate_cohort(pos, neg, 10, np.random.default_rng(0))

    def test_export_round_trip(self, tmp_path):
        pos, neg = self.pos_neg()
        cohort = simulate_cohort(pos, neg, 5, np.random.default_rng(1))
        out = tmp_path / "cohort.csv"
        save_cohort(cohort, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "v0,v1,label"
        assert len(lines) == 11
        meta = (tmp_path / "cohort.csv.meta").read_text().splitlines()
        assert meta == ["variable,provenance", "v0,literature", "v1,literature"]


class TestExtendAllFeatures:
    def test_no_extension_equals_lit_dist(self):
        lit = dist([1.0, 2.0], [[2.0, 0.5], [0.5, 1.0]], variables=["a", "b"])
        rows = np.random.default_rng(0).normal(size=(30, 2))
        out = extend_all_features(lit, rows, ["a", "b"])
        assert out.mu == pytest.approx(lit.mu)
        assert out.sigma == pytest.approx(nearest_psd(lit.sigma))

    def test_constant_extra_column(self):
        lit = dist([0.0], [[1.0]], variables=["a"])
        rng = np.random.default_rng(1)
        rows = np.column_stack([rng.normal(size=40), np.full(40, 6.25)])
        out = extend_all_features(lit, rows, ["a", "extra"])
        assert out.mu[1] == pytest.approx(6.25)
        assert abs(out.sigma[1, 1]) <= 1e-8
        assert abs(out.sigma[0, 1]) <= 1e-8

    def test_linear_extra_column_covariance(self):
        # oracle: sample covariance on the toy split, cov(x, y) = 2 var(x) for y = 2x
        lit = dist([0.0], [[1.0]], variables=["lit"])
        rng = np.random.default_rng(2)
        x = rng.normal(size=60)
        rows = np.column_stack([rng.normal(size=60), x, 2.0 * x])
        out = extend_all_features(lit, rows, ["lit", "x", "y"])
        var_x = np.var(x, ddof=1)
        assert out.sigma[1, 2] == pytest.approx(2.0 * var_x, rel=1e-9, abs=1e-8)

    def test_literature_block_preserved(self):
        # benign statistics keep the grafted matrix PSD, so the repair is a
        # no-op and the literature block must match exactly
        lit = dist([10.0, -3.0], [[4.0, 0.4], [0.4, 2.0]], variables=["a", "b"])
        rng = np.random.default_rng(3)
        rows = rng.normal(scale=[2.0, 1.4, 1.0], size=(500, 3)) + [10.0, -3.0, 0.0]
        out = extend_all_features(lit, rows, ["a", "b", "c"])
        assert np.array_equal(out.mu[:2], lit.mu)
        assert np.array_equal(out.sigma[:2, :2], lit.sigma)

    def test_insufficient_rows(self):
        lit = dist([0.0], [[1.0]], variables=["a"])
        with pytest.raises(InsufficientData):
            extend_all_features(lit, np.zeros((1, 2)), ["a", "b"])

    def test_unknown_literature_variable(self):
        lit = dist([0.0], [[1.0]], variables=["missing"])
        with pytest.raises(SchemaMismatch):
            extend_all_features(lit, np.zeros((5, 1)), ["a"])
