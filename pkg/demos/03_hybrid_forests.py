"""Hybrid forests: mixing simulation-pretrained and fine-tuned trees.

Builds a scenario where the real training data is small and imbalanced
while the simulated cohort comes from the true generating distributions,
then sweeps the pretraining weight to show how the averaged ensemble
shifts between the two sources of information.
"""

import numpy as np

from litforest import (
    ClassDistribution,
    ForestParams,
    balanced_accuracy,
    classify,
    fit_forest,
    fit_hybrid,
    predict_proba,
    simulate_cohort,
    split_tree_counts,
)

rng = np.random.default_rng(3)
mu_pos, mu_neg = np.full(3, 1.3), np.zeros(3)

# small, 85/15-imbalanced real training data
n_train, prevalence = 60, 0.85
cls = (rng.random(n_train) < prevalence).astype(int)
X_train = rng.standard_normal((n_train, 3)) + np.where(cls[:, None] == 1, mu_pos, mu_neg)

# a large balanced cohort simulated from the truth
pos = ClassDistribution(group="pos", variables=["a", "b", "c"], mu=mu_pos, sigma=np.eye(3))
neg = ClassDistribution(group="neg", variables=["a", "b", "c"], mu=mu_neg, sigma=np.eye(3))
cohort = simulate_cohort(pos, neg, n_per_class=500, rng=rng)

# a big test set for stable estimates
n_test = 4000
y_test = (rng.random(n_test) < 0.5).astype(int)
X_test = rng.standard_normal((n_test, 3)) + np.where(y_test[:, None] == 1, mu_pos, mu_neg)

params = ForestParams(max_features="sqrt", min_samples_leaf=3, max_samples_fraction=0.8)
total = 200

print(f"{'weight':>8s} {'pre/fine':>10s} {'bal. accuracy':>14s}")
standard = fit_forest(X_train, cls, params, seed=9, n_trees=total)
bal = balanced_accuracy(y_test, classify(standard, X_test))
print(f"{'0 (std)':>8s} {'0/200':>10s} {bal:14.3f}")

for weight in (0.2, 0.5, 1.0):
    n_pre, n_fine = split_tree_counts(total, weight)
    hybrid = fit_hybrid(
        cohort.features, cohort.labels, X_train, cls, weight, params, params, total, seed=9
    )
    bal = balanced_accuracy(y_test, classify(hybrid, X_test))
    print(f"{weight:8.1f} {f'{n_pre}/{n_fine}':>10s} {bal:14.3f}")

# the final probability is the plain average over all trees, so the two
# portions contribute exactly in proportion to their tree counts
hybrid = fit_hybrid(cohort.features, cohort.labels, X_train, cls, 0.5, params, params, total, seed=9)
row = min(X_test, key=lambda r: predict_proba(hybrid, r))  # a row the portions argue over
p_pre = np.mean([t.predict(row[None, :])[0] for t, prov in hybrid.trees if prov == "pretrained"])
p_fine = np.mean([t.predict(row[None, :])[0] for t, prov in hybrid.trees if prov == "fine_tuned"])
n_pre, n_fine = hybrid.n_pretrained, hybrid.n_fine_tuned
combined = (n_pre * p_pre + n_fine * p_fine) / total
print(
    f"\none row: pretrained mean {p_pre:.3f}, fine-tuned mean {p_fine:.3f}, "
    f"ensemble {predict_proba(hybrid, row):.3f} (= weighted average {combined:.3f})"
)

# weight 0 degenerates to the standard forest, bit for bit
zero = fit_hybrid(cohort.features, cohort.labels, X_train, cls, 0.0, params, params, total, seed=9)
same = np.array_equal(predict_proba(zero, X_test), predict_proba(standard, X_test))
print(f"weight-0 hybrid identical to the standard forest: {same}")
