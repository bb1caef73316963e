"""The full experiment through the library API.

Generates the desk-scale fixture, runs a reduced Monte Carlo
cross-validation over the standard forest and two hybrid variants, prints
the summary table, and compares the best pretrained approach against the
standard forest with the corrected resampled t-test.

The command-line equivalent is:

    litforest make-fixture --seed 0 --out fixture/
    litforest run --config fixture/config.txt
"""

import tempfile
from pathlib import Path

from litforest import compare_best, load_evidence, mccv_run
from litforest.cli import build_run_config, parse_config
from litforest.evaluation import summary_rows
from litforest.fixtures import make_fixture
from litforest.preprocess import load_dataset, load_schema

out_dir = Path(tempfile.mkdtemp(prefix="litforest_demo_"))
paths = make_fixture(seed=0, out_dir=out_dir)
print(f"fixture in {out_dir}")

cfg = parse_config(paths["config"])
config = build_run_config(cfg)
# trim the bundled desk configuration further so the demo finishes quickly
config.iterations = 4
config.approaches = config.approaches[:1] + config.approaches[2:3] + config.approaches[5:6]

schema = load_schema(cfg.schema)
dataset = load_dataset(cfg.dataset, schema)
evidence = load_evidence(cfg.moments, cfg.correlations, groups=("responder", "non_responder"))

print(f"running {config.iterations} iterations over {len(config.approaches)} approaches...")
report = mccv_run(config, evidence, dataset)

print(f"\n{'approach':45s} {'bal.acc':>8s} {'sd':>6s} {'auc':>6s} {'sens':>6s} {'spec':>6s}")
for row in summary_rows(report):
    print(
        f"{row['approach']:45s} {row['balanced_accuracy_mean']:8.3f} "
        f"{row['balanced_accuracy_sd']:6.3f} {row['auc_mean']:6.3f} "
        f"{row['sensitivity_mean']:6.3f} {row['specificity_mean']:6.3f}"
    )

comparison = compare_best(report, baseline_approach="standard")
print(
    f"\nbest pretrained approach: {comparison.approach_a}"
    f"\nmean difference {comparison.mean_diff:+.3f}, "
    f"t({comparison.df}) = {comparison.t_stat:.2f}, one-sided p = {comparison.p_one_sided:.3f}"
)
