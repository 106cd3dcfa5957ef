"""The end-to-end pipeline on a synthetic feature table, via the CLI.

Writes a schema-complete feature CSV and a config file, runs
``langprofile analyze``, and renders the resulting reports.  Rerunning
``analyze`` with the same config and input produces byte-identical
output files.

Run:  python demos/06_full_pipeline.py
"""

import io
import json
import sys
import tempfile
from pathlib import Path

from langprofile import cli, pipeline
from langprofile.synthetic import feature_table

CONFIG = """\
[input]
mode = csv
path = {csv}

[prune]
threshold = 0.95

[clustering]
seed = 42
k_range = 2..8
n_init = 16
boundary_percentile = 5.0
pc_dims = 3

[output]
dir = {out}
"""


def main():
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        matrix, groups = feature_table(300, seed=9)
        n = matrix.n
        cohort = pipeline.Cohort(matrix, ("demo",) * n, tuple(groups),
                                 (None,) * n, ("",) * n)
        csv_path = base / "features.csv"
        csv_path.write_text(pipeline.render_feature_csv(cohort))

        cfg = base / "analysis.ini"
        out = base / "reports"
        cfg.write_text(CONFIG.format(csv=csv_path, out=out))

        code = cli.main(["analyze", "--config", str(cfg)])
        print(f"analyze exit code: {code}")
        print()

        cluster = json.loads((out / "cluster_report.json").read_text())
        pca = json.loads((out / "pca_report.json").read_text())
        boundary = json.loads((out / "boundary_report.json").read_text())

        print(f"chosen k = {cluster['chosen_k']}")
        print(f"kaiser components: {pca['kaiser_count']}, "
              f"elbow: {pca['elbow_count']}")
        top3 = pca["components"][:3]
        print("leading components: "
              + ", ".join(f"{c['component']} {c['variance_pct']:.1f}%"
                          for c in top3))
        for c in cluster["clusters"]:
            print(f"cluster {c['cluster']}: n={c['size']}, "
                  f"pc1 mean {c['pc1_mean']:+.2f}, y_ratio {c['y_ratio']:.3f}")
        print(f"boundary: {boundary['n_flagged']} cases "
              f"({100 * boundary['flagged_fraction']:.1f}%), "
              f"outcome ratio {boundary['outcome_ratio']:.3f}")
        print()

        print("rendered report (excerpt):")
        buffer = io.StringIO()
        stdout, sys.stdout = sys.stdout, buffer
        try:
            cli.main(["report", str(out / "cluster_report.json")])
        finally:
            sys.stdout = stdout
        lines = buffer.getvalue().splitlines()
        for line in lines[:18]:
            print("  " + line)


if __name__ == "__main__":
    main()
