"""Command line workflows and exit-code conventions."""
import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nettransfer import load_indices, load_matrix, save_matrix
from nettransfer.cli import main

CONFIG = """\
[experiment]
n = 60
n_observed = 20
trials = 2
seed = 3
estimators = rowwise, block:exact, oracle:0.1

[source]
family = sbm
k = 3
diag = 0.8
offdiag = 0.2

[target]
family = sbm
k = 3
diag = 0.9
offdiag = 0.1
"""


@pytest.fixture()
def instance_dir(tmp_path):
    config = tmp_path / "pair.cfg"
    config.write_text(CONFIG)
    out = tmp_path / "inst"
    assert main(["generate", "--config", str(config), "--seed", "5", "--out-dir", str(out)]) == 0
    return out


def test_generate_writes_consistent_instance(instance_dir):
    p = load_matrix(instance_dir / "source_prob.csv")
    q = load_matrix(instance_dir / "target_prob.csv")
    a_p = load_matrix(instance_dir / "source_adj.csv")
    a_q = load_matrix(instance_dir / "target_adj.csv")
    subset = load_indices(instance_dir / "subset.csv")
    assert p.shape == q.shape == a_p.shape == (60, 60)
    assert a_q.shape == (20, 20)
    assert subset.size == 20
    assert set(np.unique(a_p)) <= {0.0, 1.0}
    assert np.all(np.diff(subset) > 0)


def test_generate_deterministic_bytes(tmp_path):
    config = tmp_path / "pair.cfg"
    config.write_text(CONFIG)
    for name in ("one", "two"):
        assert main(["generate", "--config", str(config), "--seed", "9", "--out-dir", str(tmp_path / name)]) == 0
    for fname in ("source_prob.csv", "source_adj.csv", "target_adj.csv", "subset.csv"):
        assert (tmp_path / "one" / fname).read_bytes() == (tmp_path / "two" / fname).read_bytes()


def test_estimate_rowwise_from_files(instance_dir, tmp_path):
    out = tmp_path / "qhat.csv"
    code = main(
        [
            "estimate",
            "--source-adj", str(instance_dir / "source_adj.csv"),
            "--target-adj", str(instance_dir / "target_adj.csv"),
            "--subset", str(instance_dir / "subset.csv"),
            "--method", "rowwise",
            "--h", "auto",
            "--out", str(out),
        ]
    )
    assert code == 0
    qhat = load_matrix(out)
    assert qhat.shape == (60, 60)
    assert qhat.min() >= 0.0 and qhat.max() <= 1.0
    np.testing.assert_allclose(qhat, qhat.T, atol=1e-6)

    again = tmp_path / "qhat2.csv"
    main(
        [
            "estimate",
            "--source-adj", str(instance_dir / "source_adj.csv"),
            "--target-adj", str(instance_dir / "target_adj.csv"),
            "--subset", str(instance_dir / "subset.csv"),
            "--method", "rowwise",
            "--h", "auto",
            "--out", str(again),
        ]
    )
    assert out.read_bytes() == again.read_bytes()


def test_estimate_block_and_oracle_methods(instance_dir, tmp_path):
    block_out = tmp_path / "block.csv"
    code = main(
        [
            "estimate",
            "--source-adj", str(instance_dir / "source_adj.csv"),
            "--target-adj", str(instance_dir / "target_adj.csv"),
            "--subset", str(instance_dir / "subset.csv"),
            "--method", "block",
            "--k-source", "3",
            "--k-target", "3",
            "--out", str(block_out),
        ]
    )
    assert code == 0
    assert load_matrix(block_out).shape == (60, 60)

    oracle_out = tmp_path / "oracle.csv"
    code = main(
        [
            "estimate",
            "--source-adj", str(instance_dir / "source_adj.csv"),
            "--target-adj", str(instance_dir / "target_adj.csv"),
            "--subset", str(instance_dir / "subset.csv"),
            "--method", "oracle",
            "--truth", str(instance_dir / "target_prob.csv"),
            "--p-flip", "0.2",
            "--out", str(oracle_out),
        ]
    )
    assert code == 0
    assert load_matrix(oracle_out).shape == (60, 60)


def test_estimate_oracle_requires_truth(instance_dir, tmp_path, capsys):
    code = main(
        [
            "estimate",
            "--source-adj", str(instance_dir / "source_adj.csv"),
            "--target-adj", str(instance_dir / "target_adj.csv"),
            "--subset", str(instance_dir / "subset.csv"),
            "--method", "oracle",
            "--out", str(tmp_path / "x.csv"),
        ]
    )
    assert code == 2
    assert "truth" in capsys.readouterr().err


def test_experiment_writes_summary_files(tmp_path):
    config = tmp_path / "pair.cfg"
    config.write_text(CONFIG)
    prefix = tmp_path / "run"
    assert main(["experiment", "--config", str(config), "--out-prefix", str(prefix)]) == 0

    with open(f"{prefix}.csv", newline="") as fh:
        rows = {row["estimator"]: row for row in csv.DictReader(fh)}
    assert set(rows) == {"rowwise", "block:exact", "oracle:0.1"}
    assert all(int(row["trials"]) == 2 for row in rows.values())

    payload = json.loads(open(f"{prefix}.json").read())
    assert payload["rowwise"]["base_seed"] == 3
    assert len(payload["oracle:0.1"]["mses"]) == 2


def test_experiment_cli_overrides(tmp_path):
    config = tmp_path / "pair.cfg"
    config.write_text(CONFIG)
    prefix = tmp_path / "short"
    code = main(
        ["experiment", "--config", str(config), "--trials", "1", "--seed", "7",
         "--out-prefix", str(prefix)]
    )
    assert code == 0
    payload = json.loads(open(f"{prefix}.json").read())
    assert payload["rowwise"]["trials"] == 1
    assert payload["rowwise"]["base_seed"] == 7


def test_ingest_edge_lists_with_intersection(tmp_path):
    (tmp_path / "g1.txt").write_text("a b\nb c\nc d\n")
    (tmp_path / "g2.txt").write_text("b c\nc e\n")
    out = tmp_path / "graphs"
    code = main(
        [
            "ingest",
            "--edge-list", str(tmp_path / "g1.txt"),
            "--edge-list", str(tmp_path / "g2.txt"),
            "--intersect",
            "--out-dir", str(out),
        ]
    )
    assert code == 0
    a1 = load_matrix(out / "g1_adj.csv")
    a2 = load_matrix(out / "g2_adj.csv")
    assert a1.shape == a2.shape == (2, 2)  # common nodes are b, c
    assert (out / "g1_labels.txt").read_text() == "b\nc\n"


def test_ingest_temporal_bins(tmp_path):
    lines = [f"u{i % 7} u{(i + 1) % 7} {float(i)}" for i in range(40)]
    (tmp_path / "log.txt").write_text("\n".join(lines) + "\n")
    out = tmp_path / "bins"
    code = main(
        ["ingest", "--temporal", str(tmp_path / "log.txt"), "--bins", "4", "--out-dir", str(out)]
    )
    assert code == 0
    mats = sorted(out.glob("bin_*_adj.csv"))
    assert len(mats) == 4
    shapes = {load_matrix(m).shape for m in mats}
    assert shapes == {(7, 7)}


def test_ingest_requires_exactly_one_mode(tmp_path, capsys):
    assert main(["ingest", "--out-dir", str(tmp_path / "x")]) == 2
    (tmp_path / "e.txt").write_text("a b\n")
    (tmp_path / "t.txt").write_text("a b 0\n")
    code = main(
        [
            "ingest",
            "--edge-list", str(tmp_path / "e.txt"),
            "--temporal", str(tmp_path / "t.txt"),
            "--out-dir", str(tmp_path / "y"),
        ]
    )
    assert code == 2
    capsys.readouterr()


def test_check_rankings_reports_constant(tmp_path, capsys):
    m = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    src = tmp_path / "p.csv"
    save_matrix(src, m)
    code = main(["check-rankings", "--source", str(src), "--target", str(src), "--h", "0.5"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["c_hat"] == 1.0
    assert report["h"] == 0.5
    assert report["witness"] is None

    out = tmp_path / "report.json"
    code = main(
        ["check-rankings", "--source", str(src), "--target", str(src), "--h", "0.5",
         "--grid", "1,2", "--out", str(out)]
    )
    assert code == 0
    saved = json.loads(out.read_text())
    assert saved["grid"] == [1.0, 2.0]


def test_heatmap_exports_pair(instance_dir, tmp_path):
    prefix = tmp_path / "fig"
    code = main(
        [
            "heatmap",
            "--truth", str(instance_dir / "target_prob.csv"),
            "--estimate", str(instance_dir / "target_prob.csv"),
            "--out-prefix", str(prefix),
        ]
    )
    assert code == 0
    truth = load_matrix(f"{prefix}_truth.csv")
    estimate = load_matrix(f"{prefix}_estimate.csv")
    np.testing.assert_array_equal(truth, estimate)


# ---------------------------------------------------------------------------
# exit codes


def test_usage_errors_exit_one(capsys):
    assert main([]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["estimate", "--bogus-flag"]) == 1
    capsys.readouterr()


def test_data_errors_exit_two(tmp_path, capsys):
    missing = str(tmp_path / "nope.csv")
    code = main(
        ["estimate", "--source-adj", missing, "--target-adj", missing,
         "--subset", missing, "--out", str(tmp_path / "o.csv")]
    )
    assert code == 2

    # a probability matrix is not a valid adjacency input
    bad = tmp_path / "prob.csv"
    save_matrix(bad, np.full((4, 4), 0.5))
    code = main(
        ["estimate", "--source-adj", str(bad), "--target-adj", str(bad),
         "--subset", str(bad), "--out", str(tmp_path / "o.csv")]
    )
    assert code == 2

    broken_cfg = tmp_path / "broken.cfg"
    broken_cfg.write_text("[experiment]\nn = 10\n")
    assert main(["experiment", "--config", str(broken_cfg), "--out-prefix", str(tmp_path / "r")]) == 2
    assert main(["generate", "--config", str(tmp_path / "ghost.cfg"), "--out-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "nettransfer:" in err


def test_module_entry_point_runs(tmp_path):
    config = tmp_path / "pair.cfg"
    config.write_text(CONFIG)
    result = subprocess.run(
        [sys.executable, "-m", "nettransfer.cli", "generate", "--config", str(config),
         "--seed", "1", "--out-dir", str(tmp_path / "out")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert (tmp_path / "out" / "subset.csv").exists()
