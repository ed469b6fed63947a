import csv
import json

import numpy as np
import pytest

from convgeom.cli import main
from convgeom.datasets import (DatasetBundle, SyntheticConfig,
                               generate_hub_periphery, random_split,
                               save_dataset)


@pytest.fixture(scope="module")
def tiny_dataset(tmp_path_factory):
    cfg = SyntheticConfig(num_hubs=2, hub_size=5, periphery_size=3,
                          noise_mode="uniform", seed=0)
    bundle = generate_hub_periphery(cfg)
    bundle = bundle.with_split(random_split(bundle.graph.num_nodes, 8, seed=1))
    path = tmp_path_factory.mktemp("data") / "tiny"
    save_dataset(bundle, path)
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSweep:
    def test_row_count_and_grid(self, tiny_dataset, tmp_path):
        out = tmp_path / "sweep"
        code = main(["sweep", "--dataset", tiny_dataset,
                     "--alpha", "0.0,0.5", "--beta", "1.0",
                     "--trials", "2", "--epochs", "5", "--out", str(out)])
        assert code == 0
        rows = read_rows(out / "results.csv")
        # families x alphas x betas x trials
        assert len(rows) == 2 * 2 * 1 * 2
        assert {r["alpha"] for r in rows} == {"0.0", "0.5"}
        assert all(0.0 <= float(r["accuracy"]) <= 1.0 for r in rows)

    def test_reruns_byte_identical(self, tiny_dataset, tmp_path):
        args = ["sweep", "--dataset", tiny_dataset, "--alpha", "0.5",
                "--beta", "1.0", "--trials", "2", "--epochs", "4",
                "--seed", "7"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()

    def test_missing_dataset_exit_code(self, tmp_path):
        code = main(["sweep", "--dataset", str(tmp_path / "absent"),
                     "--alpha", "0.5", "--beta", "1.0", "--trials", "1",
                     "--out", str(tmp_path / "o")])
        assert code == 2


class TestSynthetic:
    def test_summary_fields(self, tmp_path):
        out = tmp_path / "synth"
        code = main(["synthetic", "--scenario", "degree_increasing",
                     "--alpha", "0.2,0.7", "--trials", "1", "--epochs", "2",
                     "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["scenario"] == "degree_increasing"
        assert set(summary["per_family"]) == {"symmetric", "row_normalized"}
        for fam in summary["per_family"].values():
            assert set(fam["mean_by_alpha"]) == {"0.2", "0.7"}
        assert (out / "accuracy_vs_alpha.svg").exists()

    def test_bad_scenario_rejected(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["synthetic", "--scenario", "nope", "--trials", "1",
                  "--out", str(tmp_path / "x")])


class TestStructural:
    def test_outputs(self, tmp_path):
        out = tmp_path / "struct"
        code = main(["structural", "--alpha", "0.5", "--trials", "2",
                     "--sigma", "0.5", "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert all(c["violations"] == 0 for c in summary["bound_checks"])
        rows = read_rows(out / "results.csv")
        assert len(rows) > 0
        assert {"family", "alpha", "degree_class", "mean_distance"} <= set(rows[0])


class TestGeometry:
    def test_report_written(self, tiny_dataset, tmp_path):
        out = tmp_path / "geom"
        code = main(["geometry", "--dataset", tiny_dataset, "--epochs", "5",
                     "--gw-subsample", "25", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert "gw_graph_embedding" in report["diagnostics"]
        assert "curvature_sd" in report
        svgs = list(out.glob("*.svg"))
        assert svgs, "geometry should emit at least one scatter"


class TestBounds:
    def test_clean_run_exit_zero(self, tmp_path):
        code = main(["bounds", "--graphs", "4", "--max-nodes", "10",
                     "--draws", "150", "--templates", "1",
                     "--out", str(tmp_path / "b")])
        assert code == 0
        report = json.loads((tmp_path / "b" / "report.json").read_text())
        assert report["total_violations"] == 0

    def test_corrupted_bound_detected(self, tmp_path, capsys):
        code = main(["bounds", "--graphs", "4", "--max-nodes", "10",
                     "--draws", "150", "--templates", "1",
                     "--corrupt-bound", "0.2",
                     "--out", str(tmp_path / "c")])
        assert code == 3
        assert "violations" in capsys.readouterr().err

    def test_invalid_alpha_exit_two(self, tmp_path):
        code = main(["bounds", "--graphs", "2", "--max-nodes", "8",
                     "--alpha", "1.5", "--out", str(tmp_path / "d")])
        assert code == 2
