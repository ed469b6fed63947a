import json

import pytest

from conftest import TINY_HOMOPHILY
from graphingest.verify import verify_directory
from test_convert import expected_for_tiny


def tamper(directory, filename, transform):
    path = directory / filename
    path.write_text(transform(path.read_text()))


class TestStructure:
    def test_clean_roundtrip(self, converted_dir):
        report = verify_directory(converted_dir)
        assert report.ok
        assert report.undirected_edges == 7
        assert report.upstream_directed == 8
        assert report.edge_homophily == pytest.approx(TINY_HOMOPHILY)
        assert report.avg_degree == pytest.approx(8 / 6)
        assert "PASS" in report.to_text()

    def test_missing_directory_contents(self, tmp_path):
        report = verify_directory(tmp_path)
        assert not report.ok
        assert any("manifest.json" in e for e in report.structural_errors)

    def test_reversed_edge_line(self, converted_dir):
        tamper(converted_dir, "edges.tsv",
               lambda t: t.replace("0\t1", "1\t0", 1))
        report = verify_directory(converted_dir)
        assert not report.ok
        assert any("canonical" in e for e in report.structural_errors)

    def test_duplicate_edge_line(self, converted_dir):
        tamper(converted_dir, "edges.tsv",
               lambda t: "0\t1\n" + t)
        report = verify_directory(converted_dir)
        assert any("duplicate or out-of-order" in e
                   for e in report.structural_errors)

    def test_out_of_order_edges(self, converted_dir):
        tamper(converted_dir, "edges.tsv",
               lambda t: t + "0\t3\n")
        report = verify_directory(converted_dir)
        assert any("duplicate or out-of-order" in e
                   for e in report.structural_errors)

    def test_edge_endpoint_out_of_range(self, converted_dir):
        tamper(converted_dir, "edges.tsv", lambda t: t + "4\t9\n")
        report = verify_directory(converted_dir)
        assert any("out of range" in e for e in report.structural_errors)

    def test_label_out_of_range(self, converted_dir):
        tamper(converted_dir, "labels.tsv",
               lambda t: t.replace("5\t1", "5\t4"))
        report = verify_directory(converted_dir)
        assert any("label 4 out of range" in e
                   for e in report.structural_errors)

    def test_missing_label_row(self, converted_dir):
        tamper(converted_dir, "labels.tsv",
               lambda t: "\n".join(t.splitlines()[:-1]) + "\n")
        report = verify_directory(converted_dir)
        assert any("without a label" in e for e in report.structural_errors)

    def test_feature_column_mismatch(self, converted_dir):
        tamper(converted_dir, "features.csv",
               lambda t: t.replace("\n", ",9.9\n", 1))
        report = verify_directory(converted_dir)
        assert any("columns" in e for e in report.structural_errors)

    def test_feature_row_count(self, converted_dir):
        tamper(converted_dir, "features.csv",
               lambda t: t + "0.0,0.0,0.0,0.0\n")
        report = verify_directory(converted_dir)
        assert any("rows" in e for e in report.structural_errors)

    def test_split_overlap(self, converted_dir):
        splits = json.loads((converted_dir / "splits.json").read_text())
        splits["test"] = [0, 5]
        (converted_dir / "splits.json").write_text(json.dumps(splits))
        report = verify_directory(converted_dir)
        assert any("overlap" in e for e in report.structural_errors)

    def test_provenance_edge_count_mismatch(self, converted_dir):
        manifest = json.loads((converted_dir / "manifest.json").read_text())
        manifest["provenance"]["undirected_edges"] = 11
        (converted_dir / "manifest.json").write_text(json.dumps(manifest))
        report = verify_directory(converted_dir)
        assert any("provenance recorded" in e
                   for e in report.structural_errors)

    def test_no_provenance_falls_back_to_symmetrized(self, converted_dir):
        manifest = json.loads((converted_dir / "manifest.json").read_text())
        del manifest["provenance"]
        (converted_dir / "manifest.json").write_text(json.dumps(manifest))
        report = verify_directory(converted_dir)
        assert report.ok
        assert report.upstream_directed is None
        assert report.avg_degree == pytest.approx(14 / 6)


class TestPublishedComparison:
    def test_matching_stats_pass(self, converted_dir):
        expected = expected_for_tiny(directed_edges=8, avg_degree=8 / 6)
        report = verify_directory(converted_dir, expected=expected)
        assert report.ok
        assert report.stat_errors == []

    def test_node_count_mismatch(self, converted_dir):
        expected = expected_for_tiny(nodes=7, directed_edges=8,
                                     avg_degree=8 / 6)
        report = verify_directory(converted_dir, expected=expected)
        assert any("nodes" in e for e in report.stat_errors)

    def test_homophily_outside_tolerance(self, converted_dir):
        expected = expected_for_tiny(directed_edges=8, avg_degree=8 / 6,
                                     edge_homophily=0.80)
        report = verify_directory(converted_dir, expected=expected)
        assert any("homophily" in e for e in report.stat_errors)

    def test_homophily_within_tolerance(self, converted_dir):
        expected = expected_for_tiny(directed_edges=8, avg_degree=8 / 6,
                                     edge_homophily=TINY_HOMOPHILY + 0.015)
        report = verify_directory(converted_dir, expected=expected)
        assert report.ok

    def test_avg_degree_outside_tolerance(self, converted_dir):
        expected = expected_for_tiny(directed_edges=8, avg_degree=2.0)
        report = verify_directory(converted_dir, expected=expected)
        assert any("avg degree" in e for e in report.stat_errors)

    def test_structural_failure_skips_stats(self, converted_dir):
        tamper(converted_dir, "edges.tsv", lambda t: t.replace("0\t1", "1\t0"))
        expected = expected_for_tiny(nodes=99)
        report = verify_directory(converted_dir, expected=expected)
        assert report.structural_errors
        assert report.stat_errors == []

    def test_report_text_shows_mismatches(self, converted_dir):
        expected = expected_for_tiny(nodes=7, directed_edges=8,
                                     avg_degree=8 / 6)
        text = verify_directory(converted_dir, expected=expected).to_text()
        assert "MISMATCH" in text
        assert "FAIL" in text
