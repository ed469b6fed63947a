import json

import numpy as np
import pytest

from conftest import TINY_UNDIRECTED
from graphingest.catalog import PublishedStats
from graphingest.convert import (CountMismatch, IngestError, RawDataset,
                                 convert_raw, normalize_edge_entries)


def expected_for_tiny(**overrides) -> PublishedStats:
    base = dict(key="tiny", display="Tiny", nodes=6, directed_edges=14,
                features=4, classes=2, avg_degree=14 / 6,
                edge_homophily=6 / 7, train_count=2, upstream="fixture",
                canonical_split=True)
    base.update(overrides)
    return PublishedStats(**base)


class TestNormalization:
    def test_folds_to_canonical_pairs(self, tiny_raw):
        pairs, stats = normalize_edge_entries(tiny_raw.edge_entries, 6)
        assert [tuple(p) for p in pairs] == TINY_UNDIRECTED
        assert stats.raw_entries == 10
        assert stats.self_loops_removed == 1
        assert stats.duplicates_removed == 1
        assert stats.unique_directed == 8
        assert stats.undirected == 7

    def test_already_clean_passthrough(self):
        entries = np.array([(0, 1), (1, 2)])
        pairs, stats = normalize_edge_entries(entries, 3)
        assert [tuple(p) for p in pairs] == [(0, 1), (1, 2)]
        assert stats.duplicates_removed == 0
        assert stats.self_loops_removed == 0

    def test_reversed_entries_collapse(self):
        # each edge stored in both directions, the planetoid convention
        entries = np.array([(0, 1), (1, 0), (2, 1), (1, 2)])
        pairs, stats = normalize_edge_entries(entries, 3)
        assert [tuple(p) for p in pairs] == [(0, 1), (1, 2)]
        assert stats.unique_directed == 4
        assert stats.undirected == 2

    def test_empty_edges(self):
        pairs, stats = normalize_edge_entries(np.empty((0, 2), dtype=int), 3)
        assert pairs.shape == (0, 2)
        assert stats.undirected == 0

    def test_out_of_range_endpoint(self):
        with pytest.raises(IngestError, match="out of range"):
            normalize_edge_entries(np.array([(0, 5)]), 3)

    def test_bad_shape(self):
        with pytest.raises(IngestError, match="must be"):
            normalize_edge_entries(np.array([0, 1, 2]), 3)


class TestWriter:
    def test_directory_contents(self, converted_dir):
        manifest = json.loads((converted_dir / "manifest.json").read_text())
        assert manifest["name"] == "tiny"
        assert manifest["num_nodes"] == 6
        assert manifest["num_features"] == 4
        assert manifest["num_classes"] == 2
        assert manifest["provenance"]["undirected_edges"] == 7
        assert manifest["provenance"]["unique_directed_entries"] == 8
        assert manifest["provenance"]["source"] == "fixture"

        lines = (converted_dir / "edges.tsv").read_text().splitlines()
        assert lines == [f"{u}\t{v}" for u, v in TINY_UNDIRECTED]

        labels = (converted_dir / "labels.tsv").read_text().splitlines()
        assert labels[0] == "0\t0"
        assert labels[5] == "5\t1"
        assert len(labels) == 6

        rows = (converted_dir / "features.csv").read_text().splitlines()
        assert len(rows) == 6
        assert all(len(r.split(",")) == 4 for r in rows)

        splits = json.loads((converted_dir / "splits.json").read_text())
        assert splits == {"train": [0, 3], "test": [2, 5]}

    def test_byte_deterministic(self, tmp_path, tiny_raw):
        a, b = tmp_path / "a", tmp_path / "b"
        convert_raw(tiny_raw, a)
        convert_raw(tiny_raw, b)
        for name in ("manifest.json", "edges.tsv", "features.csv",
                     "labels.tsv", "splits.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_no_split_no_file(self, tmp_path, tiny_raw):
        raw = RawDataset(tiny_raw.name, tiny_raw.edge_entries,
                         tiny_raw.features, tiny_raw.labels)
        out = tmp_path / "nosplit"
        report = convert_raw(raw, out)
        assert not (out / "splits.json").exists()
        assert report.wrote_split is False

    def test_report_text_mentions_cleanup(self, tmp_path, tiny_raw):
        report = convert_raw(tiny_raw, tmp_path / "r")
        text = report.to_text()
        assert "1 self-loops" in text
        assert "1 duplicates" in text
        assert "7 undirected" in text


class TestExpectedCounts:
    def test_matching_expected_passes(self, tmp_path, tiny_raw):
        report = convert_raw(tiny_raw, tmp_path / "ok",
                             expected=expected_for_tiny())
        assert report.num_classes == 2
        # 8 unique directed entries vs published 14: reported, not fatal
        assert any("differs" in n for n in report.notes)

    def test_node_mismatch_is_fatal(self, tmp_path, tiny_raw):
        with pytest.raises(CountMismatch) as exc:
            convert_raw(tiny_raw, tmp_path / "bad",
                        expected=expected_for_tiny(nodes=7))
        assert "nodes: expected 7, got 6" in str(exc.value)

    def test_diff_lists_every_field(self, tmp_path, tiny_raw):
        with pytest.raises(CountMismatch) as exc:
            convert_raw(tiny_raw, tmp_path / "bad",
                        expected=expected_for_tiny(features=9, classes=3))
        msg = str(exc.value)
        assert "features: expected 9, got 4" in msg
        assert "classes: expected 3, got 2" in msg

    def test_edge_count_never_fatal(self, tmp_path, tiny_raw):
        report = convert_raw(tiny_raw, tmp_path / "edges",
                             expected=expected_for_tiny(directed_edges=999))
        assert any("999" in n for n in report.notes)


class TestRawValidation:
    def test_label_shape_mismatch(self, tmp_path, tiny_raw):
        raw = RawDataset("x", tiny_raw.edge_entries, tiny_raw.features,
                         np.array([0, 1]))
        with pytest.raises(IngestError, match="labels shape"):
            convert_raw(raw, tmp_path / "x")

    def test_negative_label(self, tmp_path, tiny_raw):
        labels = tiny_raw.labels.copy()
        labels[3] = -2
        raw = RawDataset("x", tiny_raw.edge_entries, tiny_raw.features, labels)
        with pytest.raises(IngestError, match="negative label"):
            convert_raw(raw, tmp_path / "x")

    def test_nonfinite_features(self, tmp_path, tiny_raw):
        features = tiny_raw.features.copy()
        features[1, 1] = np.nan
        raw = RawDataset("x", tiny_raw.edge_entries, features, tiny_raw.labels)
        with pytest.raises(IngestError, match="non-finite"):
            convert_raw(raw, tmp_path / "x")

    def test_duplicate_split_ids(self, tmp_path, tiny_raw):
        raw = RawDataset("x", tiny_raw.edge_entries, tiny_raw.features,
                         tiny_raw.labels, train_ids=np.array([0, 0]),
                         test_ids=np.array([2]))
        with pytest.raises(IngestError, match="duplicates"):
            convert_raw(raw, tmp_path / "x")
