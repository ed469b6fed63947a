"""Benchmark dataset conversion into the graph interchange layout."""

from .catalog import CATALOG, PublishedStats, lookup
from .convert import (ConversionReport, CountMismatch, EdgeStats, IngestError,
                      RawDataset, convert_raw, normalize_edge_entries)
from .upstream import UpstreamUnavailable, load_upstream
from .verify import VerificationReport, verify_directory

__all__ = [
    "CATALOG", "PublishedStats", "lookup",
    "ConversionReport", "CountMismatch", "EdgeStats", "IngestError",
    "RawDataset", "convert_raw", "normalize_edge_entries",
    "UpstreamUnavailable", "load_upstream",
    "VerificationReport", "verify_directory",
]
