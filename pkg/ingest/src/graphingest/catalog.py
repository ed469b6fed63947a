"""Published reference statistics for the eight benchmark datasets.

Node, feature, and class counts must be reproduced exactly by a conversion;
edge counts are reported under both conventions (see ``convert``) because the
upstream distributions disagree on whether an undirected edge is stored once
or twice.  Homophily and average degree are checked with tolerances at
verification time.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PublishedStats:
    key: str                 # catalog key, lowercase
    display: str             # name as usually printed
    nodes: int
    directed_edges: int      # directed entry count in the upstream distribution
    features: int
    classes: int
    avg_degree: float        # directed entries / nodes
    edge_homophily: float    # fraction of edges joining same-label endpoints
    train_count: int         # published training-set size
    upstream: str            # upstream collection the loader pulls from
    canonical_split: bool    # emit splits.json from the upstream masks


CATALOG: dict[str, PublishedStats] = {s.key: s for s in (
    PublishedStats("cora", "Cora", 2708, 10556, 1433, 7,
                   3.90, 0.81, 140, "planetoid", True),
    PublishedStats("citeseer", "Citeseer", 3327, 9104, 3703, 6,
                   2.74, 0.74, 1694, "planetoid", True),
    PublishedStats("pubmed", "Pubmed", 19717, 88648, 500, 3,
                   4.50, 0.80, 60, "planetoid", True),
    PublishedStats("coauthor_cs", "Coauthor CS", 18333, 163788, 6805, 15,
                   8.93, 0.81, 9194, "coauthor", False),
    PublishedStats("amazon_photos", "Amazon Photos", 7650, 238162, 745, 8,
                   31.13, 0.83, 3844, "amazon", False),
    PublishedStats("actor", "Actor", 7600, 30019, 932, 5,
                   3.95, 0.22, 3804, "actor", False),
    PublishedStats("cornell", "Cornell", 183, 280, 1703, 5,
                   1.53, 0.31, 87, "webkb", False),
    PublishedStats("wisconsin", "Wisconsin", 251, 515, 1703, 5,
                   2.05, 0.20, 126, "webkb", False),
)}


def lookup(name: str) -> PublishedStats | None:
    """Find catalog stats by a forgiving name match (case, spaces, hyphens)."""
    key = name.strip().lower().replace("-", "_").replace(" ", "_")
    return CATALOG.get(key)
