"""convgeom: tunable spatial graph convolutions and embedding-geometry tools."""

from .datasets import (DatasetBundle, SplitSpec, SyntheticConfig,
                       generate_hub_periphery, generate_structural_replicas,
                       load_dataset, random_split, save_dataset)
from .errors import LoadError, ValidationError
from .gcn import (GCNModel, TrainConfig, TrainResult, accuracy, forward,
                  init_model, loss_and_grads, train)
from .geometry import (BoundReport, TopologyStats, check_norm_bound,
                       convolved_norm_bound, degree_gap_leading_term,
                       m_constant, neighborhood_degree_stats,
                       noise_distance_bound, noise_distance_bounds,
                       structural_replica_distances)
from .graphs import (Graph, build_graph, edge_homophily,
                     generate_random_connected_graph, generate_random_graph,
                     is_connected, relabel_graph, shortest_path_hops)
from .metrics import (CurvatureSummary, GWConfig, GWResult, forman_curvature,
                      graph_distance_matrix, gromov_wasserstein,
                      norm_degree_profile, pairwise_euclidean, pca_project,
                      reconstruct_graph, spearman)
from .operators import (FAMILY_ROW_NORMALIZED, FAMILY_SYMMETRIC, ConvParams,
                        SparseOperator, apply, build_operator,
                        build_row_normalized, build_symmetric)

__version__ = "0.1.0"
