"""Transfer estimation of edge probabilities for partially observed networks.

Given a fully observed source graph and a target graph observed only on a
node subset, the estimators here recover the full target edge-probability
matrix by exploiting latent structure the two networks share.
"""

from .distance import (
    DEFAULT_GRID,
    NeighborhoodIndex,
    RankingsReport,
    graph_distance_block,
    graph_distance_matrix,
    quantile_neighborhoods,
    rankings_constant,
)
from .estimators import (
    BlockModelTransfer,
    Clustering,
    CommunityMap,
    FlipOracle,
    RowwiseTransfer,
    auto_bandwidth,
    block_average,
    community_map_exact,
    community_map_lsq,
    estimate_rowwise,
    estimate_sbm,
    oracle_estimate,
    spectral_cluster,
    usvt,
)
from .evaluation import (
    ErrorDecomposition,
    MembershipCounts,
    TrialStats,
    error_decomposition,
    membership_counts,
    mse,
    run_experiment,
    snr,
    write_results_csv,
    write_results_json,
)
from .ingest import (
    LabeledGraph,
    TemporalLog,
    bin_temporal,
    intersect_nodes,
    load_edge_list,
    load_temporal_log,
)
from .matrixio import load_indices, load_matrix, save_indices, save_matrix
from .models import (
    BlockModel,
    CustomMatrix,
    LatentDistanceModel,
    LatentSample,
    NoisyMMSB,
    ObservationSplit,
    SineGraphon,
    SmoothGraphon,
    balanced_assignment,
    build_prob_matrix,
    latent_space,
    mmsb_connectivity,
    model_from_config,
    model_to_config,
    planted_block_model,
    project_to_simplex,
    restrict,
    sample_adjacency,
    sample_latents,
    sample_target_split,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GRID",
    "NeighborhoodIndex",
    "RankingsReport",
    "graph_distance_block",
    "graph_distance_matrix",
    "quantile_neighborhoods",
    "rankings_constant",
    "BlockModelTransfer",
    "Clustering",
    "CommunityMap",
    "FlipOracle",
    "RowwiseTransfer",
    "auto_bandwidth",
    "block_average",
    "community_map_exact",
    "community_map_lsq",
    "estimate_rowwise",
    "estimate_sbm",
    "oracle_estimate",
    "spectral_cluster",
    "usvt",
    "ErrorDecomposition",
    "MembershipCounts",
    "TrialStats",
    "error_decomposition",
    "membership_counts",
    "mse",
    "run_experiment",
    "snr",
    "write_results_csv",
    "write_results_json",
    "LabeledGraph",
    "TemporalLog",
    "bin_temporal",
    "intersect_nodes",
    "load_edge_list",
    "load_temporal_log",
    "load_indices",
    "load_matrix",
    "save_indices",
    "save_matrix",
    "BlockModel",
    "CustomMatrix",
    "LatentDistanceModel",
    "LatentSample",
    "NoisyMMSB",
    "ObservationSplit",
    "SineGraphon",
    "SmoothGraphon",
    "balanced_assignment",
    "build_prob_matrix",
    "latent_space",
    "mmsb_connectivity",
    "model_from_config",
    "model_to_config",
    "planted_block_model",
    "project_to_simplex",
    "restrict",
    "sample_adjacency",
    "sample_latents",
    "sample_target_split",
    "__version__",
]
