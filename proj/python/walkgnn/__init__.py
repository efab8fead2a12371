"""Exact walk censuses and representation checks for four MPNN aggregation schemes."""

from ._core import (  # noqa: F401
    FIG2_RED_NODE,
    EmbeddingTable,
    Graph,
    GraphCollection,
    Model,
    WalkTable,
    WalkgnnError,
    __version__,
    collapse_check,
    correlate,
    enumerate_normalized_walks_bruteforce,
    enumerate_walks_bruteforce,
    find_walk_collisions,
    forward,
    generate,
    init_model,
    lipschitz_profile,
    normalized_walk_sums,
    parse_edge_list,
    parse_tu_collection,
    pearson,
    proportionality_check,
    readout,
    readout_census,
    spectral_norm,
    verify_bound,
    walk_census,
    walk_counts,
)
