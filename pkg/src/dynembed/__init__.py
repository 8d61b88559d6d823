"""dynembed: decremental multi-scale graph embedding into lp space.

A weighted undirected graph under edge-weight increases is embedded as
one membership bit per doubling distance scale (a characteristic vector
of randomized distance-preserving cuts); pairwise lp distances on these
vectors approximate graph distances in expectation, and the embedding is
maintained through updates with explicit per-coordinate deltas.
"""

from .decomposition import (
    Clustering,
    Cut,
    build_cut,
    ldrd,
    sample_radius,
    verify_cut_properties,
)
from .dynamic import (
    DynamicEmbedding,
    EmbeddingDelta,
    ScaleMaintainer,
    audit_state,
    handle_update,
    init_dynamic,
    query_dynamic,
    read_delta_log,
    replay_deltas,
    split_cluster,
    write_delta_log,
)
from .embedding import (
    MultiScaleEmbedding,
    ScaleLadder,
    build_scale_ladder,
    build_static_embedding,
    characteristic_embedding,
    export_embedding,
    import_embedding,
    lp_distance,
)
from .graph import (
    ContractionMap,
    FilteredGraph,
    UpdateEvent,
    WeightedGraph,
    all_pairs_distances,
    apply_weight_increase,
    contract_below,
    dijkstra,
    filtered_distance,
    load_edge_list,
    read_update_stream,
    write_update_stream,
)
from .harness import ExperimentConfig, emit_csv, generate_instance, run_dynamic_eval
from .kernels import BACKEND, UNREACHED

__version__ = "0.1.0"
