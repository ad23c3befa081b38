"""Diameter-critical graphs: constructions, exact verification, edge-degree
statistics, the critical-path covering algorithm and extremal search."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    BadParams, BoundViolation, ChargingViolation, CountingViolation, DiamCritError,
    InternalInvariant, InvariantViolation, LemmaViolation, NotATriangle,
    NotDiameterCritical, NotFound, OutOfRange, ParseError, PreconditionFailed,
    SamplingExhausted, SelfLoop, TheoremViolation, TooLarge, Unreachable,
    UsageError, VerdictError,
)
from .graph import (  # noqa: E402
    Graph, build, complement, complete_bipartite, complete_graph, cycle_graph,
    degree_square_sum, degrees, empty_graph, from_adjacency, from_graph6, from_json,
    path_graph, petersen_graph, to_graph6, to_json,
)
from .metric import INF, bfs_distances, diameter, distance, distance_matrix, eccentricity  # noqa: E402
from .criticality import (  # noqa: E402
    critical_structure, find_k3_associated_path, is_diameter_k_critical, k_associated,
    matched_counts, multiplicities, verify_triangle_charging,
)
from .stats import stats_report, triple_counts  # noqa: E402
from .constructions import (  # noqa: E402
    build_clique_matching, build_counterexample, build_d2_bip, build_d2_trip,
    build_layered_dk, construct, sample_gnp,
)
from .cover import build_g0, extract_p_t, run_cover, verify_s_bound  # noqa: E402
from .hypergraph import Hypergraph3, hypergraph_chain  # noqa: E402
from .search import canonical_form, enumerate_critical, local_search  # noqa: E402
