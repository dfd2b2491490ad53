"""agmkit: generation, fitting, and structural measurement of networks whose
edges arise from overlapping community memberships."""

__version__ = "0.1.0"

from .compare import ComparisonReport, MetricConfig, compare_suite, ks_statistic, relative_improvement
from .community_stats import (
    OverlapTriple,
    ccdf,
    connector_in_overlap,
    edge_prob_vs_shared,
    edges_vs_size,
    max_icdf_vs_size,
    overlap_clustering,
    overlap_fractions,
)
from .curves import Curve, LinearBins, LogBins
from .errors import InfeasibleError, ParseError
from .fit import FitProblem, FitResult, fit, gradient_x, log_likelihood_p, log_likelihood_x
from .generator import AgmParams, assign_probs_power_law, edge_probability, generate, sample_edge_array
from .graph import (
    AffiliationNetwork,
    CommunityView,
    Graph,
    community_view,
    internal_degree,
    internal_edge_count,
    shared_communities,
    split_into_components,
)
from .ingest import (
    Dataset,
    DatasetSummary,
    load_dataset,
    parse_community_file,
    parse_edge_list,
    preprocess,
    read_dataset,
    summarize,
    write_dataset,
)
from .network_stats import (
    SpectralSummary,
    clustering_distribution,
    degree_distribution,
    hop_plot,
    spectral_summary,
    triad_participation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
