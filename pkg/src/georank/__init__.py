"""Enumerate, estimate, and rank replica deployments for geo-replicated SMR."""

from .core import (
    ClientSet,
    Deployment,
    ProtocolParams,
    RttMatrix,
    Site,
    SiteCatalog,
    UsageError,
    ValidationError,
    link_delay,
    validate_inputs,
)
from .deployments import DeploymentSpace, count, deployment_at, enumerate_deployments, index_of
from .estimator import (
    PhaseTimings,
    estimate,
    estimate_detailed,
    estimate_simple,
    kth_smallest,
    latencies,
)
from .ranking import Ranking, RankingComparison, compare, load_reference, rank
from .rtt import RttSample, aggregate, load_matrix, parse_samples, store_matrix

__version__ = "0.1.0"
