"""Exact and Monte Carlo tools for limit laws of descents and 3-term progressions."""

__version__ = "0.1.0"

from ._accel import backend, backend_name, set_backend, set_workers
from .combinatorics import (
    ContinuousMoments,
    IntersectionTable,
    MomentSummary,
    ap_moments_conditional,
    ap_moments_continuous,
    ap_moments_unconditional,
    complement_identity,
    descent_moments,
    intersection_table,
)
from .counters import count_aps, count_aps_continuous, count_descents
from .distributions import (
    EmpiricalDist,
    GaussianRef,
    IntegerPmf,
    Statistic,
    eulerian_pmf,
    exhaustive_ap_pmf,
    exhaustive_conditional_pmf,
    mc_histogram,
)
from .errors import (
    DomainError,
    FormulaDomainError,
    LimitLabError,
    PartialResultError,
    PrimalityError,
    ResourceError,
    ValidationError,
)
from .limitmetrics import (
    CharProfile,
    ScanResult,
    char_fn,
    fourier_invert,
    kolmogorov,
    llt_error,
    scaling_scan,
    small_t_envelope,
    wasserstein_integer,
)
from .rng import RngStream
from .samplers import LehmerCode, SubsetState, sample_lehmer, sample_subset, sample_subset_fixed_k
from .steinlab import (
    chatterjee_bound,
    dependency_graph,
    exchangeable_verify,
    gap_diagnostic,
    peak_height_check,
    spacing_profile,
)
