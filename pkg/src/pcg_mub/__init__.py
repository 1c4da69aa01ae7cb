"""Periodic coarse graining of continuous variables and mutually unbiased measurements."""

from .experiment import (
    PhysicalSetup,
    ScanRow,
    canonical_to_physical,
    entropy_scan,
    optimal_period_search,
    physical_to_canonical,
    pixel_quantize,
)
from .grid import (
    GaussianSpec,
    Grid,
    Wavefunction,
    autocorrelation,
    fourier_transform,
    inverse_fourier_transform,
    make_gaussian,
)
from .masks import PcgBasis, PreparedState, apply_mask, mask_value, masked_gaussian_overlap, prepare_state
from .probability import (
    OutcomeDistribution,
    SeriesParams,
    conditional_matrix,
    pcg_probs_quadrature,
    pcg_probs_series,
    shannon_entropy,
)
from .theory import (
    MubConfig,
    StandardCgConfig,
    allowed_m_residues,
    equivalent_forms_check,
    is_unbiased_config,
    momentum_period,
    standard_cg_distribution,
)

__version__ = "0.1.0"
