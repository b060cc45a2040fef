"""High-dimensional one-sample mean tests built on orthogonally equivariant
shrinkage of the precision matrix, with the supporting spectral-transform
machinery, an asymptotic power toolkit, and a bootstrap testing pipeline.
"""

from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    bootstrap_distribution,
    empirical_p_value,
    make_metro_fixture,
    read_csv,
    run_bootstrap,
    write_csv,
)
from .linalg import (
    SpectralDecomposition,
    ar1_covariance,
    as_data_matrix,
    sample_moments,
    sample_mvn,
    spawn_rng,
    spectral_decompose,
)
from .meantests import (
    TestOutcome,
    composite_t2,
    contiguous_blocks,
    decomposite_t2,
    hotelling_t2,
    interleaved_blocks,
    normalized_decomposite,
    variant_statistic,
)
from .power import (
    AsymptoticModel,
    LocalAlternative,
    PowerConfig,
    PowerEstimate,
    are,
    are_report,
    asymptotic_power,
    composite_power,
    draw_delta,
    local_alternative_mean,
    mc_power,
    sample_t20,
    t20_moments,
)
from .shrinkage import (
    PrecisionEstimate,
    ShrinkageSpectrum,
    isotonize,
    lw_oracle,
    lw_shrink,
    precision_estimate,
    stein_isotonized,
    stein_raw,
)
from .spectrum import (
    KernelConfig,
    MPModel,
    empirical_stieltjes,
    kernel_stieltjes_estimate,
    mp_density,
    mp_edges,
    mp_stieltjes,
    mp_stieltjes_outside,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticModel",
    "BootstrapConfig",
    "BootstrapResult",
    "KernelConfig",
    "LocalAlternative",
    "MPModel",
    "PowerConfig",
    "PowerEstimate",
    "PrecisionEstimate",
    "ShrinkageSpectrum",
    "SpectralDecomposition",
    "TestOutcome",
    "ar1_covariance",
    "are",
    "are_report",
    "as_data_matrix",
    "asymptotic_power",
    "bootstrap_distribution",
    "composite_power",
    "composite_t2",
    "contiguous_blocks",
    "decomposite_t2",
    "draw_delta",
    "empirical_p_value",
    "empirical_stieltjes",
    "hotelling_t2",
    "interleaved_blocks",
    "isotonize",
    "kernel_stieltjes_estimate",
    "local_alternative_mean",
    "lw_oracle",
    "lw_shrink",
    "make_metro_fixture",
    "mc_power",
    "mp_density",
    "mp_edges",
    "mp_stieltjes",
    "mp_stieltjes_outside",
    "normalized_decomposite",
    "precision_estimate",
    "read_csv",
    "run_bootstrap",
    "sample_moments",
    "sample_mvn",
    "sample_t20",
    "spawn_rng",
    "spectral_decompose",
    "stein_isotonized",
    "stein_raw",
    "t20_moments",
    "variant_statistic",
    "write_csv",
]
