"""Tridiagonal beta-Hermite and beta-Laguerre ensembles in the large-beta limit.

Sampling via the O(k) tridiagonal/bidiagonal models, frozen spectra at the
Hermite/Laguerre polynomial roots, the first-order Gaussian fluctuation law,
sum-of-Gaussians level densities, and a Monte Carlo verification harness.
"""

__version__ = "0.1.0"

from .density import (
    GaussianMixture,
    Histogram,
    build_histogram,
    exact_level_density_beta2,
    gaussian_mixture,
    mixture_cdf,
    mixture_pdf,
    semicircle_pdf,
)
from .ensembles import (
    EnsembleSpec,
    SpecError,
    chi_mean,
    residual_matrix,
    resolve_laguerre_params,
    sample_chi,
    sample_hermite,
    sample_laguerre,
    sample_laguerre_bidiagonal,
    sample_spectra,
)
from .fluctuations import (
    FluctuationModel,
    airy_edge_diagnostic,
    first_order_eig,
    hermite_fluctuation_model,
    laguerre_fluctuation_model,
)
from .matrices import Bidiagonal, TridiagonalSym
from .orthopoly import (
    FrozenSpectrum,
    hermite_freeze_matrix,
    hermite_orthonormal_eval,
    hermite_roots,
    laguerre_freeze_matrix,
    laguerre_orthonormal_eval,
    laguerre_roots,
)
from .trieig import EigenResult, eig_residual, eigh_tridiagonal
from .verify import (
    VerificationReport,
    chi_normal_limit_check,
    density_agreement_check,
    fluctuation_mc_check,
    invariant_suite,
    ks_statistic,
    perturbation_order_check,
)
