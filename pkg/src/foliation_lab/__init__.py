"""foliation_lab: numerics for flows preserving a one-dimensional foliation."""

from .core import (
    CocycleTrace,
    DeviationProfile,
    FoliatedSystem,
    GammaEstimate,
    SemiconjugacyReport,
    TimeDomain,
    TranslationEstimate,
    accumulate_trace,
    check_cocycle_identity,
    check_commutation,
    check_order_preservation,
    deviation_profile,
    estimate_gamma,
    estimate_rho,
    evolve,
    semiconjugacy_residual,
)

from . import apline, apode, circle, quasicrystal, skew  # noqa: E402

__version__ = "0.1.0"
