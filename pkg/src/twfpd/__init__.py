"""Tight wavelet filter banks with prescribed directions."""

from .construct import (
    BankConfig,
    ConfigError,
    DirectionSpec,
    FilterBank,
    VerificationReport,
    box_spline_config,
    build_bank,
    build_from_sos,
    default_coset_reps,
    moments_report,
    verify_bank,
    verify_sos_identity,
    verify_uep,
)
from .spectral import CausalFactor, half_angle_factor, hermitian_sqrt
from .transform import (
    Decomposition,
    analyze,
    analyze_level,
    complexity_report,
    synth_lp,
    synth_standard,
    synthesize,
)
from .trigpoly import TrigPoly

__all__ = [
    "BankConfig", "CausalFactor", "ConfigError", "Decomposition", "DirectionSpec",
    "FilterBank", "TrigPoly", "VerificationReport", "analyze", "analyze_level",
    "box_spline_config", "build_bank", "build_from_sos", "complexity_report",
    "default_coset_reps", "half_angle_factor", "hermitian_sqrt", "moments_report",
    "synth_lp", "synth_standard", "synthesize", "verify_bank", "verify_sos_identity",
    "verify_uep",
]
