"""Fourier analysis and oscillating multipliers on T^n and SU(2)."""

from ._lieosc import (
    Coefficients,
    Error,
    Grid,
    InvalidArgument,
    Kernel,
    NumericalFailure,
    ResolutionError,
    Symbol,
    __version__,
    apply_multiplier,
    ball_volume,
    bessel_symbol,
    cz_decompose,
    decay_constant,
    diameter,
    distance,
    estimate_seminorm,
    forward_transform,
    heat_symbol,
    identity_symbol,
    integral,
    inverse_transform,
    log_spaced,
    oscillating_symbol,
    pure_oscillation_symbol,
    run_config,
    synthesize_kernel,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
