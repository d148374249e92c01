"""Damped KdV-Kawahara pseudospectral simulator and estimate probes."""

from ._kdvk import (
    ConfigError,
    DampingProfile,
    EquationParams,
    EstimatorError,
    Field,
    GridSpec,
    NumericalAbort,
    OverflowGuardError,
    __version__,
    a_sigma_norm,
    cli_main,
    dispersion_symbol,
    estimate_radius,
    evolve_l2,
    gevrey_norm,
    l2_norm,
    linear_propagator,
    parse_config_json,
    preset_config_json,
    preset_names,
    probe_exponential_triangle,
    probe_weight_inequality,
    spatial_derivative,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
