"""Optimal L1 prediction of the time a spectrally negative Levy process
attains its ultimate supremum, verified by Monte Carlo simulation."""

from .families import (
    BrownianDrift,
    CompoundPoissonDrift,
    DegenerateDriftError,
    JumpDiffusion,
    SupremumLaw,
    drifts_to_minus_infinity,
    expected_theta,
    laplace_exponent,
    median,
    phi,
    supremum_cdf,
    supremum_law,
)
from .scale import (
    ScaleModel,
    invert_laplace_scale,
    jump_diffusion_roots,
    potential_atom,
    potential_density,
    rescale,
    scale_model,
    scale_w,
    scale_w_prime,
    scale_w_prime_at_zero,
)
from .stopping import (
    PastingDiagnostic,
    PredictionSolution,
    objective,
    pasting_diagnostic,
    solve,
    solve_threshold,
    threshold_function_g,
    value_function,
)

__version__ = "0.1.0"
