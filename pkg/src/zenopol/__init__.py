"""High-precision transfer-matrix simulation of polarizer stacks.

Computes photon transmission probabilities through stacks of
anisotropic lossy polarizers from classical electrodynamics at
arbitrary precision, and compares them against the projection-postulate
baseline {cos^2(pi/2N)}^N.  Companion modules verify the photon
wave-equation identities and the memory-kernel form of projected
subspace dynamics.
"""

from .errors import (
    InvalidPolarizationError,
    NotHermitianError,
    PrecisionExhaustedError,
    SingularMatrixError,
    StepTooLargeError,
)
from .precision import (
    HComplex,
    PrecisionContext,
    csqrt,
    ctrig,
    mat2_spectral_apply,
    mat4_det,
    mat4_mul,
    mat4_solve,
    rotation2,
)
from .stack import (
    DielectricEigenvalues,
    PolarizerSlab,
    ScatteringAmplitudes,
    StackConfig,
    dielectric_tensor,
    estimate_digits,
    intermediate_polarizer_probability,
    projection_probability,
    slab_transfer,
    solve_boundary,
    stack_transfer,
    transmission_probability,
    zeno_angle_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "HComplex",
    "PrecisionContext",
    "csqrt",
    "ctrig",
    "mat2_spectral_apply",
    "mat4_det",
    "mat4_mul",
    "mat4_solve",
    "rotation2",
    "DielectricEigenvalues",
    "PolarizerSlab",
    "ScatteringAmplitudes",
    "StackConfig",
    "dielectric_tensor",
    "estimate_digits",
    "intermediate_polarizer_probability",
    "projection_probability",
    "slab_transfer",
    "solve_boundary",
    "stack_transfer",
    "transmission_probability",
    "zeno_angle_schedule",
    "InvalidPolarizationError",
    "NotHermitianError",
    "PrecisionExhaustedError",
    "SingularMatrixError",
    "StepTooLargeError",
    "__version__",
]
