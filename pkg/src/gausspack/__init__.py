"""Gaussian wave-packet dynamics under time-dependent quadratic Hamiltonians.

The state of a squeezed coherent packet is followed on several equivalent
charts (the constraint manifold of (Q, P), two hyperboloids, the Poincare
disk and the Siegel half plane) together with its first moments.
"""

__version__ = "0.1.0"

from .errors import GausspackError
from .geometry import (
    AlphaPoint,
    CovarianceTriple,
    DiskPoint,
    FirstMoments,
    H2Point,
    H3Point,
    QPPoint,
    SiegelPoint,
    SqueezeCoords,
)
from .hamiltonian import (
    AmplifierCoefficients,
    AmplifierParams,
    ConstantCoefficients,
    HarmonicOscillator,
    TabulatedCoefficients,
    free_particle,
    model_from_config,
)
from .dynamics import IntegratorConfig, Trajectory, convert_trajectory, integrate, wei_norman
from .wavepacket import GaussianState, Grid1D, propagate_packet

__all__ = [
    "GausspackError",
    "AlphaPoint",
    "CovarianceTriple",
    "DiskPoint",
    "FirstMoments",
    "H2Point",
    "H3Point",
    "QPPoint",
    "SiegelPoint",
    "SqueezeCoords",
    "AmplifierCoefficients",
    "AmplifierParams",
    "ConstantCoefficients",
    "HarmonicOscillator",
    "TabulatedCoefficients",
    "free_particle",
    "model_from_config",
    "IntegratorConfig",
    "Trajectory",
    "convert_trajectory",
    "integrate",
    "wei_norman",
    "GaussianState",
    "Grid1D",
    "propagate_packet",
]
