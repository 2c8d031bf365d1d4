"""Fourier spectral collision operators for the Boltzmann equation.

The package provides the quadratic (binary) collision operator, a fast
evaluation of its linearization about a Maxwellian, a spatially homogeneous
relaxation driver and a 1D3V steady solver that combines both operators.
"""
from .binary import BinaryCollision, CollisionKernel, ConservationFix, binary_collision, binary_collision_pair
from .errors import (
    BoltzspecError,
    ConfigError,
    ConvergenceFailure,
    DegenerateFlux,
    DivisionUnderflow,
    GridMismatch,
    NonConvergence,
    NonFiniteOutput,
    NonFiniteState,
    NonpositiveDensity,
    UnsupportedOrder,
)
from .grid import DistributionField, FourierField, SpectralGrid, forward_dft, integrate, inverse_dft, l2_norm
from .linear import CutoffPolicy, LinearizedCollision, cutoff_ratio, linearized_collision, precompute
from .moments import STANDARD, MaxwellianParams, compute_moments, maxwellian_field, maxwellian_fourier
from .quadrature import (
    RadialQuadrature,
    SphericalQuadrature,
    gauss_radau_jacobi,
    hemisphere_for_degree,
    make_hemisphere_quadrature,
    make_radial_quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryCollision", "BoltzspecError", "CollisionKernel", "ConfigError", "ConservationFix",
    "ConvergenceFailure", "CutoffPolicy", "DegenerateFlux", "DistributionField", "DivisionUnderflow",
    "FourierField", "GridMismatch", "LinearizedCollision", "MaxwellianParams", "NonConvergence",
    "NonFiniteOutput", "NonFiniteState", "NonpositiveDensity", "RadialQuadrature", "STANDARD",
    "SpectralGrid", "SphericalQuadrature", "UnsupportedOrder", "binary_collision", "binary_collision_pair",
    "compute_moments", "cutoff_ratio", "forward_dft", "gauss_radau_jacobi", "hemisphere_for_degree",
    "integrate", "inverse_dft", "l2_norm", "linearized_collision", "make_hemisphere_quadrature",
    "make_radial_quadrature", "maxwellian_field", "maxwellian_fourier", "precompute",
]
