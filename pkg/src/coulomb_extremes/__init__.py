"""Extreme-value statistics of eigenvalue moduli for radially symmetric normal random matrices.

The package computes the exact finite-N distribution of the largest and
smallest eigenvalue modulus of a 2D Coulomb gas with a radial confining
potential, its Gumbel limit and closed-form finite-N corrections, and
provides Monte-Carlo samplers to check them.
"""
__version__ = "0.1.0"

from .curves import CdfCurve, EdgeKind
from .errors import (
    CoulombExtremesError,
    DomainError,
    InadmissiblePotentialError,
    QuadratureError,
    SmallNError,
)
from .potential import (
    RadialPotential,
    SupportEdges,
    check_admissible,
    cubic,
    gauss,
    halfquadlin,
    parse_potential,
    quadlin,
    support_edges,
)
from .exact_cdf import cdf_curve, gaussian_log_cdf_max, log_cdf_general
from .asymptotics import ScalingMap, gumbel_cdf, phi
from .sampler import RngConfig

__all__ = [
    "CdfCurve", "EdgeKind", "CoulombExtremesError", "DomainError", "InadmissiblePotentialError",
    "QuadratureError", "SmallNError", "RadialPotential", "SupportEdges", "check_admissible",
    "cubic", "gauss", "halfquadlin", "parse_potential", "quadlin", "support_edges", "cdf_curve",
    "gaussian_log_cdf_max", "log_cdf_general", "ScalingMap", "gumbel_cdf", "phi", "RngConfig",
]
