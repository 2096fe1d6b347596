"""Edge scaling, the Gumbel limit and the slowly varying finite-N corrections.

Near an edge the extreme modulus is rescaled as

    y = a + s * sqrt(2 / (N F)) * (alpha_N + Y / (2 alpha_N)),   s = +1 outer, -1 inner

with alpha_N = |log N - 2 log log N - log 2 pi + log(a^2 F / 4)|^{1/2} / sqrt(2).
The Gaussian potential is the outer case with a = 1, F = 4.

``phi`` is the closed-form approximation of log F_N(Y) that contains the
Gumbel term -e^{-Y} together with every slowly varying correction:

    phi(Y) = -(a sqrt(N F) / (2 sqrt 2)) * (e^{-sigma^2}/sqrt(pi) - sigma erfc(sigma)),
    sigma = alpha_N + Y / (2 alpha_N)
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import CdfCurve, EdgeKind
from .errors import DomainError, SmallNError
from .potential import SupportEdges
from .specfun import erfc, erfcx

__all__ = [
    "ScalingKind",
    "ScalingMap",
    "alpha_argument",
    "alpha_gauss",
    "alpha_outer",
    "alpha_inner",
    "gumbel_cdf",
    "phi",
    "phi_gauss",
    "phi_undropped",
    "phi_series",
    "phi_series_term",
    "first_log_correction",
    "gumbel_curve",
    "phi_curve",
]

_SQRT_PI = math.sqrt(math.pi)
_LOG_2PI = math.log(2.0 * math.pi)
MIN_N = 3


class ScalingKind(str, enum.Enum):
    GAUSS_OUTER = "GaussOuter"
    GENERAL_OUTER = "GeneralOuter"
    GENERAL_INNER = "GeneralInner"

    @property
    def edge_kind(self) -> EdgeKind:
        return EdgeKind.INNER if self is ScalingKind.GENERAL_INNER else EdgeKind.OUTER


def alpha_argument(N: float, a_edge: float = 1.0, f_edge: float = 4.0) -> float:
    """log N - 2 log log N - log 2 pi + log(a^2 F / 4), before the absolute value."""
    if N < MIN_N:
        raise SmallNError(f"N = {N} is below {MIN_N}; log log N is not usable")
    if not (a_edge > 0 and f_edge > 0):
        raise DomainError("edge radius and curvature must be positive")
    log_n = math.log(N)
    base = log_n - 2.0 * math.log(log_n) - _LOG_2PI
    return base + math.log(a_edge * a_edge * f_edge / 4.0)


def _alpha_from_argument(N, arg):
    if abs(arg) < 1e-12:
        raise SmallNError(
            f"the scaling sequence vanishes at N = {N}; choose a different N"
        )
    return math.sqrt(abs(arg) / 2.0)


def alpha_gauss(N: float) -> float:
    """alpha_N for V(r) = r^2."""
    return _alpha_from_argument(N, alpha_argument(N))


def alpha_outer(N: float, a_plus: float, f_plus: float) -> float:
    return _alpha_from_argument(N, alpha_argument(N, a_plus, f_plus))


def alpha_inner(N: float, a_minus: float, f_minus: float) -> float:
    return _alpha_from_argument(N, alpha_argument(N, a_minus, f_minus))


@dataclass(frozen=True)
class ScalingMap:
    """Affine map between the raw modulus y and the rescaled variable Y.

    ``folded`` is True when the quantity under the absolute value in alpha_N
    is negative (moderate N); alpha is then built from its magnitude.
    """

    kind: ScalingKind
    N: float
    a_edge: float
    f_edge: float
    alpha: float
    folded: bool = False

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise SmallNError(f"alpha_N = {self.alpha} is not positive")
        if not (self.a_edge > 0 and self.f_edge > 0):
            raise DomainError("edge radius and curvature must be positive")

    @classmethod
    def gauss_outer(cls, N: float) -> "ScalingMap":
        arg = alpha_argument(N)
        return cls(ScalingKind.GAUSS_OUTER, N, 1.0, 4.0, _alpha_from_argument(N, arg), arg < 0)

    @classmethod
    def outer(cls, N: float, a_plus: float, f_plus: float) -> "ScalingMap":
        arg = alpha_argument(N, a_plus, f_plus)
        return cls(ScalingKind.GENERAL_OUTER, N, a_plus, f_plus, _alpha_from_argument(N, arg), arg < 0)

    @classmethod
    def inner(cls, N: float, a_minus: float, f_minus: float) -> "ScalingMap":
        if not a_minus > 0:
            raise DomainError("the inner-edge scaling needs an annulus (a_- > 0)")
        arg = alpha_argument(N, a_minus, f_minus)
        return cls(ScalingKind.GENERAL_INNER, N, a_minus, f_minus, _alpha_from_argument(N, arg), arg < 0)

    @classmethod
    def for_edges(cls, edges: SupportEdges, N: float, edge_kind, gaussian: bool = False) -> "ScalingMap":
        edge_kind = EdgeKind.parse(edge_kind)
        if edge_kind is EdgeKind.INNER:
            if edges.f_minus is None:
                raise DomainError("potential has disk topology; there is no inner edge to scale around")
            return cls.inner(N, edges.a_minus, edges.f_minus)
        if gaussian:
            return cls.gauss_outer(N)
        return cls.outer(N, edges.a_plus, edges.f_plus)

    @property
    def edge_kind(self) -> EdgeKind:
        return self.kind.edge_kind

    @property
    def beta(self) -> float:
        return 1.0 / (2.0 * self.alpha)

    @property
    def width(self) -> float:
        """(N b)^{-1/2} with b = F/2."""
        return math.sqrt(2.0 / (self.N * self.f_edge))

    @property
    def _sign(self) -> float:
        return -1.0 if self.kind is ScalingKind.GENERAL_INNER else 1.0

    def sigma(self, Y: float) -> float:
        return self.alpha + Y / (2.0 * self.alpha)

    def y_from_Y(self, Y: float) -> float:
        return self.a_edge + self._sign * self.width * self.sigma(Y)

    def Y_from_y(self, y: float) -> float:
        sigma = self._sign * (y - self.a_edge) / self.width
        return 2.0 * self.alpha * (sigma - self.alpha)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "N": self.N,
            "a_edge": self.a_edge,
            "f_edge": self.f_edge,
            "alpha": self.alpha,
            "folded": self.folded,
        }


def gumbel_cdf(Y):
    """exp(-exp(-Y))."""
    if np.ndim(Y) == 0:
        return math.exp(-math.exp(-Y)) if Y > -700 else 0.0
    Y = np.asarray(Y, dtype=float)
    with np.errstate(over="ignore"):
        return np.exp(-np.exp(-Y))


def _prefactor(s: ScalingMap) -> float:
    return s.a_edge * math.sqrt(s.N * s.f_edge) / (2.0 * math.sqrt(2.0))


def _bracket(sigma):
    # e^{-sigma^2}/sqrt(pi) - sigma erfc(sigma), without cancellation for large sigma
    if sigma >= 2.0:
        return math.exp(-sigma * sigma) * (1.0 / _SQRT_PI - sigma * erfcx(sigma))
    return math.exp(-sigma * sigma) / _SQRT_PI - sigma * erfc(sigma)


def _phi_scalar(s, Y):
    return -_prefactor(s) * _bracket(s.sigma(Y))


def phi(s: ScalingMap, Y):
    """Approximation of log F_N(Y) including all slowly varying corrections.

    Defined for every real Y: the bracket is an entire function of sigma, and
    for sigma < 0 it simply drives exp(phi) to 0.
    """
    if np.ndim(Y) == 0:
        return _phi_scalar(s, float(Y))
    return np.array([_phi_scalar(s, float(v)) for v in np.asarray(Y, dtype=float)])


def phi_gauss(N: float, Y):
    """phi for the Gaussian outer edge."""
    return phi(ScalingMap.gauss_outer(N), Y)


def phi_undropped(s: ScalingMap, Y):
    """Gaussian log F_N before the O(N^{-1/2}) terms are discarded (diagnostic only)."""
    if s.kind is not ScalingKind.GAUSS_OUTER:
        raise DomainError("the undropped expression is available for the Gaussian outer edge only")

    def one(v):
        sig = s.sigma(v)
        root = math.sqrt(2.0 * s.N)
        return -0.5 * ((root + 0.5 * sig) * math.exp(-sig * sig) / _SQRT_PI
                       - erfc(sig) * (0.5 * sig * sig + root * sig + 0.25))

    if np.ndim(Y) == 0:
        return one(float(Y))
    return np.array([one(float(v)) for v in np.asarray(Y, dtype=float)])


def _series_scale(s: ScalingMap, Y: float) -> float:
    # prefactor * e^{-sigma^2}/sqrt(pi) / e^{-Y} / e^{-Y^2/(4 alpha^2)}; equals log N
    # whenever the alpha argument is positive
    return _prefactor(s) * math.exp(-s.alpha * s.alpha) / _SQRT_PI


def phi_series_term(s: ScalingMap, Y: float, k: int) -> float:
    """k-th term (k >= 1) of the slowly varying series for phi."""
    sigma = s.sigma(Y)
    if not sigma > 1.0:
        raise DomainError(f"series requires sigma > 1, got {sigma}")
    if k < 1:
        raise DomainError("k must be >= 1")
    coef = 1.0
    for j in range(1, k + 1):
        coef *= (2 * j - 1) / (2.0 * sigma * sigma)
    sign = 1.0 if k % 2 == 1 else -1.0
    lead = -_series_scale(s, Y) * math.exp(-Y) * math.exp(-Y * Y / (4.0 * s.alpha * s.alpha))
    return lead * sign * coef


def phi_series(s: ScalingMap, Y: float, k_max: int) -> float:
    """Partial sum through k_max of -e^{-Y} log N e^{-Y^2/4alpha^2} sum_k (-1)^{k+1}(2k-1)!!/(2 sigma^2)^k."""
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    return math.fsum(phi_series_term(s, Y, k) for k in range(1, k_max + 1))


def first_log_correction(s: ScalingMap, Y: float) -> float:
    """Coefficient of 1/log N in phi / (-e^{-Y}) - 1."""
    log_n = math.log(s.N)
    return (2.0 * math.log(log_n) + math.log(8.0 * math.pi / (s.a_edge ** 2 * s.f_edge))
            - 3.0 - 2.0 * Y - 0.5 * Y * Y)


def gumbel_curve(grid: Sequence[float], meta=None) -> CdfCurve:
    grid = np.asarray(grid, dtype=float)
    return CdfCurve(grid, gumbel_cdf(grid), dict(meta or {}, method="asymptotic-gumbel"))


def phi_curve(s: ScalingMap, grid: Sequence[float], meta=None) -> CdfCurve:
    grid = np.asarray(grid, dtype=float)
    values = np.exp(phi(s, grid))
    return CdfCurve(grid, values, dict(meta or {}, method="asymptotic-phi", N=s.N),
                    y=np.array([s.y_from_Y(v) for v in grid]))
