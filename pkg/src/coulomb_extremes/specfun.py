"""Special functions used by the exact and asymptotic CDFs.

Everything here is self-contained (no scipy.special) so that results do not
depend on which special-function library happens to be installed.  Scalar
routines use :mod:`math`; the few array routines use numpy.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ErfcAsymptoticResult",
    "log_gamma",
    "reg_lower_gamma",
    "log_reg_lower_gamma",
    "log_reg_lower_gamma_int",
    "erf",
    "erfc",
    "erfcx",
    "erfc_asymptotic",
]

_SQRT_PI = math.sqrt(math.pi)
_EPS = 2.220446049250313e-16
_TINY = 1e-300

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_scalar(a: float) -> float:
    if a < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.log(math.pi / math.sin(math.pi * a)) - _log_gamma_scalar(1.0 - a)
    a -= 1.0
    s = _LANCZOS_COEF[0]
    for k in range(1, 9):
        s += _LANCZOS_COEF[k] / (a + k)
    t = a + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (a + 0.5) * math.log(t) - t + math.log(s)


def log_gamma(a):
    """Natural log of the gamma function for ``a > 0``.

    Accepts a scalar or an array.  Relative accuracy of ``exp(log_gamma(a))``
    is better than 1e-13 for ``a <= 170``.
    """
    if np.ndim(a) == 0:
        a = float(a)
        if not a > 0.0:
            raise DomainError(f"log_gamma requires a > 0, got {a}")
        return _log_gamma_scalar(a)
    arr = np.asarray(a, dtype=float)
    if not np.all(arr > 0.0):
        raise DomainError("log_gamma requires a > 0")
    small = arr < 0.5
    b = np.where(small, 1.0 - arr, arr) - 1.0
    s = np.full_like(b, _LANCZOS_COEF[0])
    for k in range(1, 9):
        s += _LANCZOS_COEF[k] / (b + k)
    t = b + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (b + 0.5) * np.log(t) - t + np.log(s)
    if np.any(small):
        refl = np.log(np.pi / np.sin(np.pi * arr[small])) - out[small]
        out[small] = refl
    return out


# Stirling remainder lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2]; series used for a >= 15
_STIRLING = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360)


def _stirling_remainder(a):
    inv2 = 1.0 / (a * a)
    s = _STIRLING[-1]
    for c in _STIRLING[-2::-1]:
        s = s * inv2 + c
    return s / a


def _log_rel_deviation(t):
    # log1p(t) - t, accurate also for small |t|
    if abs(t) < 0.1:
        # alternating series -t^2/2 + t^3/3 - ...
        total = 0.0
        power = t
        for k in range(2, 60):
            power *= -t
            term = power / k
            total += term
            if abs(term) <= _EPS * abs(total):
                break
        return total
    return math.log1p(t) - t


def _log_prefactor(a, x):
    # log(x^a e^{-x} / Gamma(a)) for x > 0
    if a < 15.0:
        return a * math.log(x) - x - _log_gamma_scalar(a)
    t = (x - a) / a
    # far below the mean 1 + t = x/a may round to 0; use the logs directly
    dev = math.log(x) - math.log(a) - t if t < -0.5 else _log_rel_deviation(t)
    return (a * dev + 0.5 * math.log(a) - _HALF_LOG_2PI
            - _stirling_remainder(a))


def _log_prefactor_array(a, x):
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    small = a < 15.0
    if np.any(small):
        out[small] = a[small] * math.log(x) - x - log_gamma(a[small])
    big = ~small
    if np.any(big):
        ab = a[big]
        t = (x - ab) / ab
        with np.errstate(divide="ignore", invalid="ignore"):
            dev = np.where(np.abs(t) < 1e-3,
                           -t * t * (0.5 - t * (1.0 / 3 - t * (0.25 - t * (0.2 - t / 6)))),
                           np.where(t < -0.5, math.log(x) - np.log(ab) - t, np.log1p(t) - t))
        inv2 = 1.0 / (ab * ab)
        s = np.full_like(ab, _STIRLING[-1])
        for c in _STIRLING[-2::-1]:
            s = s * inv2 + c
        out[big] = ab * dev + 0.5 * np.log(ab) - _HALF_LOG_2PI - s / ab
    return out


def _check_gamma_args(a, x):
    if not a > 0.0:
        raise DomainError(f"incomplete gamma requires a > 0, got a={a}")
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma requires x >= 0, got x={x}")


def _max_iter(a):
    return 200 + int(30.0 * math.sqrt(a))


def _log_series(a, x):
    # log P(a, x) from the power series, valid for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_max_iter(a)):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return math.log(total) + _log_prefactor(a, x)
    raise DomainError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _log_cfrac_q(a, x):
    # log Q(a, x) from the Legendre continued fraction (modified Lentz), x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _max_iter(a) + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.log(h) + _log_prefactor(a, x)
    raise DomainError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def log_reg_lower_gamma(a: float, x: float) -> float:
    """``log P(a, x)``, computed without forming P itself.

    Returns ``-inf`` at ``x = 0``.
    """
    a = float(a)
    x = float(x)
    _check_gamma_args(a, x)
    if x == 0.0:
        return -math.inf
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return _log_series(a, x)
    return math.log1p(-math.exp(_log_cfrac_q(a, x)))


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function ``P(a, x) = gamma(a, x) / Gamma(a)``."""
    return math.exp(log_reg_lower_gamma(a, x))


def log_reg_lower_gamma_int(n_max: int, x: float) -> np.ndarray:
    """Array of ``log P(k, x)`` for the integer shapes ``k = 1..n_max``.

    For integer shape, ``P(k, x)`` is the Poisson upper tail
    ``Pr[Pois(x) >= k]`` and ``Q(k, x) = Pr[Pois(x) <= k-1]``.  Both tails are
    accumulated in log space from their small ends, and for each k the tail
    below 1/2 is used directly while the other one enters through ``log1p``.
    Cost is O(n_max + sqrt(x)) for all shapes together.
    """
    n_max = int(n_max)
    x = float(x)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if not x >= 0.0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return np.full(n_max, -np.inf)
    if math.isinf(x):
        return np.zeros(n_max)
    span = max(float(n_max), x)
    k_top = int(math.ceil(span + 40.0 * math.sqrt(span) + 50.0))
    k = np.arange(k_top + 1, dtype=float)
    # pmf(k) = x^k e^{-x} / k! = prefactor(k, x) / k for k >= 1
    log_pmf = np.empty_like(k)
    log_pmf[0] = -x
    log_pmf[1:] = _log_prefactor_array(k[1:], x) - np.log(k[1:])
    head = np.logaddexp.accumulate(log_pmf)              # log Pr[Pois <= k]
    tail = np.logaddexp.accumulate(log_pmf[::-1])[::-1]  # log Pr[Pois >= k]
    shapes = np.arange(1, n_max + 1)
    log_p = tail[shapes]
    log_q = head[shapes - 1]
    use_q = log_q < log_p
    with np.errstate(divide="ignore"):
        log_p = np.where(use_q, np.log1p(-np.exp(np.minimum(log_q, 0.0))), log_p)
    return np.minimum(log_p, 0.0)


def _erfcx_cfrac(z):
    # exp(z^2) erfc(z) for z >= 2 via the Laplace continued fraction
    # erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    f = z
    c = z
    d = 0.0
    for k in range(1, 500):
        ak = 0.5 * k
        d = z + ak * d
        if d == 0.0:
            d = _TINY
        c = z + ak / c
        if c == 0.0:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return 1.0 / (_SQRT_PI * f)


def _erf_series(z):
    # Maclaurin series, used for |z| < 2
    if z == 0.0:
        return 0.0
    z2 = z * z
    term = z
    total = z
    k = 0
    while True:
        k += 1
        term *= -z2 / k
        contrib = term / (2 * k + 1)
        total += contrib
        if abs(contrib) <= _EPS * abs(total) * 0.1:
            break
    return 2.0 / _SQRT_PI * total


_SWITCH = 2.0


def _elementwise(func):
    # scalar kernels applied element by element to array input
    @functools.wraps(func)
    def wrapper(z):
        if np.ndim(z) == 0:
            return func(z)
        arr = np.asarray(z, dtype=float)
        return np.array([func(v) for v in arr.ravel()]).reshape(arr.shape)

    return wrapper


@_elementwise
def erf(z: float) -> float:
    """Error function."""
    z = float(z)
    if z < 0.0:
        return -erf(-z)
    if z < _SWITCH:
        return _erf_series(z)
    if z > 27.0:
        return 1.0
    return 1.0 - math.exp(-z * z) * _erfcx_cfrac(z)


@_elementwise
def erfc(z: float) -> float:
    """Complementary error function ``1 - erf(z)``, accurate in the far tail."""
    z = float(z)
    if z < 0.0:
        return 2.0 - erfc(-z)
    if z < _SWITCH:
        return 1.0 - _erf_series(z)
    if z > 27.3:
        return 0.0
    return math.exp(-z * z) * _erfcx_cfrac(z)


@_elementwise
def erfcx(z: float) -> float:
    """Scaled complementary error function ``exp(z^2) erfc(z)``."""
    z = float(z)
    if z >= _SWITCH:
        return _erfcx_cfrac(z)
    return math.exp(z * z) * erfc(z)


@dataclass(frozen=True)
class ErfcAsymptoticResult:
    """Partial sum of the large-argument erfc series.

    ``truncation_bound`` is the magnitude of the first omitted term; for real
    ``z > 0`` the true remainder is smaller than this and has its sign.
    """

    value: float
    terms_used: int
    truncation_bound: float


def erfc_asymptotic(z: float, k_max: int) -> ErfcAsymptoticResult:
    """Asymptotic series ``erfc(z) ~ e^{-z^2}/(sqrt(pi) z) sum_k (-1)^k (2k-1)!!/(2z^2)^k``.

    Sums the terms ``k = 0 .. k_max-1``.
    """
    z = float(z)
    if not z > 1.0:
        raise DomainError(f"erfc_asymptotic requires z > 1, got {z}")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    lead = math.exp(-z * z) / (_SQRT_PI * z)
    inv = 1.0 / (2.0 * z * z)
    term = 1.0
    total = 0.0
    for k in range(k_max):
        total += term
        term *= -(2 * k + 1) * inv
    return ErfcAsymptoticResult(lead * total, k_max, abs(lead * term))
