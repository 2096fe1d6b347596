"""Exact finite-N distribution of the extreme moduli.

For a radial weight the orthogonal polynomials are monomials, so the
restricted partition function factorizes over n = 0..N-1 and

    P(|z_max| <= y) = prod_n h_n(y) / h_n(inf),   h_n(y) = 2 pi int_0^y r^{2n+1} e^{-N V(r)} dr
    P(|z_min| >= y) = prod_n h~_n(y) / h~_n(0),   h~_n(y) = 2 pi int_y^inf r^{2n+1} e^{-N V(r)} dr

Everything is evaluated in log space.  The norms are computed by adaptive
Gauss-Kronrod quadrature of exp(N f_n(r) - M_n) with N f_n(r) = (2n+1) log r
- N V(r) and M_n the maximum of N f_n over the integration range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .curves import CdfCurve, EdgeKind
from .errors import DomainError, QuadratureError
from .potential import RadialPotential, support_edges
from .specfun import log_reg_lower_gamma_int

__all__ = [
    "NormRatioTable",
    "gaussian_log_cdf_max",
    "log_norm",
    "log_norms",
    "full_log_norms",
    "norm_ratio_table",
    "log_cdf_general",
    "cdf_curve",
]

RTOL = 1e-10
MAX_DEPTH = 60
LOG_CUT = 60.0      # integrand below exp(-LOG_CUT) of its maximum is dropped
CHUNK = 64          # n values integrated together on one adaptive partition
MAX_INITIAL = 4000
_LOG_2PI = math.log(2.0 * math.pi)

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XK_HALF = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])


@dataclass
class NormRatioTable:
    """Per-n truncated and full log norms at one y."""

    n_values: np.ndarray
    log_h_truncated: np.ndarray
    log_h_full: np.ndarray
    y: float
    edge_kind: EdgeKind

    @property
    def log_ratios(self) -> np.ndarray:
        return np.minimum(self.log_h_truncated - self.log_h_full, 0.0)


# ---------------------------------------------------------------------------
# Gaussian closed form


def gaussian_log_cdf_max(N: int, y: float, tail_only: Optional[int] = None) -> float:
    """log P(|z_max| <= y) for V(r) = r^2: sum_{n<N} log P(n+1, N y^2).

    ``tail_only=k`` keeps only the k factors with n >= N-k (approximate).
    """
    N = int(N)
    if N < 1:
        raise DomainError("N must be >= 1")
    if y < 0:
        raise DomainError("y must be >= 0")
    if y == 0.0:
        return -math.inf
    terms = log_reg_lower_gamma_int(N, N * y * y)
    if tail_only is not None:
        terms = terms[max(N - int(tail_only), 0):]
    return float(math.fsum(terms))


# ---------------------------------------------------------------------------
# saddle points and cut radii


def _bisect_vec(func, lo, hi, iters=200):
    # func increasing on each [lo_i, hi_i]; returns the root of func = 0
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = func(mid) > 0.0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
        if np.all(hi - lo <= 4e-16 * np.maximum(hi, 1e-300)):
            break
    return 0.5 * (lo + hi)


class _Integrand:
    """N f_n(r) = (2n+1) log r - N V(r) for a block of n values."""

    def __init__(self, p: RadialPotential, N: int, n_values: np.ndarray):
        self.p = p
        self.N = N
        self.n = np.asarray(n_values, dtype=float)
        self.c = (2.0 * self.n + 1.0)

    def log_f(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c[:, None] * np.log(r)[None, :] - self.N * np.asarray(self.p.v(r))[None, :]

    def log_f_rows(self, r):
        # r has one entry per row
        with np.errstate(divide="ignore"):
            return self.c * np.log(r) - self.N * np.asarray(self.p.v(r))

    def saddles(self, a_minus, a_plus, r_hi):
        # r V'(r) = (2n+1)/N has a unique root beyond a_-
        target = self.c / self.N
        top = max(a_plus, min(r_hi, 2.0 * a_plus))
        lo = np.full_like(target, max(a_minus, 0.0))
        hi = np.full_like(target, top)
        return _bisect_vec(lambda r: self.p.rv1(r) - target, lo, hi)

    def curvature(self, r):
        # |d^2/dr^2 N f_n| at r
        return np.abs(self.c / (r * r) + self.N * np.asarray(self.p.v2(r)))


def _cut_range(integ: _Integrand, r0, lo, hi, log_cut=LOG_CUT):
    """Clip [lo, hi] per row to where N f_n >= M_n - log_cut."""
    peak = np.clip(r0, lo, hi)
    top = integ.log_f_rows(peak)
    thresh = top - log_cut
    lo_arr = np.full_like(peak, lo)
    hi_arr = np.full_like(peak, hi)
    with np.errstate(invalid="ignore"):
        need_lo = (peak > lo) & ~(integ.log_f_rows(np.maximum(lo_arr, 1e-300)) >= thresh)
        need_hi = (peak < hi) & ~(integ.log_f_rows(hi_arr) >= thresh)
    left = lo_arr.copy()
    right = hi_arr.copy()
    if np.any(need_lo):
        idx = np.nonzero(need_lo)[0]
        sub = _Integrand(integ.p, integ.N, integ.n[idx])
        left[idx] = _bisect_vec(lambda r: sub.log_f_rows(r) - thresh[idx],
                                np.maximum(lo_arr[idx], 0.0), peak[idx], iters=80)
    if np.any(need_hi):
        idx = np.nonzero(need_hi)[0]
        sub = _Integrand(integ.p, integ.N, integ.n[idx])
        right[idx] = _bisect_vec(lambda r: thresh[idx] - sub.log_f_rows(r),
                                 peak[idx], hi_arr[idx], iters=80)
    return peak, top, left, right


def _gk_adaptive(integ: _Integrand, lo, hi, shift, n_init, rtol=RTOL, max_depth=MAX_DEPTH):
    """Row-wise integral of exp(log_f - shift) on [lo, hi], one shared partition."""
    rows = len(integ.n)
    edges = np.linspace(lo, hi, n_init + 1)
    a = edges[:-1]
    b = edges[1:]
    depth = np.zeros(len(a), dtype=int)
    acc = np.zeros(rows)
    length = hi - lo
    while a.size:
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = mid[:, None] + half[:, None] * _XK[None, :]
        vals = np.exp(integ.log_f(x.ravel()) - shift[:, None]).reshape(rows, len(a), 15)
        k15 = (vals @ _WK) * half
        g7 = (vals[:, :, _G_IDX] @ _WG) * half
        err = np.abs(k15 - g7)
        total = acc + k15.sum(axis=1)
        allow = rtol * total[:, None] * ((2.0 * half) / length)[None, :]
        ok = np.all(err <= allow + 1e-300, axis=0)
        acc += k15[:, ok].sum(axis=1)
        bad = ~ok
        if not np.any(bad):
            break
        if np.any(depth[bad] >= max_depth):
            raise QuadratureError(f"adaptive quadrature did not converge after depth {max_depth}")
        a_bad, b_bad, m_bad = a[bad], b[bad], mid[bad]
        a = np.concatenate([a_bad, m_bad])
        b = np.concatenate([m_bad, b_bad])
        depth = np.concatenate([depth[bad], depth[bad]]) + 1
    return acc


def _log_norm_block(p, N, n_values, lo, hi, edges, rtol=RTOL):
    integ = _Integrand(p, N, n_values)
    r0 = integ.saddles(edges.a_minus, edges.a_plus, p.r_max_hint)
    peak, top, left, right = _cut_range(integ, r0, lo, hi)
    a = float(np.min(left))
    b = float(np.max(right))
    if not b > a:
        # range narrower than rounding: the integrand is constant there
        return top + math.log(max(hi - lo, 0.0)) + _LOG_2PI if hi > lo else np.full(len(top), -np.inf)
    width = 1.0 / np.sqrt(np.maximum(integ.curvature(peak), 1e-300))
    n_init = int(min(MAX_INITIAL, max(4, math.ceil((b - a) / (0.5 * float(np.min(width)))))))
    acc = _gk_adaptive(integ, a, b, top, n_init, rtol=rtol)
    with np.errstate(divide="ignore"):
        return np.log(acc) + top + _LOG_2PI


def _range(p, y, edge_kind, full):
    if full:
        return 0.0, p.r_max_hint
    if edge_kind is EdgeKind.OUTER:
        return 0.0, min(float(y), p.r_max_hint)
    return max(float(y), 0.0), p.r_max_hint


def _norms(p, N, y, edge_kind, n_values, full, edges=None):
    N = int(N)
    edge_kind = EdgeKind.parse(edge_kind)
    if n_values is None:
        n_values = np.arange(N)
    n_values = np.asarray(n_values, dtype=int)
    if np.any((n_values < 0) | (n_values >= N)):
        raise DomainError("n must satisfy 0 <= n < N")
    if edges is None:
        edges = support_edges(p)
    lo, hi = _range(p, y, edge_kind, full)
    out = np.empty(len(n_values))
    if hi <= lo:
        out[:] = -np.inf
        return out
    for start in range(0, len(n_values), CHUNK):
        block = n_values[start:start + CHUNK]
        out[start:start + CHUNK] = _log_norm_block(p, N, block, lo, hi, edges)
    return out


def full_log_norms(p: RadialPotential, N: int, n_values=None, edges=None) -> np.ndarray:
    """log h_n over the whole half line, for each n (default n = 0..N-1)."""
    return _norms(p, N, None, EdgeKind.OUTER, n_values, True, edges)


def log_norms(p: RadialPotential, N: int, y: float, edge_kind, n_values=None, edges=None) -> np.ndarray:
    """Truncated log norms: [0, y] for OUTER, [y, inf) for INNER."""
    return _norms(p, N, y, edge_kind, n_values, False, edges)


def log_norm(p: RadialPotential, N: int, n: int, y: float, edge_kind) -> float:
    """log of 2 pi int r^{2n+1} e^{-N V(r)} dr over [0, y] (OUTER) or [y, inf) (INNER).

    ``y = inf`` (OUTER) or ``y = 0`` (INNER) gives the full norm.
    """
    if y < 0:
        raise DomainError("y must be >= 0")
    edge_kind = EdgeKind.parse(edge_kind)
    full = (edge_kind is EdgeKind.OUTER and math.isinf(y)) or (edge_kind is EdgeKind.INNER and y == 0)
    return float(_norms(p, N, y, edge_kind, [n], full)[0])


def norm_ratio_table(p: RadialPotential, N: int, y: float, edge_kind,
                     full: Optional[np.ndarray] = None, edges=None) -> NormRatioTable:
    edge_kind = EdgeKind.parse(edge_kind)
    if edges is None:
        edges = support_edges(p)
    if full is None:
        full = full_log_norms(p, N, edges=edges)
    trunc = log_norms(p, N, y, edge_kind, edges=edges)
    return NormRatioTable(np.arange(int(N)), trunc, np.asarray(full), float(y), edge_kind)


def log_cdf_general(p: RadialPotential, N: int, y: float, edge_kind,
                    full: Optional[np.ndarray] = None, tail_only: Optional[int] = None,
                    edges=None) -> float:
    """Quadrature value of log P(|z_max| <= y) (OUTER) or log P(|z_min| >= y) (INNER)."""
    edge_kind = EdgeKind.parse(edge_kind)
    y = float(y)
    if y < 0:
        raise DomainError("y must be >= 0")
    if edge_kind is EdgeKind.OUTER:
        if y == 0.0:
            return -math.inf
        if y >= p.r_max_hint:
            return 0.0
    elif y == 0.0:
        return 0.0
    if edges is None:
        edges = support_edges(p)
    n_values = np.arange(int(N))
    if tail_only is not None:
        n_values = n_values[max(int(N) - int(tail_only), 0):]
    if full is None:
        full = full_log_norms(p, N, n_values, edges=edges)
    elif len(full) != len(n_values):
        full = np.asarray(full)[n_values]
    trunc = log_norms(p, N, y, edge_kind, n_values, edges=edges)
    with np.errstate(invalid="ignore"):
        ratios = np.minimum(trunc - full, 0.0)
    if np.any(np.isneginf(ratios)):
        return -math.inf
    return float(math.fsum(ratios))


def _use_closed_form(p, edge_kind):
    return p.id == "gauss" and edge_kind is EdgeKind.OUTER


def cdf_curve(p: RadialPotential, N: int, edge_kind, grid: Sequence[float], scaling=None,
              method: Optional[str] = None, tail_only: Optional[int] = None) -> CdfCurve:
    """Exact CDF on a grid.

    With ``scaling`` (a ScalingMap) the grid is in the rescaled variable Y and
    each point is mapped to y first; without it the grid is raw y.  ``method``
    may force "quadrature" or "gaussian-closed-form"; by default the closed
    form is used for the Gaussian potential at the outer edge.
    """
    edge_kind = EdgeKind.parse(edge_kind)
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid must be sorted ascending")
    if method is None:
        method = "gaussian-closed-form" if _use_closed_form(p, edge_kind) else "quadrature"
    if method == "gaussian-closed-form" and not _use_closed_form(p, edge_kind):
        raise DomainError("the closed form applies only to the Gaussian potential at the outer edge")

    ys = grid if scaling is None else np.array([scaling.y_from_Y(Y) for Y in grid])
    flags = ys < 0
    ys_eval = np.where(flags, 0.0, ys)

    log_vals = np.empty(len(grid))
    if method == "gaussian-closed-form":
        for i, y in enumerate(ys_eval):
            log_vals[i] = gaussian_log_cdf_max(N, y, tail_only)
    elif method == "quadrature":
        edges = support_edges(p)
        n_values = np.arange(int(N))
        if tail_only is not None:
            n_values = n_values[max(int(N) - int(tail_only), 0):]
        full = full_log_norms(p, N, n_values, edges=edges)
        for i, y in enumerate(ys_eval):
            log_vals[i] = log_cdf_general(p, N, y, edge_kind, full=full, tail_only=tail_only, edges=edges)
    else:
        raise DomainError(f"unknown exact method {method!r}")

    meta = {
        "N": int(N),
        "potential": p.id,
        "method": method,
        "edge_kind": edge_kind.value,
    }
    if tail_only is not None:
        meta["tail_only"] = int(tail_only)
        meta["approximate"] = True
    return CdfCurve(
        abscissa=grid,
        values=np.exp(log_vals),
        meta=meta,
        y=None if scaling is None else ys,
        flags=flags,
    )
