"""Radially symmetric confining potentials and their eigenvalue support.

A potential is given by V(r) together with its first two derivatives.  The
limiting eigenvalue density is supported on the ring a_- <= |z| <= a_+ with

    V'(a_-) = 0            (a_- = 0 when V' > 0 everywhere)
    a_+ V'(a_+) = 2

and density (V'(r)/r + V''(r)) / (4 pi) per unit area on that ring.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    AmbiguousEdgeError,
    BracketError,
    DegenerateEdgeError,
    DomainError,
    EvaluationError,
    InadmissiblePotentialError,
)

__all__ = [
    "RadialPotential",
    "SupportEdges",
    "Topology",
    "AdmissibilityReport",
    "gauss",
    "cubic",
    "quadlin",
    "halfquadlin",
    "poly",
    "custom",
    "parse_potential",
    "check_admissible",
    "solve_inner_edge",
    "solve_outer_edge",
    "edge_curvatures",
    "support_edges",
    "density",
]

GRID_POINTS = 1000
GRID_SPAN = 1e-9  # smallest grid radius relative to r_max_hint
CONFINEMENT_MARGIN = 10.0
BISECT_WIDTH = 1e-10
NEWTON_STEPS = 5
DEGENERATE_F = 1e-8  # curvatures at or below this count as a flat (multi-critical) edge

Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Radial potential V(r) with analytic first and second derivatives.

    The three callables must accept numpy arrays (and plain floats).
    """

    id: str
    v: Func
    v1: Func
    v2: Func
    r_max_hint: float

    def __post_init__(self):
        if not (self.r_max_hint > 0 and math.isfinite(self.r_max_hint)):
            raise DomainError(f"r_max_hint must be positive and finite, got {self.r_max_hint}")

    def grid(self, points: int = GRID_POINTS) -> np.ndarray:
        """Log-spaced radii in (0, r_max_hint]."""
        return np.geomspace(self.r_max_hint * GRID_SPAN, self.r_max_hint, points)

    def rv1(self, r):
        return r * self.v1(r)


class Topology(str, enum.Enum):
    DISK = "Disk"
    ANNULUS = "Annulus"


@dataclass(frozen=True)
class SupportEdges:
    a_minus: float
    a_plus: float
    f_plus: float
    f_minus: Optional[float] = None

    @property
    def topology(self) -> Topology:
        return Topology.ANNULUS if self.a_minus > 0.0 else Topology.DISK

    def as_dict(self) -> dict:
        return {
            "a_minus": self.a_minus,
            "a_plus": self.a_plus,
            "f_minus": self.f_minus,
            "f_plus": self.f_plus,
            "topology": self.topology.value,
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the numerical admissibility checks.

    ``confining`` is condition (i), V(r) - log r^2 growing without bound;
    ``rv1_increasing`` is condition (ii), r V'(r) strictly increasing from the
    inner edge outward.  ``rv1_increasing_global`` records whether the
    stronger statement on all of (0, r_max_hint] holds as well.
    """

    potential_id: str
    confining: bool
    rv1_increasing: bool
    rv1_increasing_global: bool
    first_violation_radius: Optional[float] = None
    violated: Optional[str] = None
    messages: tuple = field(default_factory=tuple)

    @property
    def admissible(self) -> bool:
        return self.confining and self.rv1_increasing

    def __str__(self):
        if self.admissible:
            return f"potential {self.potential_id!r} is admissible"
        where = "" if self.first_violation_radius is None else f" at r={self.first_violation_radius:.6g}"
        return f"potential {self.potential_id!r} is inadmissible: {self.violated} fails{where}"

    def as_dict(self) -> dict:
        return {
            "potential": self.potential_id,
            "admissible": self.admissible,
            "confining": self.confining,
            "rv1_increasing": self.rv1_increasing,
            "rv1_increasing_global": self.rv1_increasing_global,
            "first_violation_radius": self.first_violation_radius,
            "violated": self.violated,
        }


# ---------------------------------------------------------------------------
# root finding


def _bisect(func, lo, hi, width=BISECT_WIDTH):
    f_lo = func(lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton(func, dfunc, r, lo, hi, tol):
    for _ in range(NEWTON_STEPS):
        f = func(r)
        if abs(f) < tol:
            break
        d = dfunc(r)
        if d == 0.0 or not math.isfinite(d):
            break
        step = r - f / d
        if not lo <= step <= hi:
            break
        r = step
    return r


def _first_bracket(values):
    """Index i of the first grid interval [i, i+1] over which `values` changes sign."""
    s = np.sign(values)
    changes = np.nonzero(s[:-1] * s[1:] <= 0)[0]
    return changes


def _scalar(f, r):
    val = float(f(r))
    if not math.isfinite(val):
        raise EvaluationError(f"non-finite potential evaluation at r={r!r}", r=r)
    return val


def _on_grid(f, grid):
    vals = np.asarray(f(grid), dtype=float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        r = float(grid[np.argmax(bad)])
        raise EvaluationError(f"non-finite potential evaluation at r={r!r}", r=r)
    return vals


def solve_inner_edge(p: RadialPotential) -> float:
    """Inner support radius a_-, the positive zero of V' (0 if V' > 0 throughout)."""
    grid = p.grid()
    d1 = _on_grid(p.v1, grid)
    if np.all(d1 > 0.0):
        return 0.0
    changes = _first_bracket(d1)
    if len(changes) == 0:
        raise BracketError(f"V' <= 0 on all of (0, {p.r_max_hint}]; potential is not confining")
    # a zero on a grid point shows up in two adjacent intervals
    distinct = {int(i) + (1 if d1[i + 1] == 0.0 else 0) for i in changes}
    if len(distinct) > 1 or d1[0] > 0.0:
        raise AmbiguousEdgeError(
            f"V' changes sign {len(distinct)} times on (0, {p.r_max_hint}]; inner edge is not unique"
        )
    i = int(changes[0])
    lo, hi = float(grid[i]), float(grid[i + 1])
    f = lambda r: _scalar(p.v1, r)
    root = _bisect(f, lo, hi)
    tol = 1e-12 * max(1.0, abs(_scalar(p.v2, root)))
    return _newton(f, lambda r: _scalar(p.v2, r), root, lo, hi, 0.25 * tol)


def _outer_equation(p):
    return (lambda r: r * _scalar(p.v1, r) - 2.0,
            lambda r: _scalar(p.v1, r) + r * _scalar(p.v2, r))


def solve_outer_edge(p: RadialPotential, a_minus: Optional[float] = None) -> float:
    """Outer support radius a_+, the solution of a_+ V'(a_+) = 2 beyond a_-."""
    if a_minus is None:
        a_minus = solve_inner_edge(p)
    grid = p.grid()
    grid = grid[grid > a_minus]
    g = _on_grid(p.rv1, grid) - 2.0
    above = np.nonzero(g > 0.0)[0]
    if len(above) == 0:
        raise BracketError(
            f"r V'(r) never reaches 2 on ({a_minus}, {p.r_max_hint}]; raise r_max_hint"
        )
    j = int(above[0])
    lo = float(grid[j - 1]) if j > 0 else float(a_minus)
    hi = float(grid[j])
    f, df = _outer_equation(p)
    root = _bisect(f, lo, hi)
    return _newton(f, df, root, lo, hi, 2.5e-13)


def edge_curvatures(p: RadialPotential, a_minus: float, a_plus: float):
    """Curvatures (F_+, F_-) at the outer and inner edges.

    F_+ = V'(a_+)/a_+ + V''(a_+) and F_- = V''(a_-); F_- is None for a disk.
    """
    f_plus = _scalar(p.v1, a_plus) / a_plus + _scalar(p.v2, a_plus)
    if not f_plus > DEGENERATE_F:
        raise DegenerateEdgeError(f"F_+ = {f_plus} is not positive at a_+ = {a_plus} (multi-critical edge)")
    f_minus = None
    if a_minus > 0.0:
        f_minus = _scalar(p.v2, a_minus)
        if not f_minus > DEGENERATE_F:
            raise DegenerateEdgeError(f"F_- = {f_minus} is not positive at a_- = {a_minus} (multi-critical edge)")
    return f_plus, f_minus


def support_edges(p: RadialPotential) -> SupportEdges:
    """Solve both edges and their curvatures for one potential."""
    a_minus = solve_inner_edge(p)
    a_plus = solve_outer_edge(p, a_minus)
    f_plus, f_minus = edge_curvatures(p, a_minus, a_plus)
    return SupportEdges(a_minus=a_minus, a_plus=a_plus, f_plus=f_plus, f_minus=f_minus)


def check_admissible(p: RadialPotential) -> AdmissibilityReport:
    """Numerical check of confinement and monotonicity of r V'(r).

    Confinement is judged by comparing V(r) - log r^2 at ``r_max_hint``
    against its value at a_+.  Monotonicity of r V'(r) is required from a_-
    outward, which is the region where eigenvalues live and where the saddle
    point of every orthogonal-monomial norm lies.
    """
    grid = p.grid()
    v = _on_grid(p.v, grid)
    _on_grid(p.v2, grid)
    rv1 = _on_grid(p.rv1, grid)
    increments = np.diff(rv1)
    bad_global = np.nonzero(increments <= 0.0)[0]
    global_ok = len(bad_global) == 0

    try:
        a_minus = solve_inner_edge(p)
        a_plus = solve_outer_edge(p, a_minus)
    except (BracketError, AmbiguousEdgeError) as exc:
        confining = False
        if isinstance(exc, AmbiguousEdgeError):
            return AdmissibilityReport(p.id, True, False, global_ok,
                                       float(grid[bad_global[0] + 1]) if not global_ok else None,
                                       "rv1_increasing", (str(exc),))
        return AdmissibilityReport(p.id, confining, global_ok, global_ok, float(grid[-1]),
                                   "confining", (str(exc),))

    r_top = float(grid[-1])
    excess_top = float(v[-1]) - math.log(r_top * r_top)
    excess_edge = _scalar(p.v, a_plus) - math.log(a_plus * a_plus)
    confining = excess_top > excess_edge + CONFINEMENT_MARGIN

    # pairs whose left end is at or beyond the inner edge
    region = grid[:-1] >= a_minus
    bad = np.nonzero(region & (increments <= 0.0))[0]
    rv1_ok = len(bad) == 0

    first = None
    violated = None
    if not confining:
        first, violated = r_top, "confining"
    elif not rv1_ok:
        first, violated = float(grid[bad[0] + 1]), "rv1_increasing"
    return AdmissibilityReport(p.id, confining, rv1_ok, global_ok, first, violated)


def require_admissible(p: RadialPotential) -> AdmissibilityReport:
    report = check_admissible(p)
    if not report.admissible:
        raise InadmissiblePotentialError(report)
    return report


def density(p: RadialPotential, edges: SupportEdges, r):
    """Limiting eigenvalue density per unit area at |z| = r (zero off the ring)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("density requires r >= 0")
    inside = (r_arr >= edges.a_minus) & (r_arr <= edges.a_plus) & (r_arr > 0)
    safe = np.where(inside, r_arr, 1.0)
    value = np.where(inside, (p.v1(safe) / safe + p.v2(safe)) / (4.0 * math.pi), 0.0)
    if np.ndim(r) == 0:
        return float(value)
    return value


# ---------------------------------------------------------------------------
# constructors


def _default_r_max(v, v1):
    """10 x (radius where V exceeds V(a_+) by 50), capped at 1e3."""
    cap = 1e3
    r = 1.0
    while r * float(v1(r)) <= 2.0:
        r *= 2.0
        if r > cap:
            return cap
    a_plus = _bisect(lambda s: s * float(v1(s)) - 2.0, r / 2.0 if r > 1.0 else 0.0, r)
    target = float(v(a_plus)) + 50.0
    hi = max(a_plus, 1e-3)
    while float(v(hi)) < target:
        hi *= 2.0
        if hi > cap:
            return cap
    r_far = _bisect(lambda s: float(v(s)) - target, a_plus, hi, width=1e-8)
    return min(10.0 * r_far, cap)


def custom(id: str, v: Func, v1: Func, v2: Func, r_max_hint: Optional[float] = None) -> RadialPotential:
    """Wrap user-supplied callables into a RadialPotential."""
    if r_max_hint is None:
        r_max_hint = _default_r_max(v, v1)
    return RadialPotential(id, v, v1, v2, float(r_max_hint))


def poly(*coeffs: float, id: Optional[str] = None) -> RadialPotential:
    """V(r) = sum_k coeffs[k-1] r^k (coefficients are 1-indexed powers)."""
    if not coeffs:
        raise DomainError("poly needs at least one coefficient")
    c = np.array(coeffs, dtype=float)
    powers = np.arange(1, len(c) + 1, dtype=float)

    def v(r):
        r = np.asarray(r, dtype=float)
        return np.sum(c * np.power.outer(r, powers), axis=-1)

    def v1(r):
        r = np.asarray(r, dtype=float)
        return np.sum(c * powers * np.power.outer(r, powers - 1), axis=-1)

    def v2(r):
        r = np.asarray(r, dtype=float)
        return np.sum(c * powers * (powers - 1) * np.power.outer(r, np.maximum(powers - 2, 0)), axis=-1)

    if id is None:
        id = "poly:" + ",".join(repr(float(x)) for x in coeffs)
    return custom(id, v, v1, v2)


def gauss() -> RadialPotential:
    """V(r) = r^2, the Ginibre ensemble."""
    return custom("gauss", lambda r: r * r, lambda r: 2.0 * r, lambda r: 2.0 + 0.0 * r)


def cubic(c: float) -> RadialPotential:
    """V(r) = c r^3."""
    c = float(c)
    return custom(f"cubic:{c!r}", lambda r: c * r ** 3, lambda r: 3.0 * c * r * r,
                  lambda r: 6.0 * c * r)


def quadlin(s: float) -> RadialPotential:
    """V(r) = r^2 + s r (annulus for s < 0)."""
    s = float(s)
    return custom(f"quadlin:{s!r}", lambda r: r * r + s * r, lambda r: 2.0 * r + s,
                  lambda r: 2.0 + 0.0 * r)


def halfquadlin(s: float) -> RadialPotential:
    """V(r) = r^2/2 + s r (annulus for s < 0)."""
    s = float(s)
    return custom(f"halfquadlin:{s!r}", lambda r: 0.5 * r * r + s * r, lambda r: r + s,
                  lambda r: 1.0 + 0.0 * r)


def parse_potential(text: str) -> RadialPotential:
    """Parse ``gauss | cubic:<c> | quadlin:<s> | halfquadlin:<s> | poly:<c1>,<c2>,...``."""
    text = text.strip()
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "gauss":
            if arg:
                raise DomainError("gauss takes no parameter")
            return gauss()
        if name == "cubic":
            return cubic(float(arg))
        if name == "quadlin":
            return quadlin(float(arg))
        if name == "halfquadlin":
            return halfquadlin(float(arg))
        if name == "poly":
            coeffs = [float(x) for x in arg.split(",") if x.strip()]
            return poly(*coeffs)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot parse potential {text!r}: {exc}") from None
    raise DomainError(
        f"unknown potential {text!r}; expected gauss, cubic:<c>, quadlin:<s>, halfquadlin:<s> or poly:<c1>,..."
    )
