"""Monte-Carlo samplers for the extreme moduli and ECDF utilities.

Three routes are provided:

* Kostlan: for V(r) = r^2 the squared moduli are, as a set, independent
  Gamma(k, 1)/N variables, k = 1..N.
* inverse CDF: for any radial potential the moduli are independent with
  per-n densities proportional to r^{2n+1} e^{-N V(r)}; each is sampled by
  inverting a tabulated CDF.
* Metropolis: a direct simulation of the Coulomb gas.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence`` with
``spawn_key=(stream_id, block)``, so replica blocks are independent streams
and results do not depend on the order in which blocks are processed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import io
from .curves import CdfCurve, EdgeKind
from .errors import DomainError, QuadratureError
from .exact_cdf import _cut_range, _Integrand
from .potential import RadialPotential, support_edges

__all__ = [
    "RngConfig",
    "ExtremeSampleSet",
    "GasConfiguration",
    "MetropolisResult",
    "InverseCdfTables",
    "sample_gauss_extreme_kostlan",
    "build_invcdf_tables",
    "sample_general_extreme_invcdf",
    "metropolis_run",
    "total_energy",
    "occupation_fraction",
    "radial_histogram",
    "extremes_from_snapshots",
    "empirical_cdf",
    "ks_distance",
    "ks_statistic",
    "ks_two_sample",
    "dkw_band",
    "write_sample_csv",
    "read_sample_csv",
]

BLOCK = 256            # replicas per RNG substream
TABLE_POINTS = 2048
TABLE_LOG_CUT = 45.0   # density below e^-45 of its peak is outside the table
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class RngConfig:
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            val = getattr(self, name)
            if not 0 <= int(val) < 2 ** 64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer")

    def generator(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),) + tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))

    def as_dict(self) -> dict:
        return {"seed": int(self.seed), "stream": int(self.stream_id)}


@dataclass
class ExtremeSampleSet:
    values: np.ndarray
    method: str
    edge_kind: EdgeKind
    N: int
    rng: RngConfig
    potential: str = "gauss"
    burn_in: Optional[int] = None
    thinning: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size < 1:
            raise DomainError("a sample set needs at least one value")
        if np.any(self.values < 0):
            raise DomainError("moduli must be non-negative")

    @property
    def m(self) -> int:
        return int(self.values.size)

    def meta(self) -> dict:
        out = {
            "potential": self.potential,
            "N": self.N,
            "m": self.m,
            "method": self.method,
            "edge": self.edge_kind.value,
            "seed": int(self.rng.seed),
            "stream": int(self.rng.stream_id),
        }
        if self.burn_in is not None:
            out["burn_in"] = self.burn_in
            out["thin"] = self.thinning
        return out


def _blocks(m):
    for b, start in enumerate(range(0, m, BLOCK)):
        yield b, min(BLOCK, m - start)


def _reduce(moduli, edge_kind):
    return moduli.max(axis=1) if edge_kind is EdgeKind.OUTER else moduli.min(axis=1)


def sample_gauss_extreme_kostlan(N: int, m: int, rng: RngConfig = RngConfig(),
                                 edge_kind=EdgeKind.OUTER) -> ExtremeSampleSet:
    """Extreme modulus of m Ginibre-distributed eigenvalue sets via Gamma variables."""
    N, m = int(N), int(m)
    if N < 1 or m < 1:
        raise DomainError("N and m must be >= 1")
    edge_kind = EdgeKind.parse(edge_kind)
    shapes = np.arange(1, N + 1, dtype=float)
    out = np.empty(m)
    pos = 0
    for b, size in _blocks(m):
        gen = rng.generator(b)
        g = gen.standard_gamma(shapes, size=(size, N))
        out[pos:pos + size] = np.sqrt(_reduce(g, edge_kind) / N)
        pos += size
    return ExtremeSampleSet(out, "kostlan", edge_kind, N, rng, potential="gauss")


# ---------------------------------------------------------------------------
# inverse CDF


@dataclass
class InverseCdfTables:
    """Per-n tabulated CDFs of the modulus densities r^{2n+1} e^{-N V(r)}."""

    potential: str
    N: int
    radii: np.ndarray   # (N, TABLE_POINTS)
    cdf: np.ndarray     # (N, TABLE_POINTS), 0 at the first node, 1 at the last
    _inverse: list = field(default_factory=list, repr=False)

    def inverse(self, n: int) -> PchipInterpolator:
        if not self._inverse:
            for r, c in zip(self.radii, self.cdf):
                cu, idx = np.unique(c, return_index=True)
                self._inverse.append(PchipInterpolator(cu, r[idx], extrapolate=False))
        return self._inverse[n]

    def sample_moduli(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms u of shape (k, N) to moduli, column n through table n."""
        out = np.empty_like(u)
        for n in range(self.N):
            col = np.clip(u[:, n], self.cdf[n, 0], self.cdf[n, -1])
            out[:, n] = self.inverse(n)(col)
        return out


def build_invcdf_tables(p: RadialPotential, N: int, points: int = TABLE_POINTS) -> InverseCdfTables:
    N = int(N)
    edges = support_edges(p)
    radii = np.empty((N, points))
    cdf = np.empty((N, points))
    for start in range(0, N, 64):
        n_block = np.arange(start, min(start + 64, N))
        integ = _Integrand(p, N, n_block)
        r0 = integ.saddles(edges.a_minus, edges.a_plus, p.r_max_hint)
        peak, top, left, right = _cut_range(integ, r0, 0.0, p.r_max_hint, log_cut=TABLE_LOG_CUT)
        nodes = left[:, None] + (right - left)[:, None] * np.linspace(0.0, 1.0, points)[None, :]
        a = nodes[:, :-1]
        half = 0.5 * (nodes[:, 1:] - a)
        x = (a + half)[:, :, None] + half[:, :, None] * _GL_X[None, None, :]
        rows = len(n_block)
        logf = integ.c[:, None, None] * np.log(x) - N * np.asarray(p.v(x))
        cells = (np.exp(logf - top[:, None, None]) @ _GL_W) * half
        cum = np.concatenate([np.zeros((rows, 1)), np.cumsum(cells, axis=1)], axis=1)
        total = cum[:, -1]
        if not np.all(np.isfinite(total) & (total > 0)):
            raise QuadratureError("inverse-CDF table construction produced a non-positive mass")
        radii[n_block] = nodes
        cdf[n_block] = cum / total[:, None]
    return InverseCdfTables(p.id, N, radii, cdf)


def sample_general_extreme_invcdf(p: RadialPotential, N: int, m: int, rng: RngConfig = RngConfig(),
                                  edge_kind=EdgeKind.OUTER,
                                  tables: Optional[InverseCdfTables] = None) -> ExtremeSampleSet:
    """Extreme modulus for an arbitrary radial potential by inverting per-n CDFs."""
    N, m = int(N), int(m)
    if N < 1 or m < 1:
        raise DomainError("N and m must be >= 1")
    edge_kind = EdgeKind.parse(edge_kind)
    if tables is None:
        tables = build_invcdf_tables(p, N)
    out = np.empty(m)
    pos = 0
    for b, size in _blocks(m):
        u = rng.generator(b).random((size, N))
        out[pos:pos + size] = _reduce(tables.sample_moduli(u), edge_kind)
        pos += size
    return ExtremeSampleSet(out, "inverse-cdf", edge_kind, N, rng, potential=p.id)


# ---------------------------------------------------------------------------
# Metropolis


@dataclass
class GasConfiguration:
    points: np.ndarray  # (N, 2) array of (x, y)
    energy: float       # N^2 S_eff
    potential: str
    N: int

    @property
    def moduli(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def __repr__(self):
        return f"GasConfiguration(potential={self.potential!r}, N={self.N}, energy={self.energy:.10g})"


@dataclass
class MetropolisResult:
    snapshots: List[GasConfiguration]
    proposals: int
    accepted: int
    singular_rejections: int
    max_energy_drift: float
    eta: float
    burn_in: int
    thin: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def __iter__(self):
        return iter(self.snapshots)

    def __repr__(self):
        return (f"MetropolisResult(snapshots={len(self.snapshots)}, acceptance_rate={self.acceptance_rate:.4f}, "
                f"singular_rejections={self.singular_rejections}, max_energy_drift={self.max_energy_drift:.3g})")

    def __len__(self):
        return len(self.snapshots)


def total_energy(p: RadialPotential, N: int, x: np.ndarray, y: np.ndarray) -> float:
    """N^2 S_eff = N sum_i V(|z_i|) - 2 sum_{j<k} log |z_j - z_k|."""
    r = np.hypot(x, y)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    iu = np.triu_indices(len(x), 1)
    d2 = dx[iu] ** 2 + dy[iu] ** 2
    return float(N * math.fsum(np.asarray(p.v(r), dtype=float)) - math.fsum(np.log(d2)))


def metropolis_run(p: RadialPotential, N: int, sweeps: int, eta: float = 1.0,
                   rng: RngConfig = RngConfig(), burn_in: Optional[int] = None,
                   thin: Optional[int] = None, check_every: int = 100) -> MetropolisResult:
    """Metropolis simulation of the Coulomb gas with weight exp(-N^2 S_eff).

    One sweep is N single-particle proposals.  A proposal moves a random
    particle by (eta/N) times a standard normal in each coordinate and is
    accepted when exp(dE) > u with dE = E_old - E_new (so dE > 0 always
    accepts).  ``burn_in`` sweeps (default 20 N) are discarded, then
    ``sweeps`` production sweeps follow with a snapshot every ``thin`` sweeps
    (default N).  Every ``check_every`` sweeps the running energy is compared
    with a fresh evaluation; the largest relative discrepancy is reported.
    """
    N = int(N)
    if N < 2:
        raise DomainError("the Coulomb gas needs N >= 2")
    if not eta > 0:
        raise DomainError("eta must be positive")
    burn_in = 20 * N if burn_in is None else int(burn_in)
    thin = N if thin is None else int(thin)
    if thin < 1 or sweeps < 0 or burn_in < 0:
        raise DomainError("sweeps, burn_in must be >= 0 and thin >= 1")

    gen = rng.generator()
    x = gen.uniform(-1.0, 1.0, N)
    y = gen.uniform(-1.0, 1.0, N)
    energy = total_energy(p, N, x, y)
    step = eta / N
    v = p.v
    accepted = singular = 0
    drift = 0.0
    snapshots: List[GasConfiguration] = []
    total_sweeps = burn_in + int(sweeps)

    for sweep in range(1, total_sweeps + 1):
        picks = gen.integers(0, N, size=N)
        noise = gen.standard_normal((N, 2)) * step
        log_u = np.log(gen.random(N))
        for t in range(N):
            k = picks[t]
            xo = x[k]
            yo = y[k]
            xn = xo + noise[t, 0]
            yn = yo + noise[t, 1]
            d2_old = (x - xo) ** 2 + (y - yo) ** 2
            d2_new = (x - xn) ** 2 + (y - yn) ** 2
            d2_old[k] = 1.0
            d2_new[k] = 1.0
            if not np.all(d2_new > 0.0):
                singular += 1
                continue
            d_e = (N * (float(v(math.hypot(xo, yo))) - float(v(math.hypot(xn, yn))))
                   + float(np.sum(np.log(d2_new / d2_old))))
            if d_e > log_u[t]:
                x[k] = xn
                y[k] = yn
                energy -= d_e
                accepted += 1
        if check_every and sweep % check_every == 0:
            fresh = total_energy(p, N, x, y)
            drift = max(drift, abs(energy - fresh) / max(abs(fresh), 1e-300))
        if sweep > burn_in and (sweep - burn_in) % thin == 0:
            snapshots.append(GasConfiguration(np.column_stack([x, y]).copy(), energy, p.id, N))

    return MetropolisResult(snapshots, total_sweeps * N, accepted, singular, drift, eta, burn_in, thin)


def occupation_fraction(snapshots: Sequence[GasConfiguration], radius: float) -> float:
    """Time-averaged fraction of particles with |z| <= radius."""
    if not snapshots:
        raise DomainError("no snapshots")
    return float(np.mean([np.mean(s.moduli <= radius) for s in snapshots]))


def radial_histogram(snapshots: Sequence[GasConfiguration], bins=50, r_max=None):
    """Pooled histogram of |z| over snapshots, normalized to unit total mass."""
    if not snapshots:
        raise DomainError("no snapshots")
    r = np.concatenate([s.moduli for s in snapshots])
    if r_max is None:
        r_max = float(r.max())
    counts, edges = np.histogram(r, bins=bins, range=(0.0, r_max))
    return edges, counts / r.size


def extremes_from_snapshots(result: MetropolisResult, rng: RngConfig,
                            edge_kind=EdgeKind.OUTER) -> ExtremeSampleSet:
    edge_kind = EdgeKind.parse(edge_kind)
    if not result.snapshots:
        raise DomainError("no snapshots")
    mods = np.array([s.moduli for s in result.snapshots])
    snap = result.snapshots[0]
    return ExtremeSampleSet(_reduce(mods, edge_kind), "metropolis", edge_kind, snap.N, rng,
                            potential=snap.potential, burn_in=result.burn_in, thinning=result.thin)


def write_sample_csv(samples: ExtremeSampleSet, stream) -> None:
    """One value per line under ``# key=value`` metadata lines."""
    io.write_csv(io.Table.from_columns({"value": samples.values}, samples.meta()), stream)


def read_sample_csv(stream) -> ExtremeSampleSet:
    t = io.read_csv(stream)
    m = t.meta
    burn = m.get("burn_in")
    return ExtremeSampleSet(
        t.column("value"), m.get("method", "unknown"), EdgeKind.parse(m.get("edge", "outer")),
        int(m.get("N", 0)), RngConfig(int(m.get("seed", 0)), int(m.get("stream", 0))),
        potential=m.get("potential", "unknown"),
        burn_in=None if burn is None else int(burn),
        thinning=None if burn is None else int(m["thin"]),
    )


# ---------------------------------------------------------------------------
# empirical CDFs and distances


def empirical_cdf(samples, grid) -> CdfCurve:
    """Right-continuous step ECDF of the sample values on a grid of raw moduli."""
    if isinstance(samples, ExtremeSampleSet):
        values = samples.values
        meta = samples.meta()
    else:
        values = np.asarray(samples, dtype=float)
        meta = {}
    if values.size == 0:
        raise DomainError("empty sample")
    grid = np.asarray(grid, dtype=float)
    srt = np.sort(values)
    ecdf = np.searchsorted(srt, grid, side="right") / srt.size
    meta = dict(meta, method="empirical")
    return CdfCurve(grid, ecdf, meta)


def ks_distance(c1: CdfCurve, c2: CdfCurve) -> float:
    """sup |c1 - c2| over c1's abscissae, with c2 interpolated there (linear, monotone)."""
    if len(c1) == 0 or len(c2) == 0:
        raise DomainError("empty curve")
    other = np.interp(c1.abscissa, c2.abscissa, c2.values)
    return float(np.max(np.abs(c1.values - other)))


def ks_statistic(values, cdf_values) -> float:
    """One-sample Kolmogorov-Smirnov statistic given the model CDF at each sample value."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("empty sample")
    order = np.argsort(values)
    f = np.asarray(cdf_values, dtype=float)[order]
    m = values.size
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("empty sample")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def dkw_band(m: int, confidence: float = 0.99) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band for m samples."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * m))
