"""Independent reference computations used by the tests.

Nothing here calls into the package, so agreement is a genuine cross-check.
"""
import math

import numpy as np
from scipy import integrate, special


def gauss_cdf_max_scipy(N, y):
    """prod_{k=1..N} P(k, N y^2) with scipy's regularized incomplete gamma."""
    if y <= 0:
        return 0.0
    k = np.arange(1, N + 1)
    with np.errstate(divide="ignore"):
        return float(np.exp(np.sum(np.log(special.gammainc(k, N * y * y)))))


def gauss_f2_at_1():
    """Closed form of P(|z_max| <= 1) for the Gaussian ensemble at N = 2."""
    e = math.exp(-2.0)
    return (1.0 - e) * (1.0 - 3.0 * e)


def mc_f2_disk(n_points=10_000_000, seed=12345, chunk=1_000_000):
    """Monte-Carlo P(|z_1|, |z_2| <= 1) under the N = 2 joint density.

    The joint weight |z_1 - z_2|^2 exp(-2 |z_1|^2 - 2 |z_2|^2) is split as
    Gaussian proposal times w = |z_1 - z_2|^2; the probability is the ratio
    E[w 1_disk] / E[w], with a delta-method standard error.
    """
    rng = np.random.default_rng(seed)
    sd = 0.5  # exp(-2|z|^2) has per-coordinate variance 1/4
    s_num = s_den = s_nn = s_dd = s_nd = 0.0
    done = 0
    while done < n_points:
        k = min(chunk, n_points - done)
        z = rng.normal(0.0, sd, size=(k, 4))
        w = (z[:, 0] - z[:, 2]) ** 2 + (z[:, 1] - z[:, 3]) ** 2
        inside = ((z[:, 0] ** 2 + z[:, 1] ** 2) <= 1.0) & ((z[:, 2] ** 2 + z[:, 3] ** 2) <= 1.0)
        num = w * inside
        s_num += num.sum()
        s_den += w.sum()
        s_nn += (num * num).sum()
        s_dd += (w * w).sum()
        s_nd += (num * w).sum()
        done += k
    n = float(n_points)
    mn, md = s_num / n, s_den / n
    vn = s_nn / n - mn * mn
    vd = s_dd / n - md * md
    cnd = s_nd / n - mn * md
    ratio = mn / md
    var = (vn - 2 * ratio * cnd + ratio * ratio * vd) / (md * md * n)
    return ratio, math.sqrt(var)


def log_norm_scipy(v, N, n, lo, hi):
    """log of 2 pi int_lo^hi r^{2n+1} e^{-N V(r)} dr by scipy.integrate.quad with a peak shift."""
    f = lambda r: (2 * n + 1) * math.log(r) - N * v(r) if r > 0 else -math.inf
    grid = np.linspace(max(lo, 1e-12), hi, 2001)
    shift = max(f(r) for r in grid)
    val, _ = integrate.quad(lambda r: math.exp(f(r) - shift) if r > 0 else 0.0, lo, hi,
                            epsabs=0, epsrel=1e-12, limit=500,
                            points=[grid[int(np.argmax([f(r) for r in grid]))]])
    return math.log(val) + shift + math.log(2 * math.pi)
