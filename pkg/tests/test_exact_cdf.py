import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from coulomb_extremes import exact_cdf as X
from coulomb_extremes import potential as P
from coulomb_extremes.curves import EdgeKind
from coulomb_extremes.errors import DomainError

import oracles


def test_gaussian_closed_form_small_cases():
    assert math.exp(X.gaussian_log_cdf_max(1, 1.0)) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert math.exp(X.gaussian_log_cdf_max(2, 1.0)) == pytest.approx(oracles.gauss_f2_at_1(), rel=1e-14)
    assert X.gaussian_log_cdf_max(10, 0.0) == -math.inf


@pytest.mark.parametrize("N", [1, 7, 50, 400, 3000])
@pytest.mark.parametrize("y", [0.6, 0.95, 1.0, 1.05, 1.3])
def test_gaussian_closed_form_vs_scipy(N, y):
    ref = oracles.gauss_cdf_max_scipy(N, y)
    got = math.exp(X.gaussian_log_cdf_max(N, y))
    assert got == pytest.approx(ref, rel=1e-10, abs=1e-300)


def test_tail_only_is_labeled_and_close():
    full = X.gaussian_log_cdf_max(500, 1.05)
    approx = X.gaussian_log_cdf_max(500, 1.05, tail_only=100)
    assert approx >= full
    assert approx == pytest.approx(full, abs=1e-8)
    c = X.cdf_curve(P.gauss(), 50, "outer", [0.9, 1.1], tail_only=10)
    assert c.meta["approximate"] is True


def test_full_norms_gaussian():
    # h_n(inf) = pi Gamma(n+1) / N^{n+1}
    N = 40
    got = X.full_log_norms(P.gauss(), N)
    n = np.arange(N)
    ref = math.log(math.pi) - (n + 1) * math.log(N) + special.gammaln(n + 1)
    assert np.allclose(got, ref, rtol=0, atol=1e-11)


@pytest.mark.parametrize("p,N,n,lo,hi", [
    (P.cubic(1 / 3), 30, 12, 0.0, 1.1),
    (P.halfquadlin(-1.0), 20, 5, 1.2, 20.0),
    (P.quadlin(-1.0), 25, 24, 0.0, 1.3),
])
def test_truncated_norm_vs_scipy_quad(p, N, n, lo, hi):
    kind = EdgeKind.OUTER if lo == 0.0 else EdgeKind.INNER
    y = hi if kind is EdgeKind.OUTER else lo
    got = X.log_norm(p, N, n, y, kind)
    ref = oracles.log_norm_scipy(p.v, N, n, lo, hi if kind is EdgeKind.OUTER else p.r_max_hint)
    assert got == pytest.approx(ref, abs=1e-9)


def test_closed_form_agrees_with_quadrature():
    for N in (3, 30):
        for y in (0.7, 1.0, 1.2):
            a = X.gaussian_log_cdf_max(N, y)
            b = X.log_cdf_general(P.gauss(), N, y, "outer")
            assert a == pytest.approx(b, abs=1e-9)


def test_boundary_values():
    p = P.cubic(1 / 3)
    assert X.log_cdf_general(p, 10, 0.0, "outer") == -math.inf
    assert X.log_cdf_general(p, 10, 0.0, "inner") == 0.0
    assert X.log_cdf_general(p, 10, 1e6, "outer") == 0.0
    with pytest.raises(DomainError):
        X.log_cdf_general(p, 10, -1.0, "outer")


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(min_value=0.5, max_value=1.6), min_size=2, max_size=6))
def test_outer_cdf_monotone(ys):
    ys = sorted(ys)
    c = X.cdf_curve(P.cubic(1 / 3), 20, "outer", ys)
    assert c.is_monotone(increasing=True, atol=1e-14)
    assert np.all((c.values >= 0) & (c.values <= 1))


@settings(max_examples=10, deadline=None)
@given(st.lists(st.floats(min_value=0.3, max_value=1.5), min_size=2, max_size=6))
def test_inner_cdf_monotone_decreasing(ys):
    ys = sorted(ys)
    c = X.cdf_curve(P.halfquadlin(-1.0), 20, "inner", ys)
    assert c.is_monotone(increasing=False, atol=1e-14)


def test_gaussian_monotone_dense_grid():
    c = X.cdf_curve(P.gauss(), 200, "outer", np.linspace(0.8, 1.3, 200))
    assert c.is_monotone(increasing=True, atol=0.0)


def test_ratio_table_fields():
    t = X.norm_ratio_table(P.cubic(1 / 3), 8, 1.2, "outer")
    assert len(t.n_values) == 8
    assert np.all(t.log_ratios <= 0.0)


def test_curve_clamps_negative_y():
    from coulomb_extremes.asymptotics import ScalingMap

    s = ScalingMap.gauss_outer(5)
    c = X.cdf_curve(P.gauss(), 5, "outer", [-40.0, 0.0], scaling=s)
    assert c.flags[0] and not c.flags[1]
    assert c.values[0] == 0.0


def test_closed_form_rejected_for_other_potentials():
    with pytest.raises(DomainError):
        X.cdf_curve(P.cubic(1 / 3), 5, "outer", [1.0], method="gaussian-closed-form")
