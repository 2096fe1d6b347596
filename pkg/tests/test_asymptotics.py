import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from coulomb_extremes import asymptotics as A
from coulomb_extremes import potential as P
from coulomb_extremes.errors import DomainError, SmallNError


def _alpha_ref(N, a=1.0, F=4.0):
    arg = math.log(N) - 2 * math.log(math.log(N)) - math.log(2 * math.pi) + math.log(a * a * F / 4)
    return math.sqrt(abs(arg) / 2)


@pytest.mark.parametrize("N", [10, 100, 1000, 1e6])
def test_alpha_gauss(N):
    assert A.alpha_gauss(N) == pytest.approx(_alpha_ref(N), rel=1e-14)


def test_alpha_1000_value():
    assert A.alpha_gauss(1000) == pytest.approx(0.776076, abs=1e-6)


def test_alpha_outer_reduces_to_gauss():
    for N in (50, 1e4):
        assert A.alpha_outer(N, 1.0, 4.0) == A.alpha_gauss(N)


def test_alpha_folded_flag():
    assert A.ScalingMap.gauss_outer(100).folded
    assert not A.ScalingMap.gauss_outer(1000).folded


def test_small_n_rejected():
    with pytest.raises(SmallNError):
        A.alpha_gauss(2)
    with pytest.raises(SmallNError):
        A.ScalingMap.gauss_outer(1)


def test_inner_needs_annulus():
    with pytest.raises(DomainError):
        A.ScalingMap.for_edges(P.support_edges(P.gauss()), 100, "inner")


@settings(max_examples=50)
@given(st.floats(min_value=-10, max_value=10), st.sampled_from([10, 500, 1e5]))
def test_scaling_round_trip(Y, N):
    for s in (A.ScalingMap.gauss_outer(N),
              A.ScalingMap.for_edges(P.support_edges(P.halfquadlin(-1.0)), N, "inner")):
        assert s.Y_from_y(s.y_from_Y(Y)) == pytest.approx(Y, abs=1e-9)


def test_inner_scaling_points_inward():
    s = A.ScalingMap.inner(500, 1.0, 1.0)
    assert s.y_from_Y(0.0) < 1.0
    assert s.y_from_Y(2.0) < s.y_from_Y(0.0)


def test_gumbel_values():
    assert A.gumbel_cdf(0.0) == pytest.approx(math.exp(-1))
    assert A.gumbel_cdf(-1000.0) == 0.0
    assert np.allclose(A.gumbel_cdf(np.array([0.0, 50.0])), [math.exp(-1), 1.0])


def _phi_ref(s, Y):
    sig = s.sigma(Y)
    pref = s.a_edge * math.sqrt(s.N * s.f_edge) / (2 * math.sqrt(2))
    return -pref * (math.exp(-sig * sig) / math.sqrt(math.pi) - sig * special.erfc(sig))


@pytest.mark.parametrize("N", [10, 100, 1e4])
@pytest.mark.parametrize("Y", [-4.0, -1.0, 0.0, 3.0, 8.0])
def test_phi_vs_scipy_formula(N, Y):
    s = A.ScalingMap.gauss_outer(N)
    assert A.phi(s, Y) == pytest.approx(_phi_ref(s, Y), rel=1e-11, abs=1e-300)


def test_phi_vectorized():
    s = A.ScalingMap.outer(100, 2 ** (1 / 3), 3 * 2 ** (1 / 3))
    Y = np.linspace(-4, 8, 7)
    assert np.allclose(A.phi(s, Y), [A.phi(s, v) for v in Y], rtol=0, atol=0)


def test_phi_approaches_gumbel():
    # the corrections decay like 1/log N
    Y = np.linspace(-2, 4, 25)
    gaps = [np.max(np.abs(np.exp(A.phi(A.ScalingMap.gauss_outer(N), Y)) - A.gumbel_cdf(Y)))
            for N in (1e4, 1e10, 1e30, 1e100)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02


def test_phi_series_alternates_around_phi():
    s = A.ScalingMap.gauss_outer(1e6)
    for Y in (0.0, 2.0, 4.0):
        exact = A.phi(s, Y)
        p5 = A.phi_series(s, Y, 5)
        p6 = A.phi_series(s, Y, 6)
        assert (exact - p5) * (exact - p6) < 0


def test_series_scale_is_log_n():
    s = A.ScalingMap.gauss_outer(1e6)
    # the k = 1 term at Y = 0 equals -log N / (2 sigma^2)
    t1 = A.phi_series_term(s, 0.0, 1)
    assert t1 == pytest.approx(-math.log(1e6) / (2 * s.alpha ** 2), rel=1e-12)


def test_series_domain():
    s = A.ScalingMap.gauss_outer(1e6)
    with pytest.raises(DomainError):
        A.phi_series(s, -2 * s.alpha ** 2, 3)
    with pytest.raises(DomainError):
        A.phi_series(s, 0.0, 0)


def test_first_log_correction_matches_phi():
    # phi / (-e^{-Y}) - 1 -> c_1(Y) / log N as N -> infinity
    Y = 0.5
    N = 1e60
    s = A.ScalingMap.gauss_outer(N)
    lhs = (A.phi(s, Y) / -math.exp(-Y) - 1.0) * math.log(N)
    assert lhs == pytest.approx(A.first_log_correction(s, Y), rel=0.15)


def test_phi_undropped_close_to_phi():
    s = A.ScalingMap.gauss_outer(1e4)
    for Y in (-1.0, 0.0, 2.0):
        assert A.phi_undropped(s, Y) == pytest.approx(A.phi(s, Y), rel=0.05)
    with pytest.raises(DomainError):
        A.phi_undropped(A.ScalingMap.outer(100, 1.0, 4.0), 0.0)


def test_curves_carry_metadata():
    s = A.ScalingMap.gauss_outer(100)
    c = A.phi_curve(s, [0.0, 1.0])
    assert c.meta["method"] == "asymptotic-phi"
    assert c.y[0] == pytest.approx(s.y_from_Y(0.0))
    g = A.gumbel_curve([0.0])
    assert g.values[0] == pytest.approx(math.exp(-1))
