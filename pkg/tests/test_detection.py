import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abelcycles.detection import (
    GUARD_BAND,
    abelian_integral,
    boundary_value,
    default_grid,
    detection_curve,
    detection_value,
    divergence,
    divergence_direct,
    g1_theta,
    g_theta,
    lambda_j,
    lambda_on_interval,
)
from abelcycles.exceptions import DomainError
from abelcycles.hamiltonian import OrbitFamily, SystemParams, theta_bounds

P = SystemParams()
P10 = SystemParams(n=10, mu=5, beta=5)


def test_divergence_examples():
    assert divergence(0.0, 0.0, P.replace(lambda0=1.5)) == pytest.approx(-3.0)
    assert divergence(1.0, 0.0, P.replace(u=1.0, v=0.0)) == pytest.approx(11.0)


def test_divergence_independent_of_split():
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-2, 2, (2, 1000))
    ref = divergence_direct(x, y, P.replace(mu=6, beta=6, lambda0=0.4))
    other = divergence_direct(x, y, P.replace(mu=12, beta=0, lambda0=0.4))
    np.testing.assert_allclose(other, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_g_theta():
    assert g_theta(0.0, 12, 2.0, 5.0) == pytest.approx(2.0)
    assert g1_theta(0.0, 2.0, 5.0) == pytest.approx(2.0)
    assert g_theta(math.pi / 4, 12, 1.0, 1.0) == pytest.approx(1 / 32)
    assert g1_theta(math.pi / 4, 1.0, 1.0) == pytest.approx(1.0)
    assert g_theta(math.pi / 2, 12, 2.0, 5.0) == pytest.approx(5.0)
    assert g1_theta(math.pi / 2, 2.0, 5.0) == pytest.approx(5.0)


def test_spot_values_at_degree_ten():
    s = lambda_j(2, 0.01, P10)
    assert (s.cu, s.cv) == pytest.approx((-0.001875, -0.001876), abs=5e-6)
    s = lambda_j(1, -2.0, P10)
    assert (s.cu / 1e4, s.cv / 1e4) == pytest.approx((4.933, 1.373), rel=1e-3)
    s = lambda_j(3, 2.06, P10)
    assert (s.cu / 1e4, s.cv / 1e4) == pytest.approx((3.0463, 0.8177), rel=1e-3)
    s = lambda_j(4, 8.2, P10)
    assert (s.cu / 1e4, s.cv / 1e4) == pytest.approx((1.6041, 0.3842), rel=1e-3)


def test_gamma2_small_h_law():
    for params in (P, P10):
        s = lambda_j(2, 0.01, params)
        assert 0.5 * (s.cu + s.cv) / 0.01 == pytest.approx(-3 / 16, rel=5e-3)
    s = lambda_j(2, 1e-4, P)
    # the inner orbit is nearly the circle r^2 = h/2
    assert s.area == pytest.approx(math.pi * 1e-4 / 2, rel=1e-3)


def test_gamma4_mirror_interval():
    h = 5.0
    tb = theta_bounds(h, P)
    up = lambda_j(4, h, P)
    down = lambda_on_interval(4, h, P, -tb.theta2, -tb.theta1)
    assert down.cu == pytest.approx(up.cu, rel=1e-10)
    assert down.cv == pytest.approx(up.cv, rel=1e-10)


def test_range_and_guard_band():
    with pytest.raises(DomainError):
        lambda_j(3, 1.5, P)
    with pytest.raises(DomainError):
        lambda_j(2, -0.1, P)
    with pytest.raises(DomainError):
        lambda_j(3, 2.0 + 0.5 * GUARD_BAND, P)
    with pytest.raises(DomainError):
        lambda_j(4, 9.0, P)


def test_boundary_values():
    assert boundary_value(2, 0.0, P).cu == 0.0
    s3, s4 = boundary_value(3, 3.0, P), boundary_value(4, 3.0, P)
    assert (s3.cu, s3.cv) == (s4.cu, s4.cv)
    assert s4.area == pytest.approx(0.5 * s3.area)
    top = boundary_value(4, P.h_center_a, P)
    near = lambda_j(4, P.h_center_a - 1e-5, P)
    assert near.cu == pytest.approx(top.cu, rel=1e-3)
    with pytest.raises(DomainError):
        boundary_value(1, 1.0, P)


def test_homoclinic_one_sided_limits():
    a = lambda_j(3, 3 - 1e-6, P10)
    b = lambda_j(4, 3 + 1e-6, P10)
    assert a.cu == pytest.approx(b.cu, rel=2e-3)


def test_abelian_integral():
    s = lambda_j(2, 0.51, P10)
    p = P10.replace(u=1.0, v=0.0, lambda0=0.0)
    assert abelian_integral(2, 0.51, p) == pytest.approx(2 * s.area * -0.097701, rel=1e-3)
    assert abs(abelian_integral(2, 0.51, P10.replace(lambda0=s.value(P.u, P.v)))) < 1e-12
    assert abelian_integral(1, -1.0, P.replace(u=0.0, v=0.0, lambda0=0.0)) == 0.0


def test_detection_value_matches_coefficients():
    value, sample = detection_value(3, 2.5, P)
    assert value == pytest.approx(sample.value(P.u, P.v), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(1, -1.5), (1, 1.2), (2, 0.7), (3, 2.4), (4, 6.1)]),
       st.floats(-5, 5), st.floats(-5, 5))
def test_linearity_in_u_v(case, u, v):
    fam, h = case
    value, sample = detection_value(fam, h, P.replace(u=u, v=v))
    scale = max(abs(sample.cu * u), abs(sample.cv * v), 1e-300)
    assert abs(value - sample.value(u, v)) <= 1e-12 * scale


def test_curve_errors_and_default_grids():
    with pytest.raises(DomainError):
        detection_curve(1, [], P)
    with pytest.raises(DomainError):
        detection_curve(1, [0.5, 0.1], P)
    with pytest.raises(DomainError, match="Gamma3"):
        detection_curve(3, [1.5, 2.5], P)
    sizes = {f: default_grid(f, P).size for f in OrbitFamily}
    assert sizes == {OrbitFamily.GAMMA1: 41, OrbitFamily.GAMMA2: 22,
                     OrbitFamily.GAMMA3: 51, OrbitFamily.GAMMA4: 47}


def test_gamma4_interior_maximum_near_3_16():
    curve = detection_curve(4, default_grid(4, P10), P10)
    assert curve.h[int(np.argmax(curve.cu))] == pytest.approx(3.16)


def test_parallel_sampling_is_identical():
    grid = default_grid(3, P)
    a = detection_curve(3, grid, P)
    b = detection_curve(3, grid, P, workers=3)
    assert a.samples == b.samples
