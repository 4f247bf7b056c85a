import math

import numpy as np
import pytest

from abelcycles.exceptions import QuadratureError
from abelcycles.quadrature import integrate, integrate_sqrt_endpoints


def test_basic_integrals():
    assert integrate(np.sin, 0, math.pi, 1e-13).value == pytest.approx(2.0, abs=1e-12)
    assert integrate(lambda t: np.ones_like(t), 0, 1).value == pytest.approx(1.0, abs=1e-14)
    wallis = 2 * math.pi * 10395 / 46080
    assert integrate(lambda t: np.cos(t) ** 12, 0, 2 * math.pi, 1e-12).value == pytest.approx(wallis, abs=1e-11)


def test_sqrt_endpoints():
    r = integrate_sqrt_endpoints(lambda t: np.sqrt(np.maximum(1 - t, 0)), 0, 1, 1e-12, left=False)
    assert r.value == pytest.approx(2 / 3, abs=1e-10)
    r = integrate_sqrt_endpoints(lambda t: np.sqrt(np.maximum(t * (1 - t), 0)), 0, 1, 1e-12)
    assert r.value == pytest.approx(math.pi / 8, abs=1e-10)


def test_sqrt_substitution_matches_plain_rule():
    f = lambda t: np.exp(t) * np.cos(3 * t)
    a = integrate(f, 0.2, 1.7, 1e-12).value
    b = integrate_sqrt_endpoints(f, 0.2, 1.7, 1e-12).value
    assert a == pytest.approx(b, abs=1e-10)


def test_vector_integrand_shares_mesh():
    f = lambda t: np.vstack([np.sin(t), t * t, np.sin(t) + 2 * t * t])
    r = integrate(f, 0, 2, 1e-12)
    assert r.value[2] == pytest.approx(r.value[0] + 2 * r.value[1], abs=1e-14)


def test_degenerate_and_bad_args():
    assert integrate(np.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        integrate(np.sin, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(np.sin, 0.0, 1.0, tol=0)


def test_cap_raises_with_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda t: 1 / np.sqrt(np.abs(t - 0.3)), 0, 1, tol=1e-14, max_intervals=16)
    assert info.value.value is not None
