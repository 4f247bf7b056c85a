import numpy as np
import pytest

from abelcycles.exceptions import DomainError
from abelcycles.hamiltonian import SystemParams, hamiltonian
from abelcycles.montecarlo import bounding_box, compare, estimate, membership

P = SystemParams()


def test_membership_of_landmarks():
    origin = np.array([0.0]), np.array([0.0])
    assert membership(1, *origin, 1.0, P)[0]
    assert membership(2, *origin, 1.0, P)[0]
    a1 = np.array([2.19]), np.array([1.897])
    assert membership(4, *a1, 5.0, P)[0]
    assert membership(3, *a1, 2.5, P)[0]
    assert not membership(4, -a1[0], a1[1], 5.0, P)[0]


def test_box_contains_level_curve():
    x0, x1, y0, y1 = bounding_box(1, -1.0, P)
    for x, y in ((x0, 0.0), (x1, 0.0), (0.0, y0), (0.0, y1)):
        assert hamiltonian(x, y, P) < -1.0


def test_out_of_range():
    with pytest.raises(DomainError):
        estimate(3, 1.0, P, samples=10)


@pytest.mark.parametrize("family,h", [(1, 0.5), (2, 1.0), (3, 2.5), (4, 5.0)])
def test_small_sample_agreement(family, h):
    cmp = compare(family, h, P, samples=200_000, seed=11)
    assert max(cmp.sigmas()) < 4.0
    assert max(cmp.rel_errors()) < 0.03


def test_seeded_runs_repeat():
    a = estimate(2, 1.0, P, samples=50_000, seed=5)
    b = estimate(2, 1.0, P, samples=50_000, seed=5)
    assert a == b
