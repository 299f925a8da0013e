import math

import pytest

from neel_lab.core.errors import DomainError
from neel_lab.services.bcs import (
    F_BCS_ZERO,
    BcsCurve,
    alpha0,
    c1_fn,
    f_bcs,
    f_bcs_prime,
    g_fn,
    h_fn,
    j_closed_form,
    j_fn,
)
from neel_lab.services.numerics import EULER_GAMMA
from neel_lab.services.neel import solve_neel

pytestmark = pytest.mark.unit


def test_j_vanishes_at_bcs_ratio():
    assert abs(j_fn(F_BCS_ZERO, 0.0)) < 1e-8


def test_j_zero_temperature_closed_form():
    expected = math.log(math.pi) - EULER_GAMMA - math.log(2.0)
    assert j_fn(2.0, 0.0) == pytest.approx(expected, abs=1e-10)
    assert j_closed_form(2.0, 0.0) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("y", [0.2, 0.5, 0.9])
def test_j_matches_closed_form(x, y):
    assert abs(j_fn(x, y) - j_closed_form(x, y)) < 1e-8


def test_j_decreasing_in_x():
    for y in (0.0, 0.3, 0.6, 0.9):
        for i in range(8):
            x = 0.2 + 0.4 * i
            assert j_fn(x + 0.1, y) < j_fn(x, y)


def test_j_domain():
    with pytest.raises(DomainError):
        j_fn(0.0, 0.5)
    with pytest.raises(DomainError):
        j_fn(1.0, 1.5)


def test_h_function():
    assert h_fn(5.0) < h_fn(0.5)
    assert h_fn(50.0) == 0.0
    with pytest.raises(DomainError):
        h_fn(0.0)


def test_f_bcs_values():
    assert f_bcs(0.0) == pytest.approx(1.76388, abs=1e-5)
    assert f_bcs(0.0) == pytest.approx(F_BCS_ZERO, abs=1e-11)
    assert f_bcs(1.0) == 0.0
    half = f_bcs(0.5)
    assert 0.0 < half < F_BCS_ZERO
    assert half < f_bcs(0.25)


def test_f_bcs_domain():
    with pytest.raises(DomainError):
        f_bcs(-0.1)
    with pytest.raises(DomainError):
        f_bcs_prime(0.97)


def test_f_bcs_prime():
    assert f_bcs_prime(0.0) == 0.0
    assert f_bcs_prime(0.5) < 0.0
    y = 1e-3
    assert abs(y * f_bcs_prime(y)) < 1e-4


def test_f_bcs_prime_matches_finite_difference():
    h = 1e-4
    numeric = (f_bcs(0.6 + h) - f_bcs(0.6 - h)) / (2 * h)
    assert f_bcs_prime(0.6) == pytest.approx(numeric, rel=1e-6)


def test_curve(bcs_curve):
    assert bcs_curve.interp_error < 1e-7
    assert bcs_curve.y_max == 0.95
    assert bcs_curve.f(0.0) == pytest.approx(F_BCS_ZERO, abs=1e-11)
    assert bcs_curve.f(0.37) == pytest.approx(f_bcs(0.37), abs=1e-7)
    # f_bcs is flat to underflow near y = 0
    assert all(v <= 0 for v in bcs_curve.fprime_values)
    assert all(v < 0 for v in bcs_curve.fprime_values if abs(v) > 1e-300)
    assert bcs_curve.fprime_values[-1] < 0
    with pytest.raises(DomainError):
        bcs_curve.f(0.99)


def test_curve_prefactor(bcs_curve):
    y = 0.5
    assert bcs_curve.prefactor(y) == pytest.approx(bcs_curve.f(y) - y * bcs_curve.fprime(y))
    assert bcs_curve.prefactor(y) > bcs_curve.f(y)


@pytest.mark.slow
def test_small_curve_builds():
    curve = BcsCurve.build(y_max=0.5, n_nodes=49)
    assert curve.y_max == pytest.approx(0.5)
    assert curve.f(0.25) == pytest.approx(f_bcs(0.25), abs=1e-7)


def test_c1_at_zero():
    assert abs(c1_fn(0.0) - 0.04576) < 2e-4
    assert abs(alpha0() - 0.02594) < 2e-4


def test_c1_with_and_without_curve(bcs_curve):
    assert c1_fn(0.5, bcs_curve) == pytest.approx(c1_fn(0.5), rel=1e-5)


@pytest.mark.slow
def test_g_shrinks_with_coupling(dos_3d, bcs_curve):
    values = []
    for U in (1.0, 0.7, 0.5):
        t_n = solve_neel(U, 0.5, dos_3d).t_n
        values.append(abs(g_fn(U, 0.5, 0.0, t_n, dos_3d, bcs_curve)))
    assert values[0] > values[1] > values[2]


def test_g_domain(dos_3d, dos_2d):
    with pytest.raises(DomainError):
        g_fn(1.0, 0.5, 0.0, 0.0, dos_3d)
    with pytest.raises(DomainError):
        g_fn(1.0, 0.0, 0.0, 0.1, dos_2d)
    with pytest.raises(DomainError):
        g_fn(1.0, 0.7, 0.0, 0.1, dos_3d)


@pytest.mark.parametrize("y", [0.0, 0.2, 0.4, 0.6, 0.8])
def test_c1_tracks_the_bcs_curve(bcs_curve, y):
    difference = c1_fn(y, bcs_curve) - alpha0(bcs_curve) * bcs_curve.f(y)
    assert -1e-4 <= difference <= 0.0011
