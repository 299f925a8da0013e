import math

import numpy as np
import pytest

from neel_lab.core.errors import DomainError
from neel_lab.schemas.schemas import ComplexPoint
from neel_lab.services.asymptotics import n0_series, n_tz0_series
from neel_lab.services.dos import (
    DosEvaluator,
    band_edge,
    build_interpolant,
    get_dos,
    kink_points,
    n0,
    n0_continued,
    n0_fast,
    n0_tilde,
    n_tz,
    n_tz_taylor,
)
from neel_lab.services.numerics import central_derivative


@pytest.mark.unit
def test_support_and_band_edge():
    assert band_edge(0.0) == 4.0
    assert band_edge(0.5) == 5.0
    assert n0(4.5) == 0.0
    assert n_tz(5.1, 0.5) == 0.0


@pytest.mark.unit
def test_kink_points():
    assert kink_points(0.0) == []
    assert kink_points(0.5) == [1.0, 3.0]
    # 2 t_z = 4 - 2 t_z collapses to a single kink
    assert kink_points(1.0) == [2.0]


@pytest.mark.unit
def test_evenness():
    assert n0(-1.3) == n0(1.3)
    assert n_tz(-0.3, 0.5) == n_tz(0.3, 0.5)


@pytest.mark.unit
def test_n0_diverges_at_zero():
    with pytest.raises(DomainError):
        n0(0.0)
    with pytest.raises(DomainError):
        n0_fast(0.0)


@pytest.mark.unit
def test_n0_fast_keeps_the_log_below_the_elliptic_range():
    # eps^2/16 underflows long before eps reaches the smallest double
    for eps in (1e-9, 1e-160, 1e-200, 1e-300):
        value = n0_fast(eps)
        assert math.isfinite(value)
        assert value == pytest.approx(math.log(16.0 / eps) / (2.0 * math.pi ** 2), rel=1e-14)
    below, above = n0_fast(0.999999e-8), n0_fast(1.000001e-8)
    assert below > above
    assert below - above < 1e-6


@pytest.mark.unit
@pytest.mark.parametrize("t_z", [0.5, 1.0, 1.5])
def test_n_tz_finite_across_the_band(t_z):
    values = [n_tz(float(eps), t_z) for eps in np.linspace(0.0, band_edge(t_z), 101)]
    assert all(math.isfinite(v) and v >= 0.0 for v in values)
    assert all(v > 0.0 for v in values[:-1])
    assert values[-1] == 0.0


@pytest.mark.unit
def test_n_tz_continuous_at_the_log_kink():
    # eps = 2 t_z is where the log point of N0 leaves the arcsine window
    at_kink = n_tz(1.0, 0.5)
    for offset in (1e-13, 1e-10, 1e-7):
        assert abs(n_tz(1.0 - offset, 0.5) - at_kink) < 10.0 * math.sqrt(offset)
        assert abs(n_tz(1.0 + offset, 0.5) - at_kink) < 10.0 * math.sqrt(offset)


@pytest.mark.unit
def test_n_tz_between_nodes_matches_interpolant(dos_3d):
    # points next to eps = 2 t_z carry the nearly coincident log singularities
    for eps in (0.3, 0.65, 0.75, 0.8, 0.9, 0.999, 1.001, 1.1):
        assert dos_3d(eps) == pytest.approx(n_tz(eps, 0.5), abs=2e-8)


@pytest.mark.unit
@pytest.mark.parametrize("t_z", [0.0, 2.0, -0.1])
def test_n_tz_rejects_hopping_outside_window(t_z):
    with pytest.raises(DomainError):
        n_tz(0.5, t_z)


@pytest.mark.unit
def test_n0_matches_small_eps_series():
    assert abs(n0(0.1) - n0_series(0.1)) < 5e-13


@pytest.mark.unit
def test_elliptic_fast_path_matches_quadrature():
    for eps in np.linspace(0.01, 3.99, 100):
        assert abs(n0_fast(float(eps)) - n0(float(eps))) < 1e-10


@pytest.mark.unit
def test_n_tz_at_zero_matches_small_tz_series():
    assert abs(n_tz(0.0, 0.5) - n_tz0_series(0.5)) < 1e-6


@pytest.mark.unit
def test_n0_tilde_on_the_real_axis():
    for eps in (0.5, 1.0, 2.0, 3.0):
        value = n0_tilde(complex(eps, 0.0))
        assert abs(value - n0(eps)) < 1e-9


@pytest.mark.unit
def test_n0_tilde_accepts_complex_point():
    assert n0_tilde(ComplexPoint(re=2.0)) == pytest.approx(n0(2.0), abs=1e-9)


@pytest.mark.unit
@pytest.mark.parametrize("r", [0.5, 1.5, 3.0])
def test_n0_tilde_reflection(r):
    value = n0_tilde(complex(-r, 1e-6))
    assert abs(value.real - n0(r)) < 1e-5


@pytest.mark.unit
def test_n0_tilde_panel_counts_agree():
    one = n0_tilde(2j)
    four = n0_tilde(2j, panels=4)
    assert abs(one - four) < 1e-9
    assert np.isfinite(one.real) and np.isfinite(one.imag)


@pytest.mark.unit
@pytest.mark.parametrize("z", [complex(1.0, -0.1), complex(-1.0, 0.0), complex(4.0, 0.0)])
def test_n0_tilde_domain(z):
    with pytest.raises(DomainError):
        n0_tilde(z)


@pytest.mark.unit
def test_continued_series_matches_quadrature():
    assert n0_continued(2.0).real == pytest.approx(n0(2.0), abs=1e-12)
    assert abs(n0_continued(1.0 + 1.0j) - n0_tilde(1.0 + 1.0j)) < 1e-9
    with pytest.raises(DomainError):
        n0_continued(4.5)


@pytest.mark.unit
def test_continued_series_derivative():
    h = 1e-4
    numeric = (n0_continued(2.0 + h) - n0_continued(2.0 - h)) / (2 * h)
    assert abs(n0_continued(2.0, derivative=1) - numeric) < 1e-7


@pytest.mark.unit
def test_taylor_coefficients():
    coefficients = n_tz_taylor(0.5, 1)
    assert len(coefficients) == 3
    assert coefficients[0] == pytest.approx(n_tz(0.0, 0.5), rel=1e-8)
    assert coefficients[1] == 0.0
    second = central_derivative(lambda e: n_tz(e, 0.5), 0.0, 1e-3, n=2)
    assert coefficients[2] == pytest.approx(second / 2.0, rel=1e-5)


@pytest.mark.unit
def test_taylor_truncation_error_scales_as_eps_to_the_fourth():
    c = n_tz_taylor(0.5, 1)
    errors = [abs(n_tz(eps, 0.5) - c[0] - c[2] * eps ** 2) for eps in (0.2, 0.1, 0.05)]
    for coarse, fine in zip(errors[:-1], errors[1:]):
        assert 10.0 < coarse / fine < 24.0


@pytest.mark.slow
def test_taylor_routes_agree():
    cauchy = n_tz_taylor(0.5, 4, method="cauchy")
    termwise = n_tz_taylor(0.5, 4, method="termwise")
    for a, b in zip(cauchy[::2], termwise[::2]):
        assert a == pytest.approx(b, rel=1e-8)


@pytest.mark.unit
def test_taylor_window():
    with pytest.raises(DomainError):
        n_tz_taylor(0.01, 1)
    with pytest.raises(DomainError):
        n_tz_taylor(0.5, 9)
    with pytest.raises(ValueError):
        n_tz_taylor(0.5, 1, method="spline")


@pytest.mark.unit
def test_interpolant(dos_3d):
    assert dos_3d.has_interpolant
    assert dos_3d.sup_error < 1e-8
    assert dos_3d(5.2) == 0.0
    assert dos_3d(-1.7) == dos_3d(1.7)
    for eps in (0.0, 0.4, 1.0, 2.5, 3.0, 4.9):
        assert dos_3d(eps) == pytest.approx(n_tz(eps, 0.5), abs=2e-8)


@pytest.mark.unit
def test_interpolant_is_shared():
    assert get_dos(0.5) is get_dos(0.5)


@pytest.mark.unit
def test_interpolant_node_minimum():
    with pytest.raises(DomainError):
        build_interpolant(0.5, n_nodes=16)


@pytest.mark.unit
def test_two_dimensional_evaluator(dos_2d):
    assert not dos_2d.has_interpolant
    assert dos_2d(1.0) == n0_fast(1.0)
    with pytest.raises(DomainError):
        dos_2d.n_at_zero
    with pytest.raises(DomainError):
        DosEvaluator(2.0)


@pytest.mark.unit
def test_normalization_2d(dos_2d, tight_quad):
    value, _ = dos_2d.integrate(lambda e: 1.0, tight_quad)
    assert abs(2.0 * value - 1.0) < 1e-8


@pytest.mark.unit
def test_normalization_3d(tight_quad):
    value, _ = DosEvaluator(0.5).integrate(lambda e: 1.0, tight_quad)
    assert abs(2.0 * value - 1.0) < 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("t_z", [0.2, 1.0, 1.5])
def test_normalization_other_hoppings(t_z, tight_quad):
    value, _ = DosEvaluator(t_z).integrate(lambda e: 1.0, tight_quad)
    assert abs(2.0 * value - 1.0) < 1e-8


@pytest.mark.unit
def test_direct_evaluation_without_interpolant():
    evaluator = DosEvaluator(0.5)
    assert evaluator(0.7) == n_tz(0.7, 0.5)
    assert evaluator.direct(0.7) == n_tz(0.7, 0.5)
    assert not math.isnan(evaluator.n_at_zero)
