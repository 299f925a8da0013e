import math

import numpy as np
import pytest

from neel_lab.core.errors import BracketError, ConvergenceError, PoleError
from neel_lab.schemas.schemas import QuadratureSettings, RootBracket
from neel_lab.services.numerics import (
    EULER_GAMMA,
    EndpointFlag,
    central_derivative,
    digamma_fn,
    find_root_monotone,
    gamma_fn,
    integrate,
    locate_root,
    log_2cosh,
    make_bracket,
    quad_value,
    richardson,
    sech2,
)

pytestmark = pytest.mark.unit

QUAD = QuadratureSettings(abs_tol=1e-13, rel_tol=1e-12)


@pytest.mark.parametrize("x, expected", [
    (0.5, math.sqrt(math.pi)),
    (1.0, 1.0),
    (5.0, 24.0),
    (-0.5, -2.0 * math.sqrt(math.pi)),
    (-1.5, 4.0 * math.sqrt(math.pi) / 3.0),
])
def test_gamma_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


def test_digamma_values():
    assert digamma_fn(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)
    assert digamma_fn(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), rel=1e-14)
    # psi(x + 1) = psi(x) + 1/x
    assert digamma_fn(3.7) == pytest.approx(digamma_fn(2.7) + 1.0 / 2.7, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_poles_raise(x):
    with pytest.raises(PoleError):
        gamma_fn(x)
    with pytest.raises(PoleError):
        digamma_fn(x)


def test_sech2_and_log_2cosh_survive_large_arguments():
    assert sech2(0.0) == pytest.approx(1.0)
    assert sech2(1000.0) == 0.0
    assert log_2cosh(1000.0) == pytest.approx(1000.0)
    assert log_2cosh(0.0) == pytest.approx(math.log(2.0))
    x = np.array([-2.0, 0.3, 4.0])
    np.testing.assert_allclose(sech2(x), 1.0 / np.cosh(x) ** 2, rtol=1e-14)


def test_smooth_integral():
    value, error = integrate(math.sin, 0.0, math.pi, QUAD)
    assert value == pytest.approx(2.0, abs=1e-13)
    assert error < 1e-10


def test_inverse_sqrt_endpoint():
    value = quad_value(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, QUAD, left=EndpointFlag.SQRT)
    assert value == pytest.approx(2.0, abs=1e-12)


def test_inverse_sqrt_at_right_end():
    value = quad_value(lambda x: 1.0 / math.sqrt(1.0 - x), 0.0, 1.0, QUAD, right=EndpointFlag.SQRT)
    assert value == pytest.approx(2.0, abs=1e-12)


def test_log_endpoint():
    value = quad_value(math.log, 0.0, 1.0, QUAD, left=EndpointFlag.LOG)
    assert value == pytest.approx(-1.0, abs=1e-12)


def test_log_singularity_at_an_interior_point():
    def f(x):
        return math.log(abs(x - 0.5))

    value = quad_value(f, 0.0, 1.0, QUAD, points=[(0.5, EndpointFlag.LOG)])
    # 2 * int_0^1/2 ln u du
    assert value == pytest.approx(-math.log(2.0) - 1.0, abs=1e-11)


def test_semi_infinite_with_tail_bound():
    value = quad_value(lambda x: math.exp(-x), 0.0, math.inf, QUAD, tail=lambda x: math.exp(-x))
    assert value == pytest.approx(1.0, abs=1e-12)


def test_semi_infinite_without_tail_bound():
    value = quad_value(lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf, QUAD)
    assert value == pytest.approx(math.pi / 2, abs=1e-11)


def test_empty_range_rejected():
    with pytest.raises(ValueError):
        integrate(math.sin, 1.0, 1.0, QUAD)


def test_locate_root_returns_certified_bracket():
    def f(x):
        return x ** 3 - 2.0

    root, bracket = locate_root(f, make_bracket(f, 0.0, 2.0), tol=1e-14)
    assert root == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-13)
    assert bracket.straddles
    assert bracket.lo <= root <= bracket.hi
    assert bracket.width < 1e-12


def test_find_root_monotone_decreasing():
    def f(x):
        return math.exp(-x) - 0.5

    assert find_root_monotone(f, make_bracket(f, 0.0, 5.0)) == pytest.approx(math.log(2.0), abs=1e-13)


def test_root_at_bracket_end():
    def f(x):
        return x - 1.0

    root, _ = locate_root(f, make_bracket(f, 1.0, 3.0))
    assert root == 1.0


def test_bracket_without_sign_change():
    with pytest.raises(BracketError):
        locate_root(lambda x: x * x + 1.0, RootBracket(lo=-1.0, hi=1.0, f_lo=2.0, f_hi=2.0))


def test_non_monotone_function_is_flagged():
    def f(x):
        return (x - 1.0) ** 2 - 0.25

    with pytest.raises(ConvergenceError):
        locate_root(f, make_bracket(f, 0.0, 1.2), samples=3)


def test_richardson_removes_quadratic_error():
    assert richardson(1.0 + 4.0, 1.0 + 1.0) == pytest.approx(1.0)


def test_central_derivative():
    assert central_derivative(math.exp, 0.3, 1e-2) == pytest.approx(math.exp(0.3), rel=1e-9)
    assert central_derivative(math.sin, 0.3, 1e-2, n=2) == pytest.approx(-math.sin(0.3), rel=1e-7)
    with pytest.raises(ValueError):
        central_derivative(math.sin, 0.3, 1e-2, n=3)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, 2.0), (3.0, 7.0)])
def test_log_singularity_at_a_nonzero_right_end(a, b):
    def f(x):
        return math.log(b - x)

    value = quad_value(f, a, b, QUAD, right=EndpointFlag.LOG)
    width = b - a
    assert value == pytest.approx(width * (math.log(width) - 1.0), abs=1e-11)


def test_log_singularity_next_to_a_large_anchor():
    # near 1e3 the map runs into the spacing of doubles long before t = 60
    def f(x):
        return math.log(abs(x - 1000.5))

    value = quad_value(f, 1000.0, 1001.0, QUAD, points=[(1000.5, EndpointFlag.LOG)])
    assert value == pytest.approx(-math.log(2.0) - 1.0, abs=1e-10)


def test_roundoff_limited_panel_is_logged(mocker, caplog):
    mocker.patch(
        "neel_lab.services.numerics.sp_integrate.quad",
        return_value=(1.0, 5e-12, {}, "roundoff error detected"),
    )
    with caplog.at_level("WARNING", logger="neel_lab.services.numerics"):
        value, error = integrate(math.sin, 0.0, 1.0, QUAD)
    assert value == 1.0
    assert error == 5e-12
    assert "roundoff-limited panel" in caplog.text


def test_unconverged_panel_raises(mocker):
    mocker.patch(
        "neel_lab.services.numerics.sp_integrate.quad",
        return_value=(1.0, 1e-6, {}, "maximum number of subdivisions"),
    )
    with pytest.raises(ConvergenceError) as info:
        integrate(math.sin, 0.0, 1.0, QUAD)
    assert info.value.error_estimate == 1e-6


def _flat_then_steep(x):
    # wobbles at the 1e-13 level before dropping
    if x < 1.0:
        return 0.5 + 1e-13 * math.sin(40.0 * x)
    return 0.5 - (x - 1.0)


def test_monotonicity_check_tolerates_noise():
    bracket = make_bracket(_flat_then_steep, 0.0, 2.0)
    with pytest.raises(ConvergenceError, match="not monotone"):
        locate_root(_flat_then_steep, bracket, samples=20)
    root, _ = locate_root(_flat_then_steep, bracket, samples=20, noise=1e-12)
    assert root == pytest.approx(1.5, abs=1e-12)


def test_noise_does_not_hide_a_real_reversal():
    def f(x):
        return (x - 1.0) ** 2 - 0.25

    with pytest.raises(ConvergenceError):
        locate_root(f, make_bracket(f, 0.0, 1.2), samples=3, noise=1e-12)
