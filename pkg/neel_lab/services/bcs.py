"""The universal BCS function f_BCS(y) and the corrections built on it.

J(x, y) = int_0^inf [tanh(E/2y)/E - tanh(eps/2)/eps] d eps with E = sqrt(x^2 + eps^2)
vanishes at x = f_BCS(y). Integrals run to a finite cutoff M; beyond it the
hyperbolic tangents equal 1 to double precision and the remaining algebraic
piece is added in closed form.
"""
import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from tqdm import tqdm

from neel_lab.core.config import settings
from neel_lab.core.errors import ConvergenceError, DomainError
from neel_lab.schemas.schemas import QuadratureSettings
from neel_lab.services.dos import DosEvaluator
from neel_lab.services.numerics import (
    EULER_GAMMA,
    EndpointFlag,
    integrate,
    locate_root,
    make_bracket,
    sech2,
)

logger = logging.getLogger(__name__)

F_BCS_ZERO = math.pi * math.exp(-EULER_GAMMA)
BCS_QUAD = QuadratureSettings(abs_tol=1e-14, rel_tol=1e-13)
F_BRACKET = (1e-6, 4.0)


def _cutoff(x: float, y: float) -> float:
    return max(60.0, 30.0 * (1.0 + x + y))


def _tanh_over(energy: float, y: float) -> float:
    if y == 0.0:
        return 1.0 / energy
    return math.tanh(energy / (2.0 * y)) / energy


def _reference(e: float) -> float:
    return math.tanh(0.5 * e) / e


def _kernel(x: float, y: float):
    def kernel(e):
        return _tanh_over(math.hypot(x, e), y) - _reference(e)
    return kernel


def _algebraic(x: float):
    """1/sqrt(x^2+e^2) - 1/e, the kernel once both tanh factors are 1"""
    def kernel(e):
        energy = math.hypot(x, e)
        return -x * x / (e * energy * (energy + e))
    return kernel


def _algebraic_tail(x: float, m: float) -> float:
    # int_m^inf (1/sqrt(x^2+e^2) - 1/e) de = -ln((1 + sqrt(1 + (x/m)^2))/2)
    r2 = (x / m) ** 2
    return -math.log1p(r2 / (2.0 * (1.0 + math.sqrt(1.0 + r2))))


def _check_x(x: float) -> None:
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")


def _check_y(y: float, upper: float = 1.0) -> None:
    if not 0.0 <= y <= upper:
        raise DomainError(f"y={y} outside [0, {upper}]")


def j_fn(x: float, y: float, quad: Optional[QuadratureSettings] = None) -> float:
    _check_x(x)
    _check_y(y)
    m = _cutoff(x, y)
    value, _ = integrate(_kernel(x, y), 0.0, m, quad or BCS_QUAD, points=[1.0, x, 10.0])
    return value + _algebraic_tail(x, m)


def h_fn(a: float, quad: Optional[QuadratureSettings] = None) -> float:
    """H(a) = a int_1^inf arccosh(s)/cosh^2(s a) ds, integrated in w with s = 1 + w^2"""
    if a <= 0:
        raise DomainError(f"H needs a > 0, got {a}")
    # cosh^-2(z) < 1e-16 beyond z = 19.1
    s_max = 19.1 / a
    if s_max <= 1.0:
        return 0.0
    w_max = math.sqrt(s_max - 1.0)

    def integrand(w):
        t = w * w
        arccosh = math.log1p(t + math.sqrt(t * (t + 2.0)))
        return 2.0 * w * arccosh * float(sech2((1.0 + t) * a))

    points = []
    if 1.0 / a > 1.0:
        points.append(math.sqrt(1.0 / a - 1.0))
    value, _ = integrate(integrand, 0.0, w_max, quad or BCS_QUAD, points=points)
    return a * value


def j_closed_form(x: float, y: float, quad: Optional[QuadratureSettings] = None) -> float:
    """ln(pi) - gamma - H(x/2y) - ln(x); H vanishes at y = 0"""
    _check_x(x)
    _check_y(y)
    h = 0.0 if y == 0.0 else h_fn(x / (2.0 * y), quad)
    return math.log(math.pi) - EULER_GAMMA - h - math.log(x)


def f_bcs(y: float, quad: Optional[QuadratureSettings] = None, tol: float = 1e-13) -> float:
    """Root in x of J(x, y) = 0; f_BCS(1) = 0"""
    _check_y(y)
    if y == 1.0:
        return 0.0

    def g(x):
        return j_fn(x, y, quad)

    try:
        bracket = make_bracket(g, *F_BRACKET)
        return locate_root(g, bracket, tol, samples=0)[0]
    except DomainError as exc:
        raise DomainError(f"f_BCS({y}) not bracketed by {F_BRACKET}: {exc}") from exc


def _partials(x: float, y: float, quad: QuadratureSettings):
    m = _cutoff(x, y)

    def d_dx(e):
        energy = math.hypot(x, e)
        a = energy / (2.0 * y)
        return x * (float(sech2(a)) / (2.0 * y * energy ** 2) - math.tanh(a) / energy ** 3)

    def d_dy(e):
        return -float(sech2(math.hypot(x, e) / (2.0 * y))) / (2.0 * y * y)

    j_x, _ = integrate(d_dx, 0.0, m, quad, points=[1.0, x, 10.0])
    root = math.hypot(x, m)
    j_x += -x / (root * (root + m))
    j_y, _ = integrate(d_dy, 0.0, m, quad, points=[x, 10.0 * y])
    return j_x, j_y


def f_bcs_prime(y: float, quad: Optional[QuadratureSettings] = None,
                x: Optional[float] = None) -> float:
    """f_BCS'(y) = -J_y/J_x, both partials differentiated under the integral"""
    _check_y(y, settings.BCS_Y_MAX)
    if y == 0.0:
        return 0.0
    quad = quad or BCS_QUAD
    x = f_bcs(y, quad) if x is None else x
    j_x, j_y = _partials(x, y, quad)
    if abs(j_x) < 1e-14:
        raise ConvergenceError(f"dJ/dx vanishes at y={y}", partial=j_x)
    return -j_y / j_x


class BcsCurve:
    """f_BCS and f_BCS' sampled on Chebyshev-Lobatto nodes of [0, y_max]"""

    def __init__(self, nodes: np.ndarray, f_values: np.ndarray, fprime_values: np.ndarray,
                 interp_error: float):
        self.nodes = nodes
        self.f_values = f_values
        self.fprime_values = fprime_values
        self.interp_error = interp_error
        self.y_max = float(nodes[-1])
        self._f = BarycentricInterpolator(nodes, f_values)
        self._fprime = BarycentricInterpolator(nodes, fprime_values)

    def __repr__(self) -> str:
        return f"BcsCurve(n={len(self.nodes)}, y_max={self.y_max}, interp_error={self.interp_error:.2e})"

    @classmethod
    def build(cls, y_max: Optional[float] = None, n_nodes: Optional[int] = None,
              quad: Optional[QuadratureSettings] = None) -> "BcsCurve":
        y_max = y_max or settings.BCS_Y_MAX
        n_nodes = n_nodes or settings.BCS_CURVE_NODES
        quad = quad or BCS_QUAD
        _check_y(y_max, settings.BCS_Y_MAX)
        k = np.arange(n_nodes)
        nodes = 0.5 * y_max * (1.0 - np.cos(np.pi * k / (n_nodes - 1)))
        nodes[0] = 0.0
        progress = dict(leave=False, disable=not logger.isEnabledFor(logging.INFO))

        f_values = np.empty(n_nodes)
        fprime_values = np.empty(n_nodes)
        for i, y in enumerate(tqdm(nodes, desc="f_BCS nodes", **progress)):
            f_values[i] = f_bcs(float(y), quad)
            fprime_values[i] = f_bcs_prime(float(y), quad, x=f_values[i])

        if np.any(np.diff(f_values) > 1e-12):
            raise ConvergenceError("sampled f_BCS is not decreasing")

        check = np.linspace(0.0, y_max, 3 * n_nodes)
        interpolant = BarycentricInterpolator(nodes, f_values)
        direct = np.array([f_bcs(float(y), quad) for y in tqdm(check, desc="f_BCS check", **progress)])
        interp_error = float(np.max(np.abs(interpolant(check) - direct)))
        logger.info(f"BCS curve: {n_nodes} nodes on [0, {y_max}], sup error {interp_error:.2e}")
        if interp_error > settings.BCS_CURVE_MAX_ERROR:
            raise ConvergenceError(
                f"BCS curve interpolation error {interp_error:.2e} exceeds "
                f"{settings.BCS_CURVE_MAX_ERROR:.0e}",
                partial=interp_error,
            )
        return cls(nodes, f_values, fprime_values, interp_error)

    def _check(self, y: float) -> None:
        if not 0.0 <= y <= self.y_max:
            raise DomainError(f"y={y} outside the curve window [0, {self.y_max}]")

    def f(self, y: float) -> float:
        self._check(y)
        return float(self._f(y))

    def fprime(self, y: float) -> float:
        self._check(y)
        return float(self._fprime(y))

    def prefactor(self, y: float) -> float:
        """f_BCS(y) - y f_BCS'(y), equal to -1/J_x at the root"""
        return self.f(y) - y * self.fprime(y)


@lru_cache(maxsize=4)
def get_bcs_curve(y_max: Optional[float] = None, n_nodes: Optional[int] = None) -> BcsCurve:
    return BcsCurve.build(y_max, n_nodes)


def _root_and_prefactor(y: float, curve: Optional[BcsCurve],
                        quad: QuadratureSettings) -> Tuple[float, float]:
    """f_BCS(y) and f_BCS(y) - y f_BCS'(y), from the curve when one is given"""
    if y == 0.0:
        return F_BCS_ZERO, F_BCS_ZERO
    if curve is not None:
        return curve.f(y), curve.prefactor(y)
    _check_y(y, settings.BCS_Y_MAX)
    x = f_bcs(y, quad)
    return x, x - y * f_bcs_prime(y, quad, x=x)


def c1_fn(y: float, curve: Optional[BcsCurve] = None,
          quad: Optional[QuadratureSettings] = None) -> float:
    """Amplitude of the sqrt(U) correction to the 2D gap ratio"""
    quad = quad or BCS_QUAD
    x, prefactor = _root_and_prefactor(y, curve, quad)
    kernel = _kernel(x, y)
    tail_kernel = _algebraic(x)
    m = _cutoff(x, y)

    def weighted(e):
        return math.log(16.0 / e) / (2.0 * math.pi) * kernel(e)

    def weighted_tail(e):
        return math.log(16.0 / e) / (2.0 * math.pi) * tail_kernel(e)

    near, _ = integrate(weighted, 0.0, m, quad, left=EndpointFlag.LOG, points=[1.0, x, 10.0])
    far, _ = integrate(weighted_tail, m, math.inf, quad)
    return prefactor * (near + far)


def alpha0(curve: Optional[BcsCurve] = None, quad: Optional[QuadratureSettings] = None) -> float:
    """c1(0) / f_BCS(0)"""
    return c1_fn(0.0, curve, quad) / F_BCS_ZERO


def g_fn(U: float, t_z: float, y: float, t_n: float, dos: DosEvaluator,
         curve: Optional[BcsCurve] = None, quad: Optional[QuadratureSettings] = None) -> float:
    """Subleading correction to the 3D gap ratio.

    (f - y f') int_0^inf [(N(t_n eps) - N(0))/N(0)] K(eps) d eps; beyond the
    scaled band edge the DOS factor is exactly -1.
    """
    if t_n <= 0:
        raise DomainError(f"t_n must be positive, got {t_n}")
    if not 0.0 < t_z < 2.0:
        raise DomainError(f"g is defined for t_z in (0, 2), got {t_z}")
    if dos.t_z != t_z:
        raise DomainError(f"evaluator built for t_z={dos.t_z}, asked for t_z={t_z}")
    quad = quad or BCS_QUAD
    x, prefactor = _root_and_prefactor(y, curve, quad)
    kernel = _kernel(x, y)
    n_zero = dos.n_at_zero
    top = dos.band_edge / t_n
    m = _cutoff(x, y)

    def integrand(e):
        return (dos(t_n * e) - n_zero) / n_zero * kernel(e)

    points = [(k / t_n, EndpointFlag.SQRT) for k in dos.kinks]
    points += [1.0, x, 10.0, m]
    inside, _ = integrate(integrand, 0.0, top, quad, right=EndpointFlag.SQRT, points=points)

    if top < m:
        between, _ = integrate(kernel, top, m, quad)
        outside = -(between + _algebraic_tail(x, m))
    else:
        outside = -_algebraic_tail(x, top)
    value = prefactor * (inside + outside)
    logger.debug(f"g(U={U}, t_z={t_z}, y={y}) = {value:.6e}")
    return value
