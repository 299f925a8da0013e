"""Densities of states of the square and anisotropic cubic lattices.

N0 is the 2D density of the band -2(cos k1 + cos k2); N_tz adds the hopping
-2 t_z cos k3 along the third axis and is the convolution of N0 with the
arcsine law of 2 t_z cos k3. Hopping t = 1 throughout.
"""
import logging
import math
from bisect import bisect_right
from functools import cached_property, lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import special
from tqdm import tqdm

from neel_lab.core.config import settings
from neel_lab.core.errors import ConvergenceError, DomainError
from neel_lab.schemas.schemas import ComplexPoint, QuadratureSettings
from neel_lab.services.numerics import EndpointFlag, integrate

logger = logging.getLogger(__name__)

BAND_2D = 4.0
# DOS primitives feed interpolants and series checks, so they run at tight tolerances
PRECISE = QuadratureSettings(abs_tol=1e-14, rel_tol=1e-13)
# below this the log point of N0 inside the N_tz integral is merged into phi = pi
NTZ_LOG_MERGE = 1e-14
# below this eps^2/16 is lost against 1 and K(1 - m) is ln(4/sqrt(m)) to double precision
N0_LOG_ASYMPTOTE = 1e-8

# Cauchy circles for derivatives of the continued N0
CAUCHY_POINTS = 64
CAUCHY_RADIUS_FRACTION = 0.4
TAYLOR_TZ_WINDOW = (0.05, 1.95)


def band_edge(t_z: float) -> float:
    return BAND_2D + 2.0 * t_z


def kink_points(t_z: float) -> List[float]:
    """Interior points of [0, 4+2t_z] where N_tz has square-root kinks"""
    if t_z <= 0:
        return []
    points = sorted({round(2.0 * t_z, 14), round(abs(BAND_2D - 2.0 * t_z), 14)})
    return [p for p in points if 0.0 < p < band_edge(t_z)]


def _check_tz(t_z: float) -> None:
    if not 0.0 < t_z < 2.0:
        raise DomainError(f"t_z={t_z} outside (0, 2); use n0 for t_z = 0")


# ---------------------------------------------------------------------------
# N0
# ---------------------------------------------------------------------------

def n0(eps: float, quad: Optional[QuadratureSettings] = None) -> float:
    """2D density of states by quadrature.

    The u-integral over [-2, 2-|eps|] is taken after u = -2 + (4-|eps|) sin^2(theta),
    which removes both inverse square roots; the result is symmetric about
    theta = pi/4 so only half the range is integrated.
    """
    e = abs(eps)
    if e == 0.0:
        raise DomainError("N0 diverges logarithmically at eps = 0")
    if e >= BAND_2D:
        return 0.0
    c = BAND_2D - e

    def integrand(theta):
        s = math.sin(theta) ** 2
        return 1.0 / math.sqrt((BAND_2D - c * s) * (e + c * s))

    value, _ = integrate(integrand, 0.0, 0.25 * math.pi, quad or PRECISE)
    return 4.0 * value / math.pi ** 2


def _n0_elliptic(e: float) -> float:
    # K(1 - e^2/16) with the complementary parameter passed directly
    if e < N0_LOG_ASYMPTOTE:
        return math.log(16.0 / max(e, 1e-300)) / (2.0 * math.pi ** 2)
    return float(special.ellipkm1(e * e / 16.0)) / (2.0 * math.pi ** 2)


def n0_fast(eps: float) -> float:
    """N0 through the complete elliptic integral K(1 - eps^2/16)/(2 pi^2)"""
    e = abs(eps)
    if e == 0.0:
        raise DomainError("N0 diverges logarithmically at eps = 0")
    if e >= BAND_2D:
        return 0.0
    return _n0_elliptic(e)


def _n0_kernel(x: float) -> float:
    # inner integrand of the convolutions; a node landing on the log point is harmless
    e = abs(x)
    if e >= BAND_2D:
        return 0.0
    return _n0_elliptic(e)


# ---------------------------------------------------------------------------
# Continuation of N0 off the real axis
# ---------------------------------------------------------------------------

def _log_cut_down(z):
    """log z with the branch cut on the negative imaginary axis"""
    angle = np.angle(z)
    angle = np.where(angle < -0.5 * np.pi, angle + 2.0 * np.pi, angle)
    return np.log(np.abs(z)) + 1j * angle


@lru_cache(maxsize=64)
def _series_tables(n_terms: int) -> Tuple[np.ndarray, np.ndarray]:
    q = np.empty(n_terms)
    d = np.empty(n_terms)
    q[0], d[0] = 1.0, 2.0 * math.log(2.0)
    for k in range(n_terms - 1):
        q[k + 1] = q[k] * ((k + 0.5) / (k + 1.0)) ** 2
        d[k + 1] = d[k] + 1.0 / (k + 1.0) - 1.0 / (k + 0.5)
    return q, d


def _series_terms(w_max: float, derivative: int) -> int:
    # (2m)^derivative |w|^(2m) must drop below double precision
    if w_max <= 0.0:
        return 8
    decay = -2.0 * math.log(w_max)
    n = int(math.ceil((40.0 + 8.0 * derivative) / decay)) + 16
    if derivative:
        n += int(math.ceil(derivative * math.log(max(n, 2)) / decay))
    return min(max(n, 8), 40000)


def _falling(n: np.ndarray, r: int) -> np.ndarray:
    out = np.ones_like(n, dtype=float)
    for i in range(r):
        out *= (n - i)
    return out


def n0_continued(z: Union[complex, np.ndarray], derivative: int = 0) -> Union[complex, np.ndarray]:
    """N0 and its derivatives from the power-log series, valid for 0 < |z| < 4.

    N0(z) = (1/2pi^2) sum_m ((1/2)_m/m!)^2 (z/4)^(2m) (ln(4/z) + psi(1+m) - psi(1/2+m)).
    The logarithm's cut lies on the negative imaginary axis, so this is the
    continuation from the upper half plane, extended analytically across
    (-4, 0). Derivatives are taken term by term.
    """
    z = np.asarray(z, dtype=complex)
    radius = np.abs(z)
    if np.any(radius == 0.0) or np.any(radius >= BAND_2D):
        raise DomainError("continued N0 needs 0 < |z| < 4")
    w = z / 4.0
    n_terms = _series_terms(float(np.max(np.abs(w))), derivative)
    q, d = _series_tables(n_terms)
    powers = 2.0 * np.arange(n_terms)
    log_part = math.log(4.0) - _log_cut_down(z)

    flat_w = w.reshape(-1, 1)

    def poly(coeffs, r):
        # r-th z-derivative of sum_m coeffs_m w^(2m)
        factors = coeffs * _falling(powers, r)
        exps = powers - r
        safe = np.where(exps >= 0, exps, 0.0)
        terms = factors * flat_w ** safe
        return (terms.sum(axis=1) / 4.0 ** r).reshape(z.shape)

    if derivative == 0:
        result = poly(q, 0) * log_part + poly(q * d, 0)
    else:
        # Leibniz on A(z) (ln4 - log z); the k-th derivative of -log z is (-1)^k (k-1)!/z^k
        result = poly(q * d, derivative)
        result = result + poly(q, derivative) * log_part
        for k in range(1, derivative + 1):
            dlog = (-1.0) ** k * math.factorial(k - 1) / z ** k
            result = result + math.comb(derivative, k) * poly(q, derivative - k) * dlog
    result = result / (2.0 * math.pi ** 2)
    return result[()] if result.ndim == 0 else result


def _as_complex(z: Union[ComplexPoint, complex, float]) -> complex:
    if isinstance(z, ComplexPoint):
        return z.as_complex()
    return complex(z)


def n0_tilde(z: Union[ComplexPoint, complex], quad: Optional[QuadratureSettings] = None,
             panels: int = 1) -> complex:
    """Analytic continuation of N0 from (0, 4) into the closed upper half plane.

    Evaluates (2/(pi^2 (4-z))) int_0^{pi/2} (s - w1)^(-1/2) (w2 - s)^(-1/2) dtheta,
    s = sin^2 theta, w1 = -z/(4-z), w2 = 4/(4-z), with principal square roots.
    panels > 1 adds equally spaced breakpoints, which gives an independent
    evaluation of the same integral.
    """
    z = _as_complex(z)
    if z.imag < 0:
        raise DomainError(f"n0_tilde is defined for Im z >= 0, got {z}")
    if z.imag == 0 and (z.real <= 0 or z.real >= BAND_2D):
        raise DomainError(f"z={z} lies on the cut (-inf, 0] U [4, inf)")
    quad = quad or PRECISE
    w1 = -z / (BAND_2D - z)
    w2 = BAND_2D / (BAND_2D - z)

    def integrand(theta):
        s = math.sin(theta) ** 2
        return 1.0 / (np.sqrt(s - w1) * np.sqrt(w2 - s))

    points: List[Union[float, Tuple[float, EndpointFlag]]] = []
    for w in (w1, w2):
        if 0.0 < w.real < 1.0:
            points.append((math.asin(math.sqrt(w.real)), EndpointFlag.SQRT))
    points.extend(0.5 * math.pi * k / panels for k in range(1, panels))

    re, _ = integrate(lambda t: float(np.real(integrand(t))), 0.0, 0.5 * math.pi, quad, points=points)
    im, _ = integrate(lambda t: float(np.imag(integrand(t))), 0.0, 0.5 * math.pi, quad, points=points)
    return complex(2.0 * (re + 1j * im) / (math.pi ** 2 * (BAND_2D - z)))


# ---------------------------------------------------------------------------
# N_tz
# ---------------------------------------------------------------------------

def n_tz(eps: float, t_z: float, quad: Optional[QuadratureSettings] = None) -> float:
    """Anisotropic 3D density of states by direct quadrature.

    Uses N_tz(eps) = (1/pi) int_0^pi N0(|eps| + 2 t_z cos phi) dphi, the
    u = 2 cos phi form of the arcsine convolution, split at the logarithmic
    point of N0 and at the jump where the argument reaches the 2D band edge.
    The argument is written in psi = pi - phi so that it keeps full relative
    accuracy next to its zero.
    """
    _check_tz(t_z)
    e = abs(eps)
    if e >= band_edge(t_z):
        return 0.0
    quad = quad or PRECISE
    width = 2.0 * t_z
    below = e < width

    if below:
        # argument = 2w sin((psi - psi0)/2) sin((psi + psi0)/2), zero at psi0
        psi0 = 2.0 * math.asin(math.sqrt((width - e) / (2.0 * width)))

        def argument(phi):
            psi = math.pi - phi
            return 2.0 * width * math.sin(0.5 * (psi - psi0)) * math.sin(0.5 * (psi + psi0))

        scale = psi0
    else:
        def argument(phi):
            return (e - width) + 2.0 * width * math.sin(0.5 * (math.pi - phi)) ** 2

        # the argument stays above e - w but bends up on the scale sqrt(2(e - w)/w)
        scale = math.sqrt(2.0 * (e - width) / width)

    def integrand(phi):
        return _n0_kernel(argument(phi))

    points: List[Union[float, Tuple[float, EndpointFlag]]] = []
    right = EndpointFlag.NONE
    if scale < NTZ_LOG_MERGE:
        right = EndpointFlag.LOG
    else:
        if below:
            points.append((math.pi - psi0, EndpointFlag.LOG))
        step = scale * (10.0 if below else 1.0)
        while step < 0.5 * math.pi:
            points.append(math.pi - step)
            step *= 10.0
    if e + width > BAND_2D:
        points.append(2.0 * math.asin(math.sqrt((e + width - BAND_2D) / (2.0 * width))))

    value, _ = integrate(integrand, 0.0, math.pi, quad, right=right, points=points)
    return value / math.pi


def _taylor_contour(t_z: float, order: int, method: str, quad: QuadratureSettings) -> float:
    radius = CAUCHY_RADIUS_FRACTION * min(2.0 * t_z, BAND_2D - 2.0 * t_z)
    ring = radius * np.exp(2j * np.pi * np.arange(CAUCHY_POINTS) / CAUCHY_POINTS)
    if radius < 1e-3:
        raise DomainError(f"Cauchy circle radius {radius} too small at t_z={t_z}")

    def local_coefficient(z0: complex) -> complex:
        if method == "termwise":
            return n0_continued(z0, derivative=order) / math.factorial(order)
        samples = n0_continued(z0 + ring)
        return np.fft.fft(samples)[order] / (CAUCHY_POINTS * radius ** order)

    def integrand(phi):
        u = 2.0 * np.exp(1j * phi)
        du = 2j * np.exp(1j * phi)
        weight = du / np.sqrt(4.0 - u * u)
        # the contour runs from phi = pi to 0, hence the sign
        return float(np.real(-local_coefficient(t_z * u) * weight)) / math.pi

    value, _ = integrate(integrand, 0.0, math.pi, quad, left=EndpointFlag.SQRT, right=EndpointFlag.SQRT)
    return value


def n_tz_taylor(t_z: float, j_max: int, method: str = "cauchy",
                quad: Optional[QuadratureSettings] = None) -> List[float]:
    """Taylor coefficients of N_tz at eps = 0, indexed by power of eps.

    Even coefficients come from the clockwise semicircle u = 2 e^{i phi} in the
    upper half plane; odd ones are zero. method="cauchy" differentiates the
    continued N0 on small circles, method="termwise" differentiates its series.
    """
    lo, hi = TAYLOR_TZ_WINDOW
    if not lo <= t_z <= hi:
        raise DomainError(f"t_z={t_z} outside the Taylor window [{lo}, {hi}]")
    if not 0 <= j_max <= 8:
        raise DomainError(f"j_max={j_max} must lie in 0..8")
    if method not in ("cauchy", "termwise"):
        raise ValueError(f"unknown differentiation method {method!r}")
    quad = quad or QuadratureSettings(abs_tol=1e-14, rel_tol=1e-12)
    coefficients = [0.0] * (2 * j_max + 1)
    for j in range(j_max + 1):
        coefficients[2 * j] = _taylor_contour(t_z, 2 * j, method, quad)
    return coefficients


# ---------------------------------------------------------------------------
# Evaluator
# ---------------------------------------------------------------------------

class _Panel:
    """Chebyshev fit on [a, b] in the variable s with eps = a + (b-a) sin^2(pi (s+1)/4)"""

    def __init__(self, a: float, b: float, fit: Chebyshev):
        self.a = a
        self.b = b
        self.fit = fit

    @staticmethod
    def to_eps(a: float, b: float, s):
        return a + (b - a) * np.sin(0.25 * np.pi * (np.asarray(s) + 1.0)) ** 2

    def to_s(self, eps: float) -> float:
        fraction = min(max((eps - self.a) / (self.b - self.a), 0.0), 1.0)
        return 4.0 / math.pi * math.asin(math.sqrt(fraction)) - 1.0

    def __call__(self, eps: float) -> float:
        return float(self.fit(self.to_s(eps)))


class DosEvaluator:
    """Density of states for one t_z.

    t_z = 0 is served by the elliptic form of N0. For t_z > 0 values come from
    a panel-wise Chebyshev interpolant when one was built, else by direct
    quadrature. Immutable once constructed.
    """

    def __init__(self, t_z: float, panels: Optional[Sequence[_Panel]] = None,
                 sup_error: Optional[float] = None, quad: Optional[QuadratureSettings] = None):
        if not 0.0 <= t_z < 2.0:
            raise DomainError(f"t_z={t_z} outside [0, 2)")
        self.t_z = float(t_z)
        self.quad = quad or PRECISE
        self._panels = tuple(panels or ())
        self._edges = [p.a for p in self._panels]
        self.sup_error = sup_error

    def __repr__(self) -> str:
        return f"DosEvaluator(t_z={self.t_z}, panels={len(self._panels)}, sup_error={self.sup_error})"

    @property
    def band_edge(self) -> float:
        return band_edge(self.t_z)

    @property
    def kinks(self) -> List[float]:
        return kink_points(self.t_z)

    @property
    def has_interpolant(self) -> bool:
        return bool(self._panels)

    def direct(self, eps: float) -> float:
        if self.t_z == 0.0:
            return n0(eps, self.quad)
        return n_tz(eps, self.t_z, self.quad)

    def __call__(self, eps: float) -> float:
        e = abs(eps)
        if e >= self.band_edge:
            return 0.0
        if self.t_z == 0.0:
            return n0_fast(e)
        if not self._panels:
            return n_tz(e, self.t_z, self.quad)
        panel = self._panels[max(bisect_right(self._edges, e) - 1, 0)]
        return max(panel(e), 0.0)

    @cached_property
    def n_at_zero(self) -> float:
        if self.t_z == 0.0:
            raise DomainError("N0 diverges at eps = 0")
        return self(0.0)

    def integrate(self, kernel: Callable[[float], float], quad: Optional[QuadratureSettings] = None,
                  scale_points: Sequence[float] = (), log_at_zero: bool = False,
                  upper: Optional[float] = None) -> Tuple[float, float]:
        """int_0^upper N(eps) kernel(eps) d eps with the DOS kinks as panel breaks.

        upper defaults to the band edge. scale_points add plain breakpoints where
        the kernel changes character (temperature, gap).
        """
        top = self.band_edge if upper is None else min(upper, self.band_edge)
        points: List[Union[float, Tuple[float, EndpointFlag]]] = [
            (k, EndpointFlag.SQRT) for k in self.kinks if k < top
        ]
        points.extend(p for p in scale_points if 0.0 < p < top)
        left = EndpointFlag.LOG if (self.t_z == 0.0 or log_at_zero) else EndpointFlag.NONE
        right = EndpointFlag.SQRT if (self.t_z > 0.0 and top == self.band_edge) else EndpointFlag.NONE
        return integrate(lambda e: self(e) * kernel(e), 0.0, top, quad, left=left, right=right,
                         points=points)


def _panel_budget(edges: List[float], n_nodes: int) -> List[int]:
    total = edges[-1] - edges[0]
    return [max(32, int(round(n_nodes * (b - a) / total))) for a, b in zip(edges[:-1], edges[1:])]


def build_interpolant(t_z: float, n_nodes: Optional[int] = None,
                      quad: Optional[QuadratureSettings] = None) -> DosEvaluator:
    """Fit N_tz panel by panel between the kinks and validate on a 3x finer grid"""
    if t_z == 0.0:
        return DosEvaluator(0.0, quad=quad)
    _check_tz(t_z)
    n_nodes = n_nodes or settings.DOS_INTERPOLANT_NODES
    if n_nodes < 64:
        raise DomainError(f"n_nodes={n_nodes} below the minimum of 64")
    quad = quad or PRECISE
    direct = np.vectorize(lambda e: n_tz(float(e), t_z, quad))

    edges = [0.0] + kink_points(t_z) + [band_edge(t_z)]
    panels: List[_Panel] = []
    sup_error = 0.0
    budgets = _panel_budget(edges, n_nodes)
    for (a, b), count in tqdm(list(zip(zip(edges[:-1], edges[1:]), budgets)),
                              desc=f"N_tz interpolant t_z={t_z}", leave=False,
                              disable=not logger.isEnabledFor(logging.INFO)):
        fit = Chebyshev.interpolate(lambda s: direct(_Panel.to_eps(a, b, s)), count - 1)
        panel = _Panel(a, b, fit)
        check_s = np.linspace(-1.0, 1.0, 3 * count)
        check_eps = _Panel.to_eps(a, b, check_s)
        error = float(np.max(np.abs(fit(check_s) - direct(check_eps))))
        sup_error = max(sup_error, error)
        panels.append(panel)

    logger.info(f"N_tz interpolant t_z={t_z}: {len(panels)} panels, sup error {sup_error:.2e}")
    if sup_error > settings.DOS_INTERPOLANT_MAX_ERROR:
        raise ConvergenceError(
            f"interpolant sup error {sup_error:.2e} exceeds {settings.DOS_INTERPOLANT_MAX_ERROR:.0e}; "
            f"increase n_nodes (currently {n_nodes})",
            partial=sup_error,
        )
    return DosEvaluator(t_z, panels, sup_error, quad)


@lru_cache(maxsize=16)
def get_dos(t_z: float, n_nodes: Optional[int] = None) -> DosEvaluator:
    """Shared evaluator per (t_z, n_nodes); evaluators are immutable"""
    return build_interpolant(float(t_z), n_nodes)
