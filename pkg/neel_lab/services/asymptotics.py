"""Small-parameter expansions and the named constants they contain.

Two routes are kept for every density-of-states series: the truncated
polynomials in closed form ("printed") and the general double sum over
A_{k,l} or the semicircle moments ("assembled"). Agreement between the two is
checked by the test suite.
"""
import logging
import math
import threading
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from neel_lab.core.errors import DomainError
from neel_lab.schemas.schemas import NamedConstants, QuadratureSettings, SeriesSpec
from neel_lab.services.bcs import BcsCurve, c1_fn, f_bcs, g_fn
from neel_lab.services.dos import DosEvaluator, n0_fast
from neel_lab.services.neel import resolve_dos
from neel_lab.services.numerics import (
    EULER_GAMMA,
    EndpointFlag,
    digamma_fn,
    gamma_fn,
    integrate,
)

logger = logging.getLogger(__name__)

CONSTANTS_QUAD = QuadratureSettings(abs_tol=1e-13, rel_tol=1e-12)
PI_E_GAMMA = math.pi * math.exp(-EULER_GAMMA)
LN2 = math.log(2.0)

# (power, prefactor, a, b): prefactor * x^power * (a ln(16/x) - b) / pi^2
N0_PRINTED = (
    (0, 1.0 / 2.0, 1.0, 0.0),
    (2, 1.0 / 128.0, 1.0, 1.0),
    (4, 3.0 / 2 ** 16, 6.0, 7.0),
    (6, (5.0 / 3.0) / 2 ** 22, 30.0, 37.0),
    (8, (35.0 / 3.0) / 2 ** 33, 420.0, 533.0),
    (10, (63.0 / 5.0) / 2 ** 39, 1260.0, 1627.0),
)
NTZ0_PRINTED = (
    (0, 1.0 / 2.0, 1.0, 0.0),
    (2, 1.0 / 128.0, 2.0, 3.0),
    (4, 27.0 / 2 ** 16, 4.0, 7.0),
    (6, 25.0 / 2 ** 21, 20.0, 37.0),
    (8, 1225.0 / 2 ** 33, 280.0, 533.0),
    (10, (11907.0 / 5.0) / 2 ** 38, 840.0, 1627.0),
)
PRINTED_ORDER = 10


def _printed(x: float, table, order: int = PRINTED_ORDER) -> float:
    log16 = math.log(16.0 / x)
    total = 0.0
    for power, prefactor, a, b in table:
        if power > order:
            break
        total += prefactor * x ** power * (a * log16 - b)
    return total / math.pi ** 2


# ---------------------------------------------------------------------------
# A_{k,l} double sum
# ---------------------------------------------------------------------------

def _a_kl_parts(k: int, l: int) -> Tuple[float, float]:
    """Gamma-ratio coefficient and digamma constant of A_{k,l}, without the logs"""
    coefficient = (gamma_fn(k + 0.5) * gamma_fn(k + l + 1)
                   / (gamma_fn(k + 1) ** 2 * gamma_fn(0.5 - l) * gamma_fn(l + 1) ** 2))
    constant = (2.0 * (digamma_fn(k + l + 1) - digamma_fn(k + 1) - digamma_fn(l + 1))
                + digamma_fn(k + 0.5) + digamma_fn(0.5 - l))
    return coefficient, constant


def a_kl(k: int, l: int, w1: float, w2: float) -> float:
    if k < 0 or l < 0:
        raise DomainError(f"A_(k,l) needs k, l >= 0, got ({k}, {l})")
    if not (w1 < 0 and w2 > 1):
        raise DomainError(f"A_(k,l) needs w1 < 0 < 1 < w2, got w1={w1}, w2={w2}")
    coefficient, constant = _a_kl_parts(k, l)
    return (w1 ** k * (w2 - 1.0) ** l * coefficient
            * (math.log(-w1) + math.log(w2 - 1.0) + constant))


@lru_cache(maxsize=16)
def assembled_table(k_max: int, l_max: int) -> Tuple[np.ndarray, np.ndarray]:
    coefficients = np.empty((k_max + 1, l_max + 1))
    constants = np.empty_like(coefficients)
    for k in range(k_max + 1):
        for l in range(l_max + 1):
            coefficients[k, l], constants[k, l] = _a_kl_parts(k, l)
    if not (np.all(np.isfinite(coefficients)) and np.all(np.isfinite(constants))):
        raise DomainError(f"non-finite A_(k,l) table for k_max={k_max}, l_max={l_max}")
    return coefficients, constants


def _n0_assembled(eps: float, spec: SeriesSpec) -> float:
    coefficients, constants = assembled_table(spec.k_max, spec.l_max)
    w1 = -eps / (4.0 - eps)
    w2m1 = eps / (4.0 - eps)
    powers_k = w1 ** np.arange(spec.k_max + 1)
    powers_l = w2m1 ** np.arange(spec.l_max + 1)
    logs = math.log(-w1) + math.log(w2m1)
    terms = np.outer(powers_k, powers_l) * coefficients * (logs + constants)
    total = math.fsum(terms.ravel())
    return -total / (math.pi ** 2 * (4.0 - eps))


def n0_series(eps: float, spec: Optional[SeriesSpec] = None) -> float:
    """Small-eps expansion of N0 in either the printed or the assembled form"""
    spec = spec or SeriesSpec()
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"n0_series needs eps in (0, 1], got {eps}")
    if spec.mode == "assembled":
        return _n0_assembled(eps, spec)
    return _printed(eps, N0_PRINTED)


def n0_series_prime(eps: float) -> float:
    """Termwise eps-derivative of the printed N0 series"""
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"n0_series_prime needs eps in (0, 1], got {eps}")
    log16 = math.log(16.0 / eps)
    total = 0.0
    for power, prefactor, a, b in N0_PRINTED:
        total += prefactor * eps ** (power - 1) * (power * (a * log16 - b) - a)
    return total / math.pi ** 2


# ---------------------------------------------------------------------------
# N_tz(0) as t_z -> 0
# ---------------------------------------------------------------------------

def semicircle_moment(j: int) -> float:
    """2 int_0^2 u^j / sqrt(4 - u^2) du / pi"""
    if j < 0:
        raise DomainError(f"moment order must be non-negative, got {j}")
    return 2.0 ** j * gamma_fn((j + 1) / 2.0) / (math.sqrt(math.pi) * gamma_fn(j / 2.0 + 1.0))


def semicircle_log_moment(j: int) -> float:
    """2 int_0^2 u^j ln(u) / sqrt(4 - u^2) du / pi"""
    if j < 0:
        raise DomainError(f"moment order must be non-negative, got {j}")
    return (2.0 ** (j - 1) * gamma_fn((j + 1) / 2.0)
            * (2.0 * LN2 - digamma_fn(j / 2.0 + 1.0) + digamma_fn((j + 1) / 2.0))
            / (math.sqrt(math.pi) * gamma_fn(j / 2.0 + 1.0)))


def _n_tz0_assembled(t_z: float, order: int) -> float:
    log4 = math.log(4.0 / t_z)
    total = 0.0
    for m in range(order // 2 + 1):
        q = (gamma_fn(m + 0.5) / (math.sqrt(math.pi) * gamma_fn(m + 1.0))) ** 2
        d = digamma_fn(1.0 + m) - digamma_fn(0.5 + m)
        bracket = semicircle_moment(2 * m) * (log4 + d) - semicircle_log_moment(2 * m)
        total += q * (t_z / 4.0) ** (2 * m) * bracket
    return total / (2.0 * math.pi ** 2)


def n_tz0_series(t_z: float, order: int = PRINTED_ORDER, mode: str = "printed") -> float:
    """Small-t_z expansion of N_tz(0) through t_z^order"""
    if not 0.0 < t_z <= 1.0:
        raise DomainError(f"n_tz0_series needs t_z in (0, 1], got {t_z}")
    if order < 0:
        raise DomainError(f"order must be non-negative, got {order}")
    if mode == "assembled":
        return _n_tz0_assembled(t_z, order)
    if mode != "printed":
        raise DomainError(f"unknown series mode {mode!r}")
    if order > PRINTED_ORDER:
        raise DomainError(f"the printed series stops at t_z^{PRINTED_ORDER}")
    return _printed(t_z, NTZ0_PRINTED, order)


# ---------------------------------------------------------------------------
# Named constants
# ---------------------------------------------------------------------------

def _a0_kernel(e: float) -> float:
    return (n0_fast(e) - math.log(16.0 / e) / (2.0 * math.pi ** 2)) / e


def _log_squared_kernel(x: float) -> float:
    e = math.exp(-2.0 * x)
    return math.log(x) ** 2 * 4.0 * e / (1.0 + e) ** 2


def _log_squared_tail(x: float) -> float:
    return 4.0 * math.exp(-2.0 * x) * (1.0 + math.log(x)) ** 2


@lru_cache(maxsize=8)
def a0_with_error(quad: QuadratureSettings = CONSTANTS_QUAD) -> Tuple[float, float]:
    return integrate(_a0_kernel, 0.0, 4.0, quad, points=[1.0])


@lru_cache(maxsize=8)
def log_squared_sech2(quad: QuadratureSettings = CONSTANTS_QUAD) -> Tuple[float, float]:
    """int_0^inf (ln x)^2 / cosh^2 x dx"""
    return integrate(_log_squared_kernel, 0.0, math.inf, quad, left=EndpointFlag.LOG,
                     points=[1.0], tail=_log_squared_tail)


@lru_cache(maxsize=8)
def a1_with_error(quad: QuadratureSettings = CONSTANTS_QUAD) -> Tuple[float, float]:
    a0, a0_err = a0_with_error(quad)
    log_sq, log_sq_err = log_squared_sech2(quad)
    value = (-4.0 * math.pi ** 2 * a0 - log_sq + (2.0 * LN2) ** 2
             + (EULER_GAMMA + 2.0 * LN2 - math.log(math.pi)) ** 2)
    return value, 4.0 * math.pi ** 2 * a0_err + log_sq_err


def const_a0(quad: QuadratureSettings = CONSTANTS_QUAD) -> float:
    return a0_with_error(quad)[0]


def const_a1(quad: QuadratureSettings = CONSTANTS_QUAD) -> float:
    return a1_with_error(quad)[0]


_b0_cache: Dict[tuple, Tuple[float, float]] = {}
_b0_lock = threading.Lock()


def b0_with_error(t_z: float, dos: Optional[DosEvaluator] = None,
                  quad: QuadratureSettings = CONSTANTS_QUAD) -> Tuple[float, float]:
    """int_0^{4+2t_z} (N_tz(eps) - N_tz(0))/eps d eps"""
    if not 0.0 < t_z < 2.0:
        raise DomainError(f"b0 is defined for t_z in (0, 2), got {t_z}")
    dos = resolve_dos(t_z, dos)
    key = (dos.t_z, dos.sup_error, quad)
    with _b0_lock:
        if key in _b0_cache:
            return _b0_cache[key]
    n_zero = dos.n_at_zero

    def kernel(e):
        return (dos(e) - n_zero) / e

    points = [(k, EndpointFlag.SQRT) for k in dos.kinks]
    result = integrate(kernel, 0.0, dos.band_edge, quad, right=EndpointFlag.SQRT, points=points)
    with _b0_lock:
        _b0_cache[key] = result
    logger.debug(f"b0({t_z}) = {result[0]:.12e} +- {result[1]:.1e}")
    return result


def const_b0(t_z: float, dos: Optional[DosEvaluator] = None,
             quad: QuadratureSettings = CONSTANTS_QUAD) -> float:
    return b0_with_error(t_z, dos, quad)[0]


def named_constants(t_zs: Iterable[float] = (0.5,),
                    quad: QuadratureSettings = CONSTANTS_QUAD) -> NamedConstants:
    a0, a0_err = a0_with_error(quad)
    a1, a1_err = a1_with_error(quad)
    b0, b0_err = {}, {}
    for t_z in t_zs:
        b0[t_z], b0_err[t_z] = b0_with_error(t_z, quad=quad)
    return NamedConstants(a0=a0, a0_error=a0_err, a1=a1, a1_error=a1_err, b0=b0, b0_error=b0_err)


# ---------------------------------------------------------------------------
# Asymptotes
# ---------------------------------------------------------------------------

def tn_asym_2d(U: float, quad: QuadratureSettings = CONSTANTS_QUAD) -> float:
    if U <= 0:
        raise DomainError(f"U must be positive, got {U}")
    return 32.0 / PI_E_GAMMA * math.exp(-math.sqrt(4.0 * math.pi ** 2 / U + const_a1(quad)))


def tn_asym_3d(U: float, t_z: float, dos: Optional[DosEvaluator] = None,
               quad: QuadratureSettings = CONSTANTS_QUAD) -> float:
    if U <= 0:
        raise DomainError(f"U must be positive, got {U}")
    dos = resolve_dos(t_z, dos)
    b0 = const_b0(t_z, dos, quad)
    return (8.0 + 4.0 * t_z) / PI_E_GAMMA * math.exp(-(1.0 / U - b0) / dos.n_at_zero)


def mhat_asym_2d(U: float, y: float, curve: BcsCurve,
                 quad: Optional[QuadratureSettings] = None) -> float:
    """f_BCS(y) + c1(y) sqrt(U)"""
    if not 0.0 <= U <= 4.0:
        raise DomainError(f"the 2D gap-ratio asymptote needs U in [0, 4], got {U}")
    if U == 0.0:
        return curve.f(y)
    return curve.f(y) + c1_fn(y, curve, quad) * math.sqrt(U)


def mhat_asym_3d(U: float, t_z: float, y: float, include_g: bool = False,
                 t_n: Optional[float] = None, dos: Optional[DosEvaluator] = None,
                 curve: Optional[BcsCurve] = None,
                 quad: Optional[QuadratureSettings] = None) -> float:
    """f_BCS(y), optionally plus the subleading term g(U, t_z, y)"""
    if not 0.0 < t_z < 2.0:
        raise DomainError(f"the 3D gap-ratio asymptote needs t_z in (0, 2), got {t_z}")
    leading = f_bcs(y)
    if not include_g:
        return leading
    if t_n is None or t_n <= 0:
        raise DomainError("including g needs the Neel temperature t_n > 0")
    if curve is None:
        raise DomainError("including g needs a BcsCurve")
    dos = resolve_dos(t_z, dos)
    return leading + g_fn(U, t_z, y, t_n, dos, curve, quad)
