"""Antiferromagnetic gap equation, free energy and the gap ratio m_hat."""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from neel_lab.core.errors import ConvergenceError, DomainError
from neel_lab.schemas.schemas import GapSolution, QuadratureSettings, RootBracket
from neel_lab.services.dos import DosEvaluator
from neel_lab.services.neel import ROOT_NOISE_TARGETS, f_tz, geometric_points, resolve_dos
from neel_lab.services.numerics import locate_root, log_2cosh

logger = logging.getLogger(__name__)

# below this a temperature is exactly zero (tanh = 1)
ZERO_TEMPERATURE = 1e-12
GAP_FLOOR = 1e-14
GAP_CEILING_MARGIN = 1e-12
GAP_RESIDUAL_MAX = 1e-10


def _is_zero(T: float) -> bool:
    return T < ZERO_TEMPERATURE


def f_big_t(delta: float, T: float, dos: DosEvaluator,
            quad: Optional[QuadratureSettings] = None) -> float:
    """F_T(delta) = int_0^inf N(eps) tanh(E/2T)/E d eps with E = sqrt(delta^2 + eps^2)"""
    if delta < 0 or T < 0:
        raise DomainError(f"need delta >= 0 and T >= 0, got delta={delta}, T={T}")
    zero_t = _is_zero(T)
    if delta == 0.0:
        if zero_t:
            raise DomainError("F_T diverges at delta = T = 0")
        return f_tz(T, dos, quad)

    if zero_t:
        def kernel(e):
            return 1.0 / math.hypot(delta, e)
    else:
        def kernel(e):
            energy = math.hypot(delta, e)
            return math.tanh(energy / (2.0 * T)) / energy

    scales = [delta] if zero_t else [delta, T]
    value, _ = dos.integrate(kernel, quad, scale_points=geometric_points(scales, dos.band_edge))
    return value


def free_energy(delta: float, U: float, t_z: float, T: float,
                dos: Optional[DosEvaluator] = None,
                quad: Optional[QuadratureSettings] = None) -> float:
    """G_T(delta) restricted to antiferromagnetic configurations; G_T'(delta) = 2 delta (1/U - F_T(delta))"""
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    dos = resolve_dos(t_z, dos)
    zero_t = _is_zero(T)
    if zero_t:
        def kernel(e):
            return math.hypot(delta, e)
        scales = [delta]
        factor = -2.0
    else:
        def kernel(e):
            return float(log_2cosh(math.hypot(delta, e) / (2.0 * T)))
        scales = [delta, T]
        factor = -4.0 * T
    value, _ = dos.integrate(kernel, quad, scale_points=geometric_points(scales, dos.band_edge))
    return factor * value + delta ** 2 / U


def solve_gap(U: float, t_z: float, T: float, t_n: float,
              dos: Optional[DosEvaluator] = None,
              quad: Optional[QuadratureSettings] = None) -> GapSolution:
    """Unique root of F_T(delta) = 1/U in (0, U/2), or delta = 0 from T_N upward"""
    if U <= 0:
        raise DomainError(f"U must be positive, got {U}")
    if T < 0:
        raise DomainError(f"T must be non-negative, got {T}")
    if t_n <= 0:
        raise DomainError(f"t_n must be positive, got {t_n}")
    dos = resolve_dos(t_z, dos)
    T = 0.0 if _is_zero(T) else T
    target = 1.0 / U

    if T >= t_n:
        residual = abs(target - f_big_t(0.0, T, dos, quad))
        return GapSolution(U=U, t_z=t_z, T=T, delta_af=0.0, m_af=0.0, m_hat=0.0,
                           residual=residual, t_n_used=t_n)

    # the root is searched in log(delta); the bracket spans 14 decades
    def g(x):
        return f_big_t(math.exp(x), T, dos, quad) - target

    lo = math.log(GAP_FLOOR)
    hi = math.log(U / 2.0 * (1.0 - GAP_CEILING_MARGIN))
    g_lo = g(lo)
    if g_lo <= 0:
        raise ConvergenceError(
            f"F_T(0) <= 1/U at T={T} < t_n={t_n}: quadrature and t_n disagree", partial=g_lo
        )
    noise = ROOT_NOISE_TARGETS * (quad or QuadratureSettings()).target(target)
    x, _ = locate_root(g, RootBracket(lo=lo, hi=hi, f_lo=g_lo, f_hi=g(hi)), noise=noise)
    delta = math.exp(x)
    residual = abs(target - f_big_t(delta, T, dos, quad))
    if residual >= GAP_RESIDUAL_MAX:
        raise ConvergenceError(
            f"gap residual {residual:.3e} at U={U}, T={T} is not below {GAP_RESIDUAL_MAX:.0e}",
            partial=delta,
        )
    logger.debug(f"delta_af(U={U}, t_z={t_z}, T={T}) = {delta:.12e}")
    return GapSolution(U=U, t_z=t_z, T=T, delta_af=delta, m_af=2.0 * delta / U,
                       m_hat=delta / t_n, residual=residual, t_n_used=t_n)


def m_hat(U: float, t_z: float, T: float, t_n: float,
          dos: Optional[DosEvaluator] = None,
          quad: Optional[QuadratureSettings] = None) -> float:
    if t_n <= 0:
        raise DomainError("m_hat needs a positive Neel temperature")
    return solve_gap(U, t_z, T, t_n, dos, quad).delta_af / t_n


def m_hat_curve(U: float, t_z: float, ys: Sequence[float], t_n: float,
                dos: Optional[DosEvaluator] = None,
                quad: Optional[QuadratureSettings] = None) -> List[GapSolution]:
    """Gap solutions at T = y * t_n for each reduced temperature y, sharing one t_n"""
    dos = resolve_dos(t_z, dos)
    return [solve_gap(U, t_z, y * t_n, t_n, dos, quad) for y in ys]


def minimizer_scan(U: float, t_z: float, T: float, delta_af: float, n: int = 20,
                   dos: Optional[DosEvaluator] = None,
                   quad: Optional[QuadratureSettings] = None) -> np.ndarray:
    """G_T(delta) - G_T(delta_af) on n points of [0, U/2]; non-negative at a true minimizer"""
    dos = resolve_dos(t_z, dos)
    reference = free_energy(delta_af, U, t_z, T, dos, quad)
    grid = np.linspace(0.0, U / 2.0, n)
    return np.array([free_energy(float(d), U, t_z, T, dos, quad) - reference for d in grid])
