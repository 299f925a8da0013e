"""Neel temperature: the unique T > 0 with f_tz(T) = 1/U."""
import logging
import math
from typing import List, Optional

import numpy as np

from neel_lab.core.errors import ConvergenceError, DomainError, UnderflowGuardError
from neel_lab.schemas.schemas import NeelResult, QuadratureSettings, RootBracket
from neel_lab.services.dos import DosEvaluator, get_dos
from neel_lab.services.numerics import locate_root

logger = logging.getLogger(__name__)

U_MIN_2D = 0.3
# T_N ~ exp(-1/(N(0) U)) must stay above ~1e-10 in 3D
GUARD_EXPONENT_3D = 25.0
MAX_HALVINGS = 200
# slack, in quadrature targets, allowed to the monotonicity check of a bracketed search
ROOT_NOISE_TARGETS = 4.0


def resolve_dos(t_z: float, dos: Optional[DosEvaluator] = None) -> DosEvaluator:
    if dos is None:
        return get_dos(t_z)
    if dos.t_z != t_z:
        raise DomainError(f"evaluator built for t_z={dos.t_z}, asked for t_z={t_z}")
    return dos


def geometric_points(scales, top: float, ratio: float = 10.0) -> List[float]:
    """Breakpoints s, ratio*s, ratio^2*s, ... below top for every positive scale"""
    points = set()
    for scale in scales:
        if scale <= 0:
            continue
        x = float(scale)
        while x < top:
            points.add(x)
            x *= ratio
    return sorted(points)


def u_min(t_z: float, dos: Optional[DosEvaluator] = None) -> float:
    """Smallest coupling whose Neel temperature is resolvable in double precision"""
    if t_z == 0.0:
        return U_MIN_2D
    dos = resolve_dos(t_z, dos)
    return 1.0 / (dos.n_at_zero * GUARD_EXPONENT_3D)


def f_tz(T: float, dos: DosEvaluator, quad: Optional[QuadratureSettings] = None) -> float:
    """int_0^inf N_tz(eps) tanh(eps/2T)/eps d eps"""
    if T <= 0:
        raise DomainError(f"f_tz needs T > 0, got {T}")

    def kernel(e):
        return math.tanh(e / (2.0 * T)) / e

    value, _ = dos.integrate(kernel, quad, scale_points=geometric_points([T], dos.band_edge))
    return value


def solve_neel(U: float, t_z: float, dos: Optional[DosEvaluator] = None,
               quad: Optional[QuadratureSettings] = None, t_lo: float = 0.1) -> NeelResult:
    if U <= 0:
        raise DomainError(f"U must be positive, got {U}")
    dos = resolve_dos(t_z, dos)
    guard = u_min(t_z, dos)
    if U < guard:
        raise UnderflowGuardError(
            f"U={U} below the underflow guard U_min={guard:.4g} for t_z={t_z}"
        )

    target = 1.0 / U

    def g(x):
        return f_tz(math.exp(x), dos, quad) - target

    hi = math.log(U / 2.0)
    lo = math.log(min(t_lo, U / 4.0))
    g_lo = g(lo)
    for _ in range(MAX_HALVINGS):
        if g_lo > 0:
            break
        lo -= math.log(2.0)
        g_lo = g(lo)
    else:
        raise ConvergenceError(f"Neel bracket expansion exhausted at T={math.exp(lo):.3e}")

    noise = ROOT_NOISE_TARGETS * (quad or QuadratureSettings()).target(target)
    x, bracket = locate_root(g, RootBracket(lo=lo, hi=hi, f_lo=g_lo, f_hi=g(hi)), noise=noise)
    t_n = math.exp(x)
    residual = abs(target - f_tz(t_n, dos, quad))
    logger.info(f"T_N(U={U}, t_z={t_z}) = {t_n:.12e} (residual {residual:.2e})")
    return NeelResult(
        U=U, t_z=t_z, t_n=t_n,
        bracket=RootBracket(
            lo=math.exp(bracket.lo), hi=math.exp(bracket.hi),
            f_lo=bracket.f_lo, f_hi=bracket.f_hi,
        ),
        residual=residual,
    )


def t_n_sweep(us, t_z: float, dos: Optional[DosEvaluator] = None,
              quad: Optional[QuadratureSettings] = None) -> np.ndarray:
    dos = resolve_dos(t_z, dos)
    return np.array([solve_neel(U, t_z, dos, quad).t_n for U in us])
