"""Brute-force 2D mean-field equations on a periodic momentum grid.

Independent of the density of states: averages run directly over
k in [-pi, pi)^2 with the dispersion -2(cos k1 + cos k2). Used as an oracle for
the DOS-form solvers at t_z = 0.
"""
import logging
import math
from functools import lru_cache

import numpy as np
from scipy import optimize

from neel_lab.core.errors import ConvergenceError, DomainError
from neel_lab.services.numerics import richardson

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 512


@lru_cache(maxsize=4)
def dispersion(n: int) -> np.ndarray:
    """eps(k) on an n x n midpoint grid.

    For even n the points with k2 = pi - k1 sit on the Fermi surface eps = 0 up to rounding.
    """
    if n < 4:
        raise DomainError(f"grid needs at least 4 points per side, got {n}")
    k = -math.pi + (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    band = -2.0 * np.cos(k)
    return (band[:, None] + band[None, :]).ravel()


def _pair_mean(delta: float, T: float, n: int) -> float:
    """mean over k of tanh(E/2T)/(2E), E = sqrt(delta^2 + eps^2); E = 0 takes the limit 1/(4T)"""
    energy = np.hypot(delta, dispersion(n))
    if T == 0.0:
        if delta == 0.0:
            raise DomainError("the pair mean diverges at delta = T = 0")
        return float(np.mean(0.5 / energy))
    x = energy / (2.0 * T)
    ratio = np.ones_like(x)
    np.divide(np.tanh(x), x, out=ratio, where=x > 0.0)
    return float(np.mean(ratio)) / (4.0 * T)


def neel_function_oracle(T: float, n: int = DEFAULT_POINTS) -> float:
    """f_0(T) averaged on n and 2n grids and Richardson-extrapolated"""
    if T <= 0:
        raise DomainError(f"T must be positive, got {T}")
    return richardson(_pair_mean(0.0, T, n), _pair_mean(0.0, T, 2 * n))


def _solve(g, lo: float, hi: float, what: str) -> float:
    g_lo, g_hi = g(lo), g(hi)
    if np.sign(g_lo) == np.sign(g_hi):
        raise ConvergenceError(f"{what}: oracle bracket [{lo}, {hi}] holds no root")
    root, info = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-14, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(f"{what}: oracle root search stopped ({info.flag})", partial=root)
    return root


def _neel_on_grid(U: float, n: int) -> float:
    return _solve(lambda T: _pair_mean(0.0, T, n) - 1.0 / U, 1e-4, U / 2.0, "T_N")


def neel_oracle(U: float, n: int = DEFAULT_POINTS) -> float:
    if U <= 0:
        raise DomainError(f"U must be positive, got {U}")
    t_n = richardson(_neel_on_grid(U, n), _neel_on_grid(U, 2 * n))
    logger.info(f"momentum-grid T_N(U={U}) = {t_n:.10e}")
    return t_n


def _gap_on_grid(U: float, T: float, n: int) -> float:
    def g(delta):
        return _pair_mean(delta, T, n) - 1.0 / U

    if g(1e-12) <= 0:
        return 0.0
    return _solve(g, 1e-12, U / 2.0, "delta_af")


def gap_oracle(U: float, T: float, n: int = DEFAULT_POINTS) -> float:
    """Delta_AF from the k-space gap equation 1/U = mean tanh(E/2T)/(2E)"""
    if U <= 0 or T < 0:
        raise DomainError(f"need U > 0 and T >= 0, got U={U}, T={T}")
    delta = richardson(_gap_on_grid(U, T, n), _gap_on_grid(U, T, 2 * n))
    logger.info(f"momentum-grid delta_af(U={U}, T={T}) = {delta:.10e}")
    return delta
