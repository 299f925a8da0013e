"""Quadrature, root finding and special functions used by every other service.

Nothing in here knows about lattices or temperatures. Quadrature goes through
QUADPACK (scipy.integrate.quad); endpoint singularities are removed by a change
of variables before the adaptive rule ever sees them.
"""
import logging
import math
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize, special

from neel_lab.core.config import settings
from neel_lab.core.errors import BracketError, ConvergenceError, PoleError
from neel_lab.schemas.schemas import QuadratureSettings, RootBracket

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)

# exp(-LOG_T_MAX) * panel width is below any tolerance we ever request
LOG_T_MAX = 60.0


class EndpointFlag(str, Enum):
    NONE = "none"
    SQRT = "sqrt"
    LOG = "log"


Point = Union[float, Tuple[float, EndpointFlag]]


def _check_pole(x: float, name: str) -> None:
    if x <= 0 and float(x).is_integer():
        raise PoleError(f"{name} has a pole at x={x}")


def gamma_fn(x: float) -> float:
    """Gamma function; scipy applies the reflection formula for x < 0.5"""
    _check_pole(x, "gamma")
    return float(special.gamma(x))


def digamma_fn(x: float) -> float:
    _check_pole(x, "digamma")
    return float(special.digamma(x))


def sech2(x):
    """1/cosh(x)^2 without overflow for large |x|"""
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def log_2cosh(x):
    """ln(2 cosh x) without overflow"""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _quad(g: Callable[[float], float], lo: float, hi: float,
          quad: QuadratureSettings, abs_tol: float) -> Tuple[float, float]:
    out = sp_integrate.quad(
        g, lo, hi,
        epsabs=abs_tol,
        epsrel=max(quad.rel_tol, 5e-14),
        limit=quad.max_subdivisions,
        full_output=1,
    )
    value, err = float(out[0]), float(out[1])
    if not np.isfinite(value):
        raise ConvergenceError(f"non-finite quadrature result on [{lo}, {hi}]", value, err)
    if len(out) > 3:
        target = max(abs_tol, quad.rel_tol * abs(value))
        if err > settings.QUAD_ROUNDOFF_SLACK * target:
            raise ConvergenceError(
                f"quadrature on [{lo}, {hi}] did not converge: {out[3]}", value, err
            )
        if err > target:
            logger.warning(
                f"roundoff-limited panel [{lo}, {hi}]: error {err:.3e} above target {target:.3e}"
            )
    return value, err


def _sqrt_panel(f, lo, hi, quad, abs_tol):
    width = hi - lo

    def g(theta):
        return f(lo + width * math.sin(theta) ** 2) * width * math.sin(2.0 * theta)

    return _quad(g, 0.0, 0.5 * math.pi, quad, abs_tol)


def _log_t_max(split: float, anchor: float) -> float:
    """Largest t for which anchor +- split*exp(-t) still differs from anchor"""
    if anchor == 0.0:
        return LOG_T_MAX
    resolvable = 8.0 * np.finfo(float).eps * abs(anchor)
    if split <= resolvable:
        return 0.0
    return min(LOG_T_MAX, math.log(split / resolvable))


def _log_panel(f, lo, hi, quad, abs_tol, at_left: bool):
    # exponential map on the first singularity_split fraction of the panel
    width = hi - lo
    split = min(quad.singularity_split, 0.5) * width
    anchor, sign = (lo, 1.0) if at_left else (hi, -1.0)
    t_max = _log_t_max(split, anchor)
    if t_max < 1.0:
        # the panel is a few ulps wide; nothing left to resolve
        return _quad(f, lo, hi, quad, abs_tol)

    def g(t):
        d = split * math.exp(-t)
        return f(anchor + sign * d) * d

    near = _quad(g, 0.0, t_max, quad, abs_tol / 2)
    if at_left:
        far = _quad(f, lo + split, hi, quad, abs_tol / 2)
    else:
        far = _quad(f, lo, hi - split, quad, abs_tol / 2)

    # int_0^delta of A ln(1/d) + B is delta (f(delta) + A); A from one doubling
    delta = split * math.exp(-t_max)
    f_delta = f(anchor + sign * delta)
    slope = (f_delta - f(anchor + sign * 2.0 * delta)) / math.log(2.0)
    rest = delta * (f_delta + slope)
    return near[0] + far[0] + rest, near[1] + far[1] + abs(delta * slope)


def _panel(f, lo, hi, left: EndpointFlag, right: EndpointFlag,
           quad: QuadratureSettings, abs_tol: float) -> Tuple[float, float]:
    if left is EndpointFlag.NONE and right is EndpointFlag.NONE:
        return _quad(f, lo, hi, quad, abs_tol)
    if left is EndpointFlag.SQRT and right in (EndpointFlag.SQRT, EndpointFlag.NONE):
        return _sqrt_panel(f, lo, hi, quad, abs_tol)
    if right is EndpointFlag.SQRT and left is EndpointFlag.NONE:
        return _sqrt_panel(f, lo, hi, quad, abs_tol)
    if left is EndpointFlag.LOG and right is EndpointFlag.NONE:
        return _log_panel(f, lo, hi, quad, abs_tol, at_left=True)
    if right is EndpointFlag.LOG and left is EndpointFlag.NONE:
        return _log_panel(f, lo, hi, quad, abs_tol, at_left=False)
    mid = 0.5 * (lo + hi)
    a = _panel(f, lo, mid, left, EndpointFlag.NONE, quad, abs_tol / 2)
    b = _panel(f, mid, hi, EndpointFlag.NONE, right, quad, abs_tol / 2)
    return a[0] + b[0], a[1] + b[1]


def _normalize_points(points: Optional[Sequence[Point]], a: float, b: float):
    out = {}
    for p in points or ():
        x, flag = (p if isinstance(p, tuple) else (p, EndpointFlag.NONE))
        x = float(x)
        if a < x < b:
            # a singular flag wins over a plain breakpoint at the same place
            if out.get(x, EndpointFlag.NONE) is EndpointFlag.NONE:
                out[x] = EndpointFlag(flag)
    return sorted(out.items())


def _tail_cutoff(a: float, tail: Callable[[float], float], bound: float) -> float:
    x = max(a, 0.0) + 1.0
    for _ in range(200):
        if tail(x) < bound:
            return x
        x *= 2.0
    raise ConvergenceError(f"tail bound never fell below {bound:.3e}")


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    quad: Optional[QuadratureSettings] = None,
    left: EndpointFlag = EndpointFlag.NONE,
    right: EndpointFlag = EndpointFlag.NONE,
    points: Optional[Sequence[Point]] = None,
    tail: Optional[Callable[[float], float]] = None,
) -> Tuple[float, float]:
    """Integrate f over [a, b] and return (value, error estimate).

    left/right flag integrable singularities at the ends: SQRT for
    inverse-square-root or square-root behaviour, LOG for a logarithm.
    points are interior breakpoints, optionally paired with a flag that applies
    to both neighbouring panels. For b = inf a tail bound T(x) >= |int_x^inf f|
    truncates the range where T drops below abs_tol/10; without one the
    semi-infinite panel goes to QUADPACK's transformed 15-point rule.
    """
    quad = quad or QuadratureSettings()
    if not b > a:
        raise ValueError(f"empty integration range [{a}, {b}]")

    if math.isinf(b):
        if tail is not None:
            cutoff = _tail_cutoff(a, tail, quad.abs_tol / 10)
            kept = [p for p in (points or ()) if (p[0] if isinstance(p, tuple) else p) < cutoff]
            return integrate(f, a, cutoff, quad, left, EndpointFlag.NONE, kept)
        interior = _normalize_points(points, a, b)
        joint = interior[-1][0] if interior else a + 1.0
        head = integrate(f, a, joint, quad, left, EndpointFlag.NONE, interior[:-1])
        far = _quad(f, joint, math.inf, quad, quad.abs_tol / 2)
        return head[0] + far[0], head[1] + far[1]

    interior = _normalize_points(points, a, b)
    edges: List[Tuple[float, EndpointFlag]] = [(a, EndpointFlag(left))] + interior + [(b, EndpointFlag(right))]
    share = quad.abs_tol / (len(edges) - 1)
    total, error = 0.0, 0.0
    for (lo, fl_lo), (hi, fl_hi) in zip(edges[:-1], edges[1:]):
        value, err = _panel(f, lo, hi, fl_lo, fl_hi, quad, share)
        total += value
        error += err
    return total, error


def quad_value(f, a, b, quad=None, **kwargs) -> float:
    return integrate(f, a, b, quad, **kwargs)[0]


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def make_bracket(f: Callable[[float], float], lo: float, hi: float) -> RootBracket:
    return RootBracket(lo=lo, hi=hi, f_lo=f(lo), f_hi=f(hi))


def _check_monotone(f, bracket: RootBracket, samples: int, noise: float = 0.0) -> None:
    """Reject sampled steps against the bracket's direction larger than the noise floor"""
    if samples <= 0:
        return
    xs = np.linspace(bracket.lo, bracket.hi, samples + 2)[1:-1]
    values = np.array([bracket.f_lo] + [f(float(x)) for x in xs] + [bracket.f_hi])
    steps = np.diff(values)
    floor = 64.0 * np.finfo(float).eps * float(np.max(np.abs(values))) + noise
    increasing = bracket.f_hi > bracket.f_lo
    reversed_steps = steps < -floor if increasing else steps > floor
    if np.any(reversed_steps):
        raise ConvergenceError(
            f"function is not monotone on [{bracket.lo}, {bracket.hi}]: sampled {values.tolist()}"
        )


def locate_root(
    f: Callable[[float], float],
    bracket: RootBracket,
    tol: Optional[float] = None,
    samples: Optional[int] = None,
    noise: float = 0.0,
) -> Tuple[float, RootBracket]:
    """Root of a monotone f inside bracket, plus a bracket of width <= tol around it.

    noise is the absolute uncertainty of computed f values, e.g. a quadrature
    error estimate; flat stretches may wobble by that much without failing the
    monotonicity check.
    """
    tol = settings.ROOT_TOL if tol is None else tol
    samples = settings.ROOT_MONOTONICITY_SAMPLES if samples is None else samples
    if not bracket.straddles:
        raise BracketError(
            f"invalid bracket [{bracket.lo}, {bracket.hi}] with values "
            f"({bracket.f_lo}, {bracket.f_hi})"
        )
    if bracket.f_lo == 0.0:
        return bracket.lo, bracket
    if bracket.f_hi == 0.0:
        return bracket.hi, bracket
    _check_monotone(f, bracket, samples, noise)

    # Brent: bisection safeguard with secant / inverse quadratic steps
    root, info = optimize.brentq(
        f, bracket.lo, bracket.hi,
        xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(f"root search stopped: {info.flag}", partial=root)
    logger.debug(f"root {root!r} after {info.function_calls} evaluations")

    step = max(tol / 2, 2 * np.finfo(float).eps * abs(root))
    for _ in range(64):
        lo = max(bracket.lo, root - step)
        hi = min(bracket.hi, root + step)
        f_lo = bracket.f_lo if lo == bracket.lo else f(lo)
        f_hi = bracket.f_hi if hi == bracket.hi else f(hi)
        final = RootBracket(lo=lo, hi=hi, f_lo=f_lo, f_hi=f_hi)
        if final.straddles:
            return root, final
        step *= 2
    raise ConvergenceError(f"could not certify root {root!r} with a bracket", partial=root)


def find_root_monotone(f: Callable[[float], float], bracket: RootBracket,
                       tol: Optional[float] = None) -> float:
    return locate_root(f, bracket, tol)[0]


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """Eliminate the h^order term from estimates at step h (coarse) and h/2 (fine)"""
    factor = 2.0 ** order
    return (factor * fine - coarse) / (factor - 1.0)


def central_derivative(f: Callable[[float], float], x: float, h: float, n: int = 1) -> float:
    """First or second derivative by central differences with one Richardson step"""
    def estimate(step):
        if n == 1:
            return (f(x + step) - f(x - step)) / (2 * step)
        if n == 2:
            return (f(x + step) - 2 * f(x) + f(x - step)) / step ** 2
        raise ValueError("only first and second derivatives are supported")

    return richardson(estimate(h), estimate(h / 2), order=2)
