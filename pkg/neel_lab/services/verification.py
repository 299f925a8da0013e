"""Acceptance checks: printed constants, identities, solver properties and
asymptote-versus-solver convergence.

Each criterion returns a CriterionResult; failures are reported, never raised.
measured/bound hold the worst ratio |deviation|/allowance over the criterion's
individual checks, so a criterion passes when measured <= bound = 1.
"""
import logging
import math
import time
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from neel_lab.core.errors import NeelLabError
from neel_lab.schemas.schemas import CriterionResult, QuadratureSettings, VerificationReport
from neel_lab.services import asymptotics, bcs, momentum_grid
from neel_lab.services.dos import PRECISE, DosEvaluator, get_dos, n0, n_tz
from neel_lab.services.gap import f_big_t, minimizer_scan, solve_gap
from neel_lab.services.golden import GoldenStore
from neel_lab.services.neel import solve_neel
from neel_lab.services.numerics import EndpointFlag, central_derivative, integrate

logger = logging.getLogger(__name__)

TIGHT = QuadratureSettings(abs_tol=1e-14, rel_tol=1e-13)

# printed value, allowance
F_BCS_ZERO_CHECK = (bcs.F_BCS_ZERO, 1e-8)
C1_ZERO_CHECK = (0.04576, 2e-4)
ALPHA0_CHECK = (0.02594, 2e-4)
A0_CHECK = (0.007013, 1e-5)
A1_CHECK = (0.3260, 5e-4)

NORMALIZATION_TZ = (0.0, 0.2, 0.5, 1.0, 1.5)
TN_2D_GRID = (2.0, 1.0, 0.6, 0.4)
TN_3D_GRID = (2.0, 1.3, 1.0, 0.8)
MHAT_2D_GRID = (1.0, 0.6, 0.4)
MHAT_3D_GRID = (1.2, 1.0, 0.8)
REDUCED_TEMPERATURES = (0.0, 0.5)
T_Z_3D = 0.5

Check = Tuple[str, float, float]


class Criterion(NamedTuple):
    number: int
    name: str
    quick: bool
    run: Callable[[GoldenStore], List[Check]]


def _summarize(number: int, name: str, checks: Sequence[Check], seconds: float) -> CriterionResult:
    worst = 0.0
    failed = []
    for label, deviation, allowance in checks:
        ratio = math.inf if allowance <= 0 else abs(deviation) / allowance
        if not ratio <= 1.0:
            failed.append(f"{label}: {deviation:.3e} > {allowance:.3e}")
        worst = max(worst, ratio)
    detail = "; ".join(failed) if failed else f"{len(checks)} checks"
    return CriterionResult(number=number, name=name, passed=not failed, measured=worst,
                           bound=1.0, detail=detail, seconds=seconds)


def _ordered(label: str, condition: bool) -> Check:
    """A yes/no check: deviation 0 passes, 1 fails"""
    return (label, 0.0 if condition else 1.0, 0.5)


def _decreasing(label: str, values: Sequence[float]) -> List[Check]:
    return [_ordered(f"{label}[{i}]", b < a) for i, (a, b) in enumerate(zip(values[:-1], values[1:]))]


# ---------------------------------------------------------------------------
# 1-4: fast checks
# ---------------------------------------------------------------------------

def printed_constants(store: GoldenStore) -> List[Check]:
    f0 = bcs.f_bcs(0.0)
    c1_zero = bcs.c1_fn(0.0)
    return [
        ("f_BCS(0)", f0 - F_BCS_ZERO_CHECK[0], F_BCS_ZERO_CHECK[1]),
        ("c1(0)", c1_zero - C1_ZERO_CHECK[0], C1_ZERO_CHECK[1]),
        ("alpha0", c1_zero / f0 - ALPHA0_CHECK[0], ALPHA0_CHECK[1]),
        ("a0", asymptotics.const_a0() - A0_CHECK[0], A0_CHECK[1]),
        ("a1", asymptotics.const_a1() - A1_CHECK[0], A1_CHECK[1]),
    ]


def dos_normalization(store: GoldenStore) -> List[Check]:
    quad = QuadratureSettings(abs_tol=1e-12, rel_tol=1e-11)
    checks = []
    for t_z in NORMALIZATION_TZ:
        total, _ = DosEvaluator(t_z).integrate(lambda e: 1.0, quad)
        checks.append((f"t_z={t_z}", 2.0 * total - 1.0, 1e-8))
    return checks


def _ratio_check(label: str, coarse_error: float, fine_error: float) -> Check:
    ratio = abs(coarse_error) / abs(fine_error) if fine_error else math.inf
    # inside [2^12/3, 3 * 2^12] <=> |log(ratio / 2^12)| <= log 3
    return (label, math.log(ratio / 2.0 ** 12) if ratio > 0 else math.inf, math.log(3.0))


def series_vs_quadrature(store: GoldenStore) -> List[Check]:
    def n0_error(eps):
        return asymptotics.n0_series(eps) - n0(eps, PRECISE)

    def ntz0_error(t_z):
        return asymptotics.n_tz0_series(t_z) - n_tz(0.0, t_z, PRECISE)

    return [
        ("n0 eps=0.1", n0_error(0.1), 5e-13),
        ("n0 eps=0.2", n0_error(0.2), 5e-13),
        # below eps ~ 0.5 the O(eps^12) remainder sits under double precision roundoff
        _ratio_check("n0 remainder order", n0_error(1.0), n0_error(0.5)),
        ("n_tz(0) t_z=0.1", ntz0_error(0.1), 5e-12),
        ("n_tz(0) t_z=0.2", ntz0_error(0.2), 5e-12),
        _ratio_check("n_tz(0) remainder order", ntz0_error(1.0), ntz0_error(0.5)),
    ]


def moment_identities(store: GoldenStore) -> List[Check]:
    checks = []
    for j in range(7):
        plain, _ = integrate(lambda u: 2.0 * u ** j / (math.pi * math.sqrt(4.0 - u * u)),
                             0.0, 2.0, PRECISE, right=EndpointFlag.SQRT)
        expected = asymptotics.semicircle_moment(j)
        checks.append((f"moment {j}", (plain - expected) / expected, 1e-10))
        weighted, _ = integrate(
            lambda u: 2.0 * u ** j * math.log(u) / (math.pi * math.sqrt(4.0 - u * u)),
            0.0, 2.0, PRECISE, left=EndpointFlag.LOG if j == 0 else EndpointFlag.NONE,
            right=EndpointFlag.SQRT,
        )
        checks.append((f"log moment {j}", weighted - asymptotics.semicircle_log_moment(j), 1e-10))
    return checks


# ---------------------------------------------------------------------------
# 5-6: solver properties and BCS identities
# ---------------------------------------------------------------------------

def solver_properties(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    for t_z, T in ((0.0, 0.1), (T_Z_3D, 0.05), (T_Z_3D, 0.0)):
        dos = get_dos(t_z)
        values = [f_big_t(float(d), T, dos, TIGHT) for d in np.linspace(0.05, 1.0, 10)]
        checks += _decreasing(f"F_T t_z={t_z} T={T}", values)

    for t_z, U in ((0.0, 2.0), (T_Z_3D, 1.5)):
        dos = get_dos(t_z)
        reference = solve_neel(U, t_z, dos, TIGHT).t_n
        for t_lo in np.linspace(0.02, 0.3, 16):
            t_n = solve_neel(U, t_z, dos, TIGHT, t_lo=float(t_lo)).t_n
            checks.append((f"T_N restart t_z={t_z} t_lo={t_lo:.3f}", t_n - reference, 1e-9))

        below = solve_gap(U, t_z, 0.5 * reference, reference, dos, TIGHT)
        above = solve_gap(U, t_z, 1.1 * reference, reference, dos, TIGHT)
        checks.append(_ordered(f"0 < delta_af < U/2 t_z={t_z}", 0.0 < below.delta_af < U / 2))
        checks.append(_ordered(f"delta_af = 0 above T_N t_z={t_z}", above.delta_af == 0.0))

        for T, solution in ((0.5 * reference, below), (1.2 * reference, None)):
            delta = solution.delta_af if solution is not None else 0.0
            scan = minimizer_scan(U, t_z, T, delta, 20, dos, TIGHT)
            checks.append((f"G_T minimizer t_z={t_z} T={T:.3e}", min(float(scan.min()), 0.0), 1e-10))
    return checks


def bcs_identities(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    for x in (0.5, 1.0, 2.0):
        for y in (0.2, 0.5, 0.9):
            checks.append((f"J closed form ({x}, {y})",
                           bcs.j_fn(x, y) - bcs.j_closed_form(x, y), 1e-8))

    rng = np.random.default_rng(20240611)
    accepted = 0
    while accepted < 12:
        x, y = float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.05, 0.9))
        j = bcs.j_fn(x, y)
        if math.exp(j) * y >= 0.99:
            continue
        image = bcs.f_bcs(math.exp(j) * y) * math.exp(-j)
        checks.append((f"fixed point ({x:.3f}, {y:.3f})", image - x, 1e-7))
        accepted += 1

    for y in (0.2, 0.5, 0.8):
        analytic = bcs.f_bcs_prime(y)
        numeric = central_derivative(bcs.f_bcs, y, 1e-4)
        checks.append((f"f_BCS'({y})", (analytic - numeric) / analytic, 1e-6))
    return checks


# ---------------------------------------------------------------------------
# 7-10: asymptotes against direct solvers
# ---------------------------------------------------------------------------

def _toward_one(label: str, deviations: Sequence[float]) -> List[Check]:
    return _decreasing(f"{label} |ratio - 1|", [abs(d) for d in deviations])


def neel_asymptotes(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    dos_2d = get_dos(0.0)
    deviations = [asymptotics.tn_asym_2d(U) / solve_neel(U, 0.0, dos_2d, TIGHT).t_n - 1.0
                  for U in TN_2D_GRID]
    checks += _toward_one("T_N 2D", deviations)
    checks.append(("T_N 2D U=0.4", deviations[-1], 0.03))
    _, bound, _ = store.check("tn_asym_2d", "U=0.4", abs(deviations[-1]))
    checks.append(("T_N 2D golden", abs(deviations[-1]), bound))

    dos_3d = get_dos(T_Z_3D)
    deviations = [asymptotics.tn_asym_3d(U, T_Z_3D, dos_3d) / solve_neel(U, T_Z_3D, dos_3d, TIGHT).t_n - 1.0
                  for U in TN_3D_GRID]
    checks += _toward_one("T_N 3D", deviations)
    checks.append(("T_N 3D U=0.8", deviations[-1], 0.05))
    _, bound, _ = store.check("tn_asym_3d", "U=0.8 t_z=0.5", abs(deviations[-1]))
    checks.append(("T_N 3D golden", abs(deviations[-1]), bound))
    return checks


def _m_hat_direct(U: float, t_z: float, y: float, dos: DosEvaluator) -> Tuple[float, float]:
    t_n = solve_neel(U, t_z, dos, TIGHT).t_n
    return solve_gap(U, t_z, y * t_n, t_n, dos, TIGHT).m_hat, t_n


def universality_breaking_2d(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    dos = get_dos(0.0)
    for y in REDUCED_TEMPERATURES:
        c1 = bcs.c1_fn(y)
        f = bcs.f_bcs(y)
        scaled = [(_m_hat_direct(U, 0.0, y, dos)[0] - f) / math.sqrt(U) for U in MHAT_2D_GRID]
        gaps = [s - c1 for s in scaled]
        checks += _decreasing(f"2D y={y} |(m_hat - f)/sqrt(U) - c1|", [abs(g) for g in gaps])
        checks.append((f"2D y={y} U=0.4 relative to c1", gaps[-1] / c1, 0.25))
    return checks


def universality_3d(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    dos = get_dos(T_Z_3D)
    for y in REDUCED_TEMPERATURES:
        f = bcs.f_bcs(y)
        without_g, with_g = [], []
        for U in MHAT_3D_GRID:
            m_hat, t_n = _m_hat_direct(U, T_Z_3D, y, dos)
            g = bcs.g_fn(U, T_Z_3D, y, t_n, dos)
            without_g.append(abs(m_hat - f))
            with_g.append(abs(m_hat - f - g))
        for i, (hi, lo) in enumerate(zip(MHAT_3D_GRID[:-1], MHAT_3D_GRID[1:])):
            cubic = (lo / hi) ** 3
            checks.append(_ordered(f"3D y={y} faster than U^3 [{i}]",
                                   without_g[i + 1] < cubic * without_g[i]))
        for U, a, b in zip(MHAT_3D_GRID, with_g, without_g):
            checks.append(_ordered(f"3D y={y} U={U} g reduces residual", a < b))
    return checks


def momentum_oracle(store: GoldenStore) -> List[Check]:
    checks: List[Check] = []
    dos = get_dos(0.0)
    for U, T in ((2.0, 0.0), (3.0, 0.2)):
        t_n = solve_neel(U, 0.0, dos, TIGHT).t_n
        checks.append((f"T_N U={U}", t_n - momentum_grid.neel_oracle(U), 1e-6))
        delta = solve_gap(U, 0.0, T, t_n, dos, TIGHT).delta_af
        checks.append((f"delta_af U={U} T={T}", delta - momentum_grid.gap_oracle(U, T), 1e-6))
    return checks


CRITERIA: List[Criterion] = [
    Criterion(1, "printed constants", True, printed_constants),
    Criterion(2, "DOS normalization", True, dos_normalization),
    Criterion(3, "series vs quadrature", True, series_vs_quadrature),
    Criterion(4, "moment identities", True, moment_identities),
    Criterion(5, "solver properties", False, solver_properties),
    Criterion(6, "BCS identities", False, bcs_identities),
    Criterion(7, "Neel asymptote convergence", False, neel_asymptotes),
    Criterion(8, "2D universality breaking", False, universality_breaking_2d),
    Criterion(9, "3D universality", False, universality_3d),
    Criterion(10, "momentum-grid oracle", False, momentum_oracle),
]


def run_criterion(criterion: Criterion, store: GoldenStore) -> CriterionResult:
    start = time.perf_counter()
    try:
        checks = criterion.run(store)
    except NeelLabError as e:
        logger.error(f"criterion {criterion.number} ({criterion.name}) raised: {e}")
        return CriterionResult(number=criterion.number, name=criterion.name, passed=False,
                               detail=f"{type(e).__name__}: {e}",
                               seconds=time.perf_counter() - start)
    return _summarize(criterion.number, criterion.name, checks, time.perf_counter() - start)


def run_verify(level: str = "quick", store: Optional[GoldenStore] = None) -> VerificationReport:
    store = store or GoldenStore()
    selected = [c for c in CRITERIA if c.quick or level == "full"]
    report = VerificationReport(level=level)
    for criterion in tqdm(selected, desc=f"verify ({level})", leave=False,
                          disable=not logger.isEnabledFor(logging.INFO)):
        result = run_criterion(criterion, store)
        verdict = "PASS" if result.passed else "FAIL"
        logger.info(f"[{verdict}] {result.number}. {result.name} ({result.seconds:.1f}s) {result.detail}")
        report.results.append(result)
    return report
