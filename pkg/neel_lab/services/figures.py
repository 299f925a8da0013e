"""Data series behind the eight figures: densities of states, f_BCS and c1,
Neel temperatures and gap ratios against their asymptotes.

Rows that fall below the underflow guard carry status "underflow_guard" and
empty values instead of failing the whole figure.
"""
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np
from tqdm import tqdm

from neel_lab.core.errors import DomainError, UnderflowGuardError
from neel_lab.schemas.schemas import CsvTable, QuadratureSettings
from neel_lab.services import asymptotics
from neel_lab.services.bcs import BcsCurve, alpha0, c1_fn, get_bcs_curve
from neel_lab.services.csv_io import table_from_records, write_csv
from neel_lab.services.dos import DosEvaluator, get_dos, n0, n_tz
from neel_lab.services.gap import solve_gap
from neel_lab.services.neel import solve_neel

logger = logging.getLogger(__name__)

FIGURE_QUAD = QuadratureSettings(abs_tol=1e-13, rel_tol=1e-12)
T_Z_3D = 0.5
REDUCED_TEMPERATURES = (0.0, 0.5)
U_GRID_2D = (0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0)
U_GRID_3D = (0.8, 1.0, 1.2, 1.5, 2.0, 3.0, 4.0)
STATUS_OK = "ok"
STATUS_GUARD = "underflow_guard"

Record = Dict[str, Union[float, str]]


def _progress(items, desc: str):
    return tqdm(items, desc=desc, leave=False, disable=not logger.isEnabledFor(logging.INFO))


def _leading_log(x: float) -> float:
    return math.log(16.0 / x) / (2.0 * math.pi ** 2)


def figure_1() -> CsvTable:
    """N_tz(eps) for t_z = 0 and t_z = 0.5"""
    records: List[Record] = []
    eps_grid = np.linspace(0.0, 6.0, 241)[1:]
    dos_3d = get_dos(T_Z_3D)
    for eps in _progress(eps_grid, "figure 1"):
        records.append({"t_z": 0.0, "eps": eps, "n_tz": n0(float(eps))})
    for eps in _progress(eps_grid, "figure 1"):
        records.append({"t_z": T_Z_3D, "eps": eps, "n_tz": dos_3d(float(eps))})
    return table_from_records(["t_z", "eps", "n_tz"], records)


def figure_2(curve: Optional[BcsCurve] = None) -> CsvTable:
    """f_BCS(y), c1(y) and the deviation c1 - alpha0 f_BCS"""
    curve = curve or get_bcs_curve()
    alpha = alpha0(curve)
    records: List[Record] = []
    for y in _progress(np.linspace(0.0, curve.y_max, 20), "figure 2"):
        f = curve.f(float(y))
        c1 = c1_fn(float(y), curve)
        records.append({"y": y, "f_bcs": f, "c1": c1, "c1_minus_alpha0_f": c1 - alpha * f})
    return table_from_records(["y", "f_bcs", "c1", "c1_minus_alpha0_f"], records)


def figure_3() -> CsvTable:
    """N0 against its leading logarithm and the truncated series"""
    records: List[Record] = []
    for eps in _progress(np.linspace(0.02, 1.0, 50), "figure 3"):
        e = float(eps)
        records.append({"eps": e, "n0": n0(e), "leading": _leading_log(e),
                        "series": asymptotics.n0_series(e)})
    return table_from_records(["eps", "n0", "leading", "series"], records)


def figure_4() -> CsvTable:
    """N_tz(0) as a function of t_z with both approximations"""
    records: List[Record] = []
    for t_z in _progress(np.linspace(0.01, 1.0, 50), "figure 4"):
        t = float(t_z)
        records.append({"t_z": t, "n_tz0": n_tz(0.0, t), "leading": _leading_log(t),
                        "series": asymptotics.n_tz0_series(t)})
    return table_from_records(["t_z", "n_tz0", "leading", "series"], records)


def _guarded(row: Record, columns: List[str], compute: Callable[[], Record]) -> Record:
    try:
        row.update(compute())
        row["status"] = STATUS_OK
    except UnderflowGuardError as e:
        logger.warning(f"row {row} skipped: {e}")
        row.update({name: math.nan for name in columns})
        row["status"] = STATUS_GUARD
    return row


def figure_5() -> CsvTable:
    """T_N direct and asymptotic, 2D and 3D at t_z = 0.5"""
    records: List[Record] = []
    dos_2d = get_dos(0.0)
    dos_3d = get_dos(T_Z_3D)
    for t_z, dos, grid in ((0.0, dos_2d, U_GRID_2D), (T_Z_3D, dos_3d, U_GRID_3D)):
        for U in _progress(grid, f"figure 5 t_z={t_z}"):
            def compute(U=U, t_z=t_z, dos=dos) -> Record:
                t_n = solve_neel(U, t_z, dos, FIGURE_QUAD).t_n
                if t_z == 0.0:
                    asym = asymptotics.tn_asym_2d(U)
                else:
                    asym = asymptotics.tn_asym_3d(U, t_z, dos)
                return {"t_n": t_n, "t_n_asym": asym}
            records.append(_guarded({"t_z": t_z, "u": U}, ["t_n", "t_n_asym"], compute))
    return table_from_records(["t_z", "u", "t_n", "t_n_asym", "status"], records)


def _gap_ratio_rows(t_z: float, dos: DosEvaluator, grid, columns: List[str],
                    predict: Callable[[float, float, float], Record], desc: str) -> List[Record]:
    records: List[Record] = []
    for U in _progress(grid, desc):
        try:
            t_n = solve_neel(U, t_z, dos, FIGURE_QUAD).t_n
        except UnderflowGuardError:
            t_n = None
        for y in REDUCED_TEMPERATURES:
            def compute(U=U, y=y, t_n=t_n) -> Record:
                if t_n is None:
                    raise UnderflowGuardError(f"U={U} below the underflow guard")
                solution = solve_gap(U, t_z, y * t_n, t_n, dos, FIGURE_QUAD)
                row = {"t_n": t_n, "m_hat": solution.m_hat}
                row.update(predict(U, y, t_n))
                return row
            records.append(_guarded({"u": U, "y": y}, ["t_n", "m_hat"] + columns, compute))
    return records


def figure_6(curve: Optional[BcsCurve] = None) -> CsvTable:
    """2D gap ratio against f_BCS(y) + c1(y) sqrt(U)"""
    curve = curve or get_bcs_curve()
    columns = ["f_bcs", "prediction"]

    def predict(U, y, t_n):
        return {"f_bcs": curve.f(y), "prediction": asymptotics.mhat_asym_2d(U, y, curve)}

    records = _gap_ratio_rows(0.0, get_dos(0.0), U_GRID_2D, columns, predict, "figure 6")
    return table_from_records(["u", "y", "t_n", "m_hat"] + columns + ["status"], records)


def figure_7() -> CsvTable:
    """3D gap ratio at t_z = 0.5 against f_BCS(y)"""
    columns = ["prediction"]

    def predict(U, y, t_n):
        return {"prediction": asymptotics.mhat_asym_3d(U, T_Z_3D, y)}

    records = _gap_ratio_rows(T_Z_3D, get_dos(T_Z_3D), U_GRID_3D, columns, predict, "figure 7")
    return table_from_records(["u", "y", "t_n", "m_hat"] + columns + ["status"], records)


def figure_8(curve: Optional[BcsCurve] = None) -> CsvTable:
    """3D gap ratio at t_z = 0.5 against f_BCS(y) + g(U, t_z, y)"""
    curve = curve or get_bcs_curve()
    dos = get_dos(T_Z_3D)
    columns = ["f_bcs", "prediction"]

    def predict(U, y, t_n):
        return {
            "f_bcs": asymptotics.mhat_asym_3d(U, T_Z_3D, y),
            "prediction": asymptotics.mhat_asym_3d(U, T_Z_3D, y, include_g=True, t_n=t_n,
                                                   dos=dos, curve=curve),
        }

    records = _gap_ratio_rows(T_Z_3D, dos, U_GRID_3D, columns, predict, "figure 8")
    return table_from_records(["u", "y", "t_n", "m_hat"] + columns + ["status"], records)


FIGURES: Dict[int, Callable[[], CsvTable]] = {
    1: figure_1,
    2: figure_2,
    3: figure_3,
    4: figure_4,
    5: figure_5,
    6: figure_6,
    7: figure_7,
    8: figure_8,
}


def emit_figure(figure_id: int, out: Optional[Union[str, Path]] = None) -> CsvTable:
    if figure_id not in FIGURES:
        raise DomainError(f"unknown figure {figure_id}; expected 1..{len(FIGURES)}")
    logger.info(f"Emitting data for figure {figure_id}")
    table = FIGURES[figure_id]()
    if out is not None:
        write_csv(table, out)
    return table
