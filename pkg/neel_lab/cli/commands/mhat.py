import math

from neel_lab.cli.base import CommandRouter, quad_from, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.bcs import c1_fn, f_bcs, g_fn
from neel_lab.services.dos import get_dos
from neel_lab.services.gap import solve_gap
from neel_lab.services.neel import solve_neel

router = CommandRouter()

OUTPUTS = ["t_n", "m_hat", "f_bcs", "prediction"]


@router.command(
    "mhat",
    help="gap ratio m_hat(U, t_z, y T_N) against its small-U prediction",
    arguments=[range_argument("--tz", "hopping ratio t_z in [0, 2)", default="0"),
               range_argument("--u", "coupling U", required=True),
               range_argument("--y", "reduced temperature T/T_N in [0, 0.95]", default="0")],
)
def gap_ratio(request: SweepRequest) -> int:
    """2D prediction is f_BCS(y) + c1(y) sqrt(U); 3D adds g(U, t_z, y) to f_BCS(y)"""
    quad = quad_from(request)

    def compute(point):
        U, t_z, y = point["u"], point["tz"], point["y"]
        dos = get_dos(t_z)
        t_n = solve_neel(U, t_z, dos, quad).t_n
        m_hat = solve_gap(U, t_z, y * t_n, t_n, dos, quad).m_hat
        f = f_bcs(y)
        if t_z == 0.0:
            prediction = f + c1_fn(y) * math.sqrt(U)
        else:
            prediction = f + g_fn(U, t_z, y, t_n, dos)
        return {"t_n": t_n, "m_hat": m_hat, "f_bcs": f, "prediction": prediction}

    run_sweep(request, ["tz", "u", "y"], keys=["u", "y"], outputs=OUTPUTS, compute=compute)
    return 0
