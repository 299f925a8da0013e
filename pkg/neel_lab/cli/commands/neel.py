from neel_lab.cli.base import CommandRouter, quad_from, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.dos import get_dos
from neel_lab.services.neel import solve_neel

router = CommandRouter()


@router.command(
    "neel",
    help="Neel temperature T_N(U, t_z)",
    arguments=[range_argument("--tz", "hopping ratio t_z in [0, 2)", default="0"),
               range_argument("--u", "coupling U", required=True)],
)
def neel_temperature(request: SweepRequest) -> int:
    quad = quad_from(request)

    def compute(point):
        result = solve_neel(point["u"], point["tz"], get_dos(point["tz"]), quad)
        return {"t_n": result.t_n, "residual": result.residual}

    run_sweep(request, ["tz", "u"], keys=["u"], outputs=["t_n", "residual"], compute=compute)
    return 0
