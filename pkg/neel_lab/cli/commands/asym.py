from neel_lab.cli.base import CommandRouter, quad_from, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services import asymptotics
from neel_lab.services.dos import get_dos
from neel_lab.services.neel import solve_neel

router = CommandRouter()


@router.command(
    "asym",
    help="Neel temperature against its small-U asymptote",
    arguments=[range_argument("--tz", "hopping ratio t_z in [0, 2)", default="0"),
               range_argument("--u", "coupling U", required=True)],
)
def neel_asymptote(request: SweepRequest) -> int:
    quad = quad_from(request)

    def compute(point):
        U, t_z = point["u"], point["tz"]
        dos = get_dos(t_z)
        t_n = solve_neel(U, t_z, dos, quad).t_n
        if t_z == 0.0:
            asym = asymptotics.tn_asym_2d(U)
        else:
            asym = asymptotics.tn_asym_3d(U, t_z, dos)
        return {"t_n": t_n, "t_n_asym": asym, "ratio": asym / t_n}

    run_sweep(request, ["tz", "u"], keys=["u"], outputs=["t_n", "t_n_asym", "ratio"], compute=compute)
    return 0
