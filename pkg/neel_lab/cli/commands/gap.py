from neel_lab.cli.base import CommandRouter, quad_from, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.dos import get_dos
from neel_lab.services.gap import solve_gap
from neel_lab.services.neel import solve_neel

router = CommandRouter()

OUTPUTS = ["delta_af", "m_af", "m_hat", "t_n", "residual"]


@router.command(
    "gap",
    help="antiferromagnetic gap Delta_AF(U, t_z, T)",
    arguments=[range_argument("--tz", "hopping ratio t_z in [0, 2)", default="0"),
               range_argument("--u", "coupling U", required=True),
               range_argument("--t", "temperature T >= 0", default="0")],
)
def antiferromagnetic_gap(request: SweepRequest) -> int:
    quad = quad_from(request)

    def compute(point):
        dos = get_dos(point["tz"])
        t_n = solve_neel(point["u"], point["tz"], dos, quad).t_n
        solution = solve_gap(point["u"], point["tz"], point["t"], t_n, dos, quad)
        return {"delta_af": solution.delta_af, "m_af": solution.m_af, "m_hat": solution.m_hat,
                "t_n": t_n, "residual": solution.residual}

    run_sweep(request, ["tz", "u", "t"], keys=["u", "t"], outputs=OUTPUTS, compute=compute)
    return 0
