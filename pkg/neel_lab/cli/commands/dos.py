from neel_lab.cli.base import CommandRouter, quad_from, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.dos import get_dos, n0, n_tz

router = CommandRouter()


@router.command(
    "dos",
    help="density of states N_tz(eps)",
    arguments=[range_argument("--tz", "hopping ratio t_z in [0, 2)", default="0"),
               range_argument("--eps", "energy", required=True)],
)
def density_of_states(request: SweepRequest) -> int:
    quad = quad_from(request)

    def compute(point):
        t_z, eps = point["tz"], point["eps"]
        if t_z == 0.0:
            value = n0(eps, quad)
        elif quad is not None:
            # an explicit --tol asks for direct quadrature at that tolerance
            value = n_tz(eps, t_z, quad)
        else:
            value = get_dos(t_z)(eps)
        return {"n_tz": value}

    run_sweep(request, ["tz", "eps"], keys=["eps"], outputs=["n_tz"], compute=compute)
    return 0
