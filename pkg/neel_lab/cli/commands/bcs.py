from neel_lab.cli.base import CommandRouter, range_argument, run_sweep
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.bcs import c1_fn, f_bcs, f_bcs_prime

router = CommandRouter()


@router.command(
    "bcs",
    help="f_BCS(y), its derivative and c1(y)",
    arguments=[range_argument("--y", "reduced temperature in [0, 0.95]", required=True)],
)
def bcs_function(request: SweepRequest) -> int:
    def compute(point):
        y = point["y"]
        f = f_bcs(y)
        return {"f_bcs": f, "f_bcs_prime": f_bcs_prime(y, x=f), "c1": c1_fn(y)}

    run_sweep(request, ["y"], keys=["y"], outputs=["f_bcs", "f_bcs_prime", "c1"], compute=compute)
    return 0
