from neel_lab.cli.base import CommandRouter
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.csv_io import write_csv
from neel_lab.services.figures import emit_figure

router = CommandRouter()


@router.command(
    "figure",
    help="emit the data series behind figure 1..8",
    arguments=[(["--id"], {"dest": "figure_id", "type": int, "required": True,
                           "choices": range(1, 9), "help": "figure number"})],
)
def figure(request: SweepRequest) -> int:
    table = emit_figure(request.figure_id)
    write_csv(table, request.out)
    return 0
