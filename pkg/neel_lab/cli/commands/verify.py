from neel_lab.cli.base import CommandRouter
from neel_lab.schemas.schemas import SweepRequest
from neel_lab.services.csv_io import table_from_records, write_csv
from neel_lab.services.verification import run_verify

router = CommandRouter()

COLUMNS = ["number", "name", "passed", "measured", "bound", "seconds"]


@router.command(
    "verify",
    help="run the acceptance checks; exit 0 only if all pass",
    arguments=[(["--level"], {"choices": ["quick", "full"], "default": "quick",
                              "help": "quick runs criteria 1-4, full runs all"})],
)
def verify(request: SweepRequest) -> int:
    report = run_verify(request.level)
    records = [
        {"number": r.number, "name": r.name, "passed": "pass" if r.passed else "fail",
         "measured": r.measured if r.measured is not None else float("nan"),
         "bound": r.bound if r.bound is not None else float("nan"), "seconds": r.seconds}
        for r in report.results
    ]
    write_csv(table_from_records(COLUMNS, records), request.out)
    return 0 if report.passed else 1
