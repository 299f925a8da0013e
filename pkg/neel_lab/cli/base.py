"""Building blocks shared by the CLI commands: registry, sweeps, exit codes."""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from neel_lab.core.config import settings
from neel_lab.core.errors import NeelLabError, UsageError
from neel_lab.schemas.schemas import CsvTable, ParameterRange, QuadratureSettings, SweepRequest
from neel_lab.services.csv_io import table_from_records, write_csv

logger = logging.getLogger(__name__)

Handler = Callable[[SweepRequest], int]
Argument = Tuple[Sequence[str], Dict[str, Any]]


class Command(NamedTuple):
    name: str
    help: str
    handler: Handler
    arguments: Sequence[Argument]


class CommandRouter:
    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def command(self, name: str, help: str, arguments: Sequence[Argument] = ()):
        def register(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"command {name!r} registered twice")
            self.commands[name] = Command(name, help, handler, arguments)
            return handler
        return register

    def include_router(self, other: "CommandRouter") -> None:
        for command in other.commands.values():
            if command.name in self.commands:
                raise ValueError(f"command {command.name!r} registered twice")
            self.commands[command.name] = command


def range_argument(flag: str, help: str, required: bool = False,
                   default: Optional[str] = None) -> Argument:
    return ([flag], {"dest": flag.lstrip("-"), "required": required, "default": default,
                     "type": ParameterRange.parse, "help": f"{help}: a value or start:stop:count"})


def quad_from(request: SweepRequest) -> Optional[QuadratureSettings]:
    """--tol overrides both quadrature tolerances"""
    if request.tol is None:
        return None
    return QuadratureSettings(abs_tol=request.tol, rel_tol=request.tol)


def grid(request: SweepRequest, names: Sequence[str]) -> List[Dict[str, float]]:
    """Cartesian product of the named ranges, first name varying slowest"""
    missing = [name for name in names if name not in request.parameters]
    if missing:
        raise UsageError(f"{request.command} needs --{', --'.join(missing)}")
    axes = [request.parameters[name].values() for name in names]
    return [dict(zip(names, point)) for point in itertools.product(*axes)]


def run_sweep(
    request: SweepRequest,
    names: Sequence[str],
    keys: Sequence[str],
    outputs: Sequence[str],
    compute: Callable[[Dict[str, float]], Dict[str, Any]],
) -> CsvTable:
    """Evaluate compute over the grid and write the CSV.

    keys are always written; any other parameter gets a column only when swept.
    Rows may run on SWEEP_WORKERS threads; output keeps input order.
    """
    points = grid(request, names)
    columns = [name for name in names if name in keys or request.is_swept(name)]
    logger.info(f"{request.command}: {len(points)} points on {settings.SWEEP_WORKERS} worker(s)")
    with ThreadPoolExecutor(max_workers=max(settings.SWEEP_WORKERS, 1)) as pool:
        results = list(pool.map(compute, points))
    records = [{**{c: point[c] for c in columns}, **result} for point, result in zip(points, results)]
    table = table_from_records(columns + list(outputs), records)
    write_csv(table, request.out)
    return table


def execute(handler: Handler, request: SweepRequest) -> int:
    """Run a handler and translate failures into exit codes"""
    try:
        return handler(request)
    except NeelLabError as e:
        logger.error(f"{request.command} failed ({type(e).__name__}): {e}")
        return e.exit_code
    except Exception:
        logger.exception(f"{request.command} failed unexpectedly")
        return 1


