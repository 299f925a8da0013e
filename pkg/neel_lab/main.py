import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from pydantic import ValidationError

from neel_lab import __version__
from neel_lab.cli.base import execute
from neel_lab.cli.router import cli_router
from neel_lab.core.config import settings
from neel_lab.core.errors import UsageError
from neel_lab.core.logging_config import setup_logging
from neel_lab.schemas.schemas import ParameterRange, SweepRequest

logger = logging.getLogger(__name__)


class UsageParser(argparse.ArgumentParser):
    """argparse reports usage errors with exit 2; the CLI contract wants 64"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> UsageParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="quadrature tolerance, absolute and relative")
    common.add_argument("--out", help="output CSV path; stdout when omitted")
    common.add_argument("--log-level", default=settings.LOG_LEVEL)
    common.add_argument("--log-file", default=settings.LOG_FILE)

    parser = UsageParser(
        prog=settings.PROJECT_NAME,
        description="Hartree-Fock mean-field numerics for the anisotropic 3D Hubbard model",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=UsageParser)
    subparsers.required = True
    for command in cli_router.commands.values():
        sub = subparsers.add_parser(command.name, help=command.help, parents=[common])
        for flags, options in command.arguments:
            sub.add_argument(*flags, **options)
    return parser


def request_from(args: argparse.Namespace) -> SweepRequest:
    values = vars(args)
    parameters = {name: value for name, value in values.items() if isinstance(value, ParameterRange)}
    fields = {name: values[name] for name in ("figure_id", "level") if values.get(name) is not None}
    return SweepRequest(command=args.command, parameters=parameters, tol=args.tol, out=args.out, **fields)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        request = request_from(args)
    except (ValidationError, ValueError) as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog}: error: {e}\n")
        return UsageError.exit_code

    setup_logging(args.log_level, args.log_file)
    logger.debug(f"Request: {request}")
    handler = cli_router.commands[request.command].handler
    return execute(handler, request)


if __name__ == "__main__":
    sys.exit(main())
