import pytest

from neel_lab.cli.base import CommandRouter, execute, grid, quad_from, range_argument
from neel_lab.core.errors import DomainError, UsageError
from neel_lab.schemas.schemas import ParameterRange, SweepRequest

pytestmark = pytest.mark.cli


def _request(**ranges):
    return SweepRequest(command="dos", parameters={k: ParameterRange.parse(v) for k, v in ranges.items()})


def test_duplicate_commands_rejected():
    router = CommandRouter()

    @router.command("dos", help="first")
    def first(request):
        return 0

    with pytest.raises(ValueError):
        router.command("dos", help="second")(first)

    other = CommandRouter()
    other.command("dos", help="again")(first)
    with pytest.raises(ValueError):
        router.include_router(other)


def test_range_argument_parses_ranges():
    flags, options = range_argument("--eps", "energy", required=True)
    assert flags == ["--eps"]
    assert options["dest"] == "eps"
    assert options["type"]("0:1:3").values() == [0.0, 0.5, 1.0]


def test_grid_is_cartesian_with_first_name_slowest():
    points = grid(_request(tz="0:0.5:2", eps="1:2:2"), ["tz", "eps"])
    assert points == [
        {"tz": 0.0, "eps": 1.0},
        {"tz": 0.0, "eps": 2.0},
        {"tz": 0.5, "eps": 1.0},
        {"tz": 0.5, "eps": 2.0},
    ]


def test_grid_needs_every_parameter():
    with pytest.raises(UsageError, match="--eps"):
        grid(_request(tz="0"), ["tz", "eps"])


def test_tolerance_override():
    assert quad_from(_request()) is None
    quad = quad_from(SweepRequest(command="dos", tol=1e-9))
    assert quad.abs_tol == quad.rel_tol == 1e-9


def test_execute_maps_errors():
    def domain(request):
        raise DomainError("t_z outside [0, 2)")

    assert execute(domain, _request()) == 2
    assert execute(lambda request: 0, _request()) == 0
