import pytest

from neel_lab.cli.router import cli_router
from neel_lab.core.errors import ConvergenceError
from neel_lab.main import build_parser, main
from neel_lab.schemas.schemas import CriterionResult, CsvTable, VerificationReport
from neel_lab.services.csv_io import read_csv

pytestmark = pytest.mark.cli


def _rows(text):
    lines = text.strip().split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_every_command_is_registered():
    assert set(cli_router.commands) == {"dos", "neel", "gap", "mhat", "bcs", "asym", "verify", "figure"}
    assert build_parser().parse_args(["figure", "--id", "2"]).figure_id == 2


def test_dos_sweep(capsys):
    assert main(["dos", "--tz", "0.5", "--eps", "0:5:101"]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["eps", "n_tz"]
    assert len(rows) == 101
    assert float(rows[-1][1]) == 0.0


def test_swept_parameters_get_columns(capsys):
    assert main(["dos", "--tz", "0:0.5:2", "--eps", "1"]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["tz", "eps", "n_tz"]
    assert len(rows) == 2


def test_dos_tolerance_reaches_quadrature(mocker, capsys):
    direct = mocker.patch("neel_lab.cli.commands.dos.n_tz", return_value=0.25)
    interpolant = mocker.patch("neel_lab.cli.commands.dos.get_dos")
    assert main(["dos", "--tz", "0.5", "--eps", "0:1:3", "--tol", "1e-9"]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert [float(row[1]) for row in rows] == [0.25, 0.25, 0.25]
    assert direct.call_count == 3
    quad = direct.call_args.args[2]
    assert (quad.abs_tol, quad.rel_tol) == (1e-9, 1e-9)
    interpolant.assert_not_called()


def test_output_file(tmp_path, capsys):
    path = tmp_path / "dos.csv"
    assert main(["dos", "--eps", "0.5:1:3", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert read_csv(path).header == ["eps", "n_tz"]


def test_bcs_at_zero(capsys):
    assert main(["bcs", "--y", "0"]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["y", "f_bcs", "f_bcs_prime", "c1"]
    assert float(rows[0][1]) == pytest.approx(1.76388, abs=1e-5)
    assert float(rows[0][2]) == 0.0


def test_neel_columns(mocker, capsys):
    solve = mocker.patch("neel_lab.cli.commands.neel.solve_neel")
    solve.return_value = mocker.Mock(t_n=0.125, residual=1e-12)
    assert main(["neel", "--tz", "0", "--u", "0.4:2:9"]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["u", "t_n", "residual"]
    assert len(rows) == 9
    assert solve.call_count == 9


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["neel", "--tz", "0"],
    ["dos", "--eps", "5:0:3"],
    ["dos", "--eps", "1:2"],
    ["dos", "--eps", "abc"],
    ["figure", "--id", "9"],
])
def test_usage_errors_exit_64(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 64


def test_invalid_tolerance_is_a_usage_error():
    assert main(["dos", "--eps", "1", "--tol", "-1"]) == 64


def test_domain_error_exit_code():
    # U below the 2D underflow guard
    assert main(["neel", "--tz", "0", "--u", "0.1"]) == 2


def test_convergence_error_exit_code(mocker):
    mocker.patch("neel_lab.cli.commands.neel.solve_neel",
                 side_effect=ConvergenceError("bracket expansion exhausted"))
    assert main(["neel", "--tz", "0", "--u", "1"]) == 3


def test_unexpected_error_exit_code(mocker):
    mocker.patch("neel_lab.cli.commands.neel.solve_neel", side_effect=RuntimeError("boom"))
    assert main(["neel", "--tz", "0", "--u", "1"]) == 1


def test_verify_reports_failures(mocker, capsys):
    report = VerificationReport(level="quick", results=[
        CriterionResult(number=1, name="printed constants", passed=True, measured=0.1, bound=1.0),
        CriterionResult(number=2, name="DOS normalization", passed=False, detail="golden file corrupted"),
    ])
    run = mocker.patch("neel_lab.cli.commands.verify.run_verify", return_value=report)
    assert main(["verify", "--level", "quick"]) == 1
    run.assert_called_once_with("quick")
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["number", "name", "passed", "measured", "bound", "seconds"]
    assert [row[2] for row in rows] == ["pass", "fail"]


def test_verify_passes(mocker):
    report = VerificationReport(level="full", results=[
        CriterionResult(number=1, name="printed constants", passed=True, measured=0.1, bound=1.0),
    ])
    mocker.patch("neel_lab.cli.commands.verify.run_verify", return_value=report)
    assert main(["verify", "--level", "full"]) == 0


def test_figure(mocker, capsys):
    table = CsvTable(header=["eps", "n0"], rows=[[0.5, 0.25]])
    emit = mocker.patch("neel_lab.cli.commands.figure.emit_figure", return_value=table)
    assert main(["figure", "--id", "3"]) == 0
    emit.assert_called_once_with(3)
    assert capsys.readouterr().out.startswith("eps,n0\n")
