import math

import pytest

from neel_lab.core.errors import DomainError
from neel_lab.services import verification
from neel_lab.services.golden import GoldenStore
from neel_lab.services.verification import Criterion, run_criterion, run_verify


@pytest.mark.unit
def test_summary_of_passing_checks():
    result = verification._summarize(3, "demo", [("a", 1e-9, 1e-8), ("b", -2e-9, 1e-8)], 0.1)
    assert result.passed
    assert result.measured == pytest.approx(0.2)
    assert result.bound == 1.0
    assert result.detail == "2 checks"


@pytest.mark.unit
def test_summary_names_the_failing_check():
    result = verification._summarize(3, "demo", [("a", 1e-9, 1e-8), ("b", 1.0, 1e-8)], 0.1)
    assert not result.passed
    assert result.detail.startswith("b:")


@pytest.mark.unit
def test_ordering_helpers():
    assert verification._ordered("x", True)[1] == 0.0
    assert verification._ordered("x", False)[1] == 1.0
    checks = verification._decreasing("seq", [3.0, 2.0, 2.5])
    assert [c[1] for c in checks] == [0.0, 1.0]


@pytest.mark.unit
def test_criterion_errors_are_reported_not_raised():
    def broken(store):
        raise DomainError("outside the window")

    result = run_criterion(Criterion(99, "broken", True, broken), GoldenStore())
    assert not result.passed
    assert "DomainError" in result.detail


@pytest.mark.unit
def test_quick_level_selects_first_four(mocker):
    calls = []

    def fake(number):
        def run(store):
            calls.append(number)
            return [("ok", 0.0, 1.0)]
        return run

    patched = [Criterion(c.number, c.name, c.quick, fake(c.number)) for c in verification.CRITERIA]
    mocker.patch.object(verification, "CRITERIA", patched)
    report = run_verify("quick")
    assert calls == [1, 2, 3, 4]
    assert report.passed
    run_verify("full")
    assert calls[4:] == list(range(1, 11))


@pytest.mark.slow
def test_quick_criteria_pass():
    report = run_verify("quick")
    failures = [(r.number, r.detail) for r in report.results if not r.passed]
    assert failures == []
    assert all(math.isfinite(r.measured) for r in report.results)
