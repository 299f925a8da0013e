"""Direct solvers against their small-coupling asymptotes. Minutes, not seconds."""
import pytest

from neel_lab.services import asymptotics, verification
from neel_lab.services.bcs import f_bcs, g_fn
from neel_lab.services.gap import solve_gap
from neel_lab.services.golden import GoldenStore
from neel_lab.services.neel import solve_neel

pytestmark = [pytest.mark.integration, pytest.mark.slow]


def _failures(checks):
    return [(label, deviation, allowance) for label, deviation, allowance in checks
            if not abs(deviation) <= allowance]


@pytest.mark.parametrize("criterion", [
    verification.solver_properties,
    verification.bcs_identities,
    verification.neel_asymptotes,
    verification.universality_breaking_2d,
    verification.universality_3d,
    verification.momentum_oracle,
])
def test_criterion_checks(criterion):
    assert _failures(criterion(GoldenStore())) == []


def test_neel_asymptote_golden_is_recorded_then_enforced():
    store = GoldenStore()
    verification.neel_asymptotes(store)
    first = store.get("tn_asym_2d", "U=0.4")
    assert first is not None
    assert _failures(verification.neel_asymptotes(store)) == []
    assert store.get("tn_asym_2d", "U=0.4") == first


@pytest.mark.parametrize("y", [0.0, 0.5])
def test_g_improves_3d_gap_ratio(dos_3d, bcs_curve, y):
    t_n = solve_neel(1.0, 0.5, dos_3d).t_n
    m_hat = solve_gap(1.0, 0.5, y * t_n, t_n, dos_3d).m_hat
    leading = f_bcs(y)
    corrected = leading + g_fn(1.0, 0.5, y, t_n, dos_3d, bcs_curve)
    assert abs(m_hat - corrected) < abs(m_hat - leading)


def test_3d_neel_asymptote_at_weak_coupling(dos_3d):
    t_n = solve_neel(0.8, 0.5, dos_3d).t_n
    assert abs(asymptotics.tn_asym_3d(0.8, 0.5, dos_3d) / t_n - 1.0) < 0.05
