import pytest

from neel_lab.schemas.schemas import QuadratureSettings
from neel_lab.services.bcs import get_bcs_curve
from neel_lab.services.dos import get_dos


@pytest.fixture(autouse=True)
def isolated_golden(tmp_path, monkeypatch):
    """Every test gets its own golden directory"""
    directory = tmp_path / "golden"
    monkeypatch.setenv("NEEL_LAB_GOLDEN", str(directory))
    return directory


@pytest.fixture(scope="session")
def tight_quad():
    return QuadratureSettings(abs_tol=1e-13, rel_tol=1e-12)


@pytest.fixture(scope="session")
def dos_2d():
    return get_dos(0.0)


@pytest.fixture(scope="session")
def dos_3d():
    return get_dos(0.5)


@pytest.fixture(scope="session")
def bcs_curve():
    return get_bcs_curve()
