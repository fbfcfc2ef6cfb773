import pytest

from wcolab.config import MATRIX_TOL, SYMBOL_TOL, Tolerances, _env_number
from wcolab.errors import JobParseError


def test_tolerance_overrides():
    assert Tolerances.from_overrides(None) == Tolerances()
    tol = Tolerances.from_overrides({"symbol": "1e-7", "matrix": None})
    assert tol.symbol == 1e-7
    assert tol.matrix == MATRIX_TOL
    assert Tolerances().symbol == SYMBOL_TOL


@pytest.mark.parametrize("overrides", [{"symbl": 1e-3}, {"matrix": "loose"}, {"self_map": 0.0}, {"symbol": -1.0}])
def test_bad_tolerance_overrides(overrides):
    with pytest.raises(JobParseError):
        Tolerances.from_overrides(overrides)


def test_env_number(monkeypatch):
    monkeypatch.setenv("WCO_LAB_TEST_VALUE", "12")
    assert _env_number("WCO_LAB_TEST_VALUE", 3, int) == 12
    monkeypatch.setenv("WCO_LAB_TEST_VALUE", "twelve")
    assert _env_number("WCO_LAB_TEST_VALUE", 3, int) == 3
    monkeypatch.setenv("WCO_LAB_TEST_VALUE", " ")
    assert _env_number("WCO_LAB_TEST_VALUE", 0.5) == 0.5
    monkeypatch.delenv("WCO_LAB_TEST_VALUE")
    assert _env_number("WCO_LAB_TEST_VALUE", 0.5) == 0.5
