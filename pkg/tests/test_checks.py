import json
from pathlib import Path

import pytest

from cusplab import checks
from cusplab.errors import UnsupportedError

DOCS = Path(__file__).resolve().parents[1] / "docs" / "checks.md"

FAST_PASSING = ["te_residual_m0_3", "te_residual_m4", "te_divergence", "s_equation", "borel_eq20",
                "tail_identity", "half_power_free", "figure1_small_r"]


def test_registry_documents_every_check():
    text = DOCS.read_text()
    assert text == checks.render_markdown()
    for name, chk in checks.REGISTRY.items():
        assert f"## `{name}`" in text
        assert chk.anchor and chk.summary


def test_registry_contents():
    expected = set(FAST_PASSING) | {"figure1_large_r", "free_propagation", "ehrenfest",
                                    "special_functions", "t11_2_amplitude"}
    assert set(checks.REGISTRY) == expected


@pytest.mark.parametrize("name", FAST_PASSING)
def test_fast_checks_pass(name):
    res = checks.run_check(name)
    assert res.passed, res.measured
    assert res.status == "run"
    json.dumps(res.to_dict())


def test_borel_check_values():
    res = checks.run_check("borel_eq20")
    assert res.measured["max_relative"] <= 1e-6
    assert res.measured["truncation_ratio"] <= 1.0


def test_tail_identity_check_values():
    res = checks.run_check("tail_identity")
    assert res.measured["relative"] <= 1e-12
    assert res.measured["quadrature_relative"] <= 0.03


def test_c2_negative_control():
    res = checks.run_check("te_residual_m4", {"c2_scale": 0.0})
    assert not res.passed
    assert "diverges" in res.details
    assert res.measured["small_r_growth"] > 10


def test_figure1_large_r_is_reported_failure():
    res = checks.run_check("figure1_large_r")
    assert not res.passed
    assert res.measured["max_relative"] > 1e-4


def test_special_functions_reports_scaled_reflection():
    res = checks.run_check("special_functions")
    assert res.measured["erfc_relative"] <= 1e-10
    assert res.measured["gamma_relative"] <= 1e-12
    assert res.measured["reflection_scaled"] <= 1e-10
    assert res.passed == (res.measured["reflection_relative"] <= 1e-10)


def test_t11_2_is_substituted():
    res = checks.run_check("t11_2_amplitude")
    assert res.status == "substituted"
    assert res.passed
    assert set(res.measured["substitutes"]) == set(checks.SUBSTITUTES)
    # 8 sqrt(2) E / pi * 0.01^5.5: far below the O(E t^2) integer-power response (5e-7)
    assert res.measured["amplitude_at_r1_t0.01"] == pytest.approx(3.601e-13, rel=1e-3)


def test_unknown_check():
    with pytest.raises(UnsupportedError, match="known"):
        checks.run_check("nope")
