from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest

from cusplab import models
from cusplab.errors import DomainError, OptimalTruncationError, RangeError, RayObstructionError
from cusplab.models import ModelParams
from cusplab.series import (AsymptoticSeries, asymptotic_eval_optimal, borel_coefficient, borel_resum,
                            c1_branch, c2_branch, log_borel_coefficient, pade_exact,
                            xi4_asymptotic_series)

PF = ModelParams(field=0.01)


# ---------------------------------------------------------------- coefficients

def test_borel_coefficient_examples():
    assert borel_coefficient(0) == -10j
    assert borel_coefficient(1) == -87.5


@pytest.mark.parametrize("m", [0, 3, 17, 80, 165])
def test_borel_coefficient_against_mpmath(m):
    mpmath.mp.dps = 50
    ref = (mpmath.mpc(0, -1) ** (m + 1) * (m + 4) * mpmath.factorial(2 * m + 6)
           / (mpmath.factorial(m + 1) * mpmath.mpf(2) ** (2 * m + 5) * 9))
    got = borel_coefficient(m)
    assert abs(got - complex(ref)) <= 1e-15 * abs(complex(ref))


def test_borel_coefficient_ratio_grows_linearly():
    m = np.arange(40, 160).astype(float)
    ratio = np.array([abs(borel_coefficient(k + 1) / borel_coefficient(k)) for k in range(40, 160)])
    # |a_{m+1}/a_m| = (m+5)(2m+8)(2m+7) / ((m+4)(m+2) 4) ~ m
    exact = (m + 5) * (2 * m + 8) * (2 * m + 7) / ((m + 4) * (m + 2) * 4.0)
    assert np.allclose(ratio, exact, rtol=1e-13)
    # leading behaviour ratio ~ m + 13/2
    assert np.allclose(ratio - m, 6.5, atol=0.2)


def test_log_borel_coefficient():
    for m in (0, 50, 165):
        mag, ph = log_borel_coefficient(m)
        a = borel_coefficient(m)
        assert mag == pytest.approx(math.log(abs(a)), rel=1e-14)
        assert complex(math.cos(ph), math.sin(ph)) == pytest.approx(a / abs(a), abs=1e-15)
    mag, _ = log_borel_coefficient(200)
    assert mag > math.log(np.finfo(float).max)
    with pytest.raises(RangeError):
        borel_coefficient(166)
    with pytest.raises(DomainError):
        borel_coefficient(-1)
    with pytest.raises(DomainError):
        log_borel_coefficient(201)


# ---------------------------------------------------------------- optimal truncation

@pytest.mark.parametrize("rb", [0.3, 1.0, 7.0])
def test_terminating_branch_sums_exactly(rb):
    val, err = asymptotic_eval_optimal(c1_branch(), rb)
    assert err == 0.0
    assert val == pytest.approx(rb ** 3 + 4.5j * rb - 2.25 / rb + 0.375j / rb ** 3, rel=1e-15)


def test_optimal_truncation_matches_closed_form_at_10():
    val, err = asymptotic_eval_optimal(xi4_asymptotic_series(PF), 10.0)
    assert abs(val - complex(models.xi4_profile(10.0, PF))) <= err


def test_optimal_truncation_error_decreases():
    ser = xi4_asymptotic_series(PF)
    errs = [asymptotic_eval_optimal(ser, rb)[1] for rb in np.linspace(5, 20, 16)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_optimal_truncation_unavailable_at_small_rb():
    with pytest.raises(OptimalTruncationError):
        asymptotic_eval_optimal(xi4_asymptotic_series(PF), 1.0)


# ---------------------------------------------------------------- Borel-Pade

def test_geometric_series_borel_sum():
    ser = AsymptoticSeries((1.0,) * 41, var_power=1)
    assert abs(borel_resum(ser, 2.0, pade_order=20) - 2.0) < 1e-8


def test_euler_series_ray_sensitivity():
    # sum m! y^m has Borel transform 1/(1 - zeta): a pole on the positive axis
    ser = AsymptoticSeries(tuple(float(math.factorial(m)) for m in range(30)), var_power=1)
    x = 4.0
    with pytest.raises(RayObstructionError, match="another angle"):
        borel_resum(ser, x, ray_angle=0.0)
    below = borel_resum(ser, x)
    above = borel_resum(ser, x, ray_angle=math.pi / 4)
    # both lateral sums share the principal value; they differ by the pole's residue
    pv = float(x * mpmath.exp(-x) * mpmath.ei(x))
    assert below.real == pytest.approx(pv, rel=1e-12)
    assert above.real == pytest.approx(pv, rel=1e-12)
    assert (above - below).imag == pytest.approx(2 * math.pi * x * math.exp(-x), rel=1e-12)


@pytest.mark.parametrize("rb,tol", [(1.0, 1e-6), (2.0, 1e-6), (5.0, 1e-6)])
def test_borel_matches_closed_form(rb, tol):
    ref = complex(models.xi4_profile(rb, PF))
    assert abs(borel_resum(xi4_asymptotic_series(PF), rb) - ref) <= tol * abs(ref)


def test_borel_stable_in_pade_order():
    ser = xi4_asymptotic_series(PF)
    a = borel_resum(ser, 2.0, pade_order=12)
    b = borel_resum(ser, 2.0, pade_order=14)
    assert abs(a - b) <= 1e-8 * abs(a)


@pytest.mark.parametrize("rb", [5.0, 10.0, 15.0])
def test_borel_and_optimal_truncation_agree(rb):
    ser = xi4_asymptotic_series(PF)
    val, err = asymptotic_eval_optimal(ser, rb)
    assert abs(borel_resum(ser, rb) - val) <= err


def test_borel_errors():
    ser = c2_branch(n_terms=10)
    with pytest.raises(DomainError, match="coefficients"):
        borel_resum(ser, 2.0, pade_order=12)
    with pytest.raises(DomainError):
        borel_resum(xi4_asymptotic_series(PF), 2.0, ray_angle=math.pi / 2)
    with pytest.raises(DomainError):
        borel_resum(xi4_asymptotic_series(PF), 0.0)


def test_pade_exact_recovers_rational_function():
    # 1/(1 - z/3) * (1 + z): Taylor coefficients, then a [2/2] approximant degenerates to [1/1]
    b = [1.0] + [(1 / 3) ** k + (1 / 3) ** (k - 1) for k in range(1, 5)]
    p, q = pade_exact(b, 2)
    z = 0.7 + 0.2j
    approx = np.polyval(p[::-1], z) / np.polyval(q[::-1], z)
    assert approx == pytest.approx((1 + z) / (1 - z / 3), rel=1e-14)
    with pytest.raises(DomainError):
        pade_exact(b, 3)


def test_pade_exact_fraction_arithmetic():
    # exact binary inputs yield the exact [1/1] approximant of 1 + z/2 + z^2/4
    p, q = pade_exact([1.0, 0.5, 0.25], 1)
    assert p.tolist() == [1.0, 0.0] and q.tolist() == [1.0, -0.5]
    assert Fraction(0.25) == Fraction(1, 4)


# ---------------------------------------------------------------- containers

def test_series_json_round_trip():
    ser = xi4_asymptotic_series(PF, n_terms=30)
    back = AsymptoticSeries.loads(ser.dumps())
    assert back == ser


def test_series_validation():
    with pytest.raises(DomainError):
        AsymptoticSeries(())
    with pytest.raises(DomainError):
        AsymptoticSeries((1.0, math.inf))
    with pytest.raises(DomainError):
        AsymptoticSeries((1.0,), divergence="slow")
    with pytest.raises(DomainError):
        c2_branch(n_terms=0)
    with pytest.raises(DomainError):
        AsymptoticSeries.from_dict({"schema": "x"})
    assert c2_branch(n_terms=167).coeffs[-1] == borel_coefficient(165)
