from fractions import Fraction
import math

import numpy as np
import pytest
from scipy import integrate

from cusplab import analysis, models
from cusplab.errors import DomainError, FitError, RangeError, UnsupportedError
from cusplab.models import ModelParams

# ---------------------------------------------------------------- fits


def test_fit_exact_power_law():
    t = np.geomspace(1e-3, 1e-1, 12)
    fit = analysis.fit_half_power(t, 3 * t ** 2.5 * np.exp(1j * t))
    assert fit.exponent == pytest.approx(2.5, abs=1e-12)
    assert fit.amplitude == pytest.approx(3, rel=1e-11)
    assert fit.window == (t[0], t[-1]) and fit.samples == 12
    assert fit.stderr_exponent < 1e-12


def test_fit_without_subtraction_measures_integer_power():
    t = np.geomspace(0.1, 1.0, 20)
    fit = analysis.fit_half_power(t, t ** 2 + 0.01 * t ** 2.5)
    assert fit.exponent == pytest.approx(2.0, abs=0.01)


def test_fit_free_half_power():
    r = 4.0
    t = np.geomspace(1e-3, 1e-2, 20)
    fit = analysis.fit_half_power(t, models.psi_exact_free(r, t),
                                  subtract=lambda tt, k: analysis.free_integer_terms(r, tt, order=k),
                                  order=2, r_probe=r)
    assert fit.exponent == pytest.approx(2.5, abs=0.02)
    assert fit.amplitude == pytest.approx(2 * math.sqrt(2) / (math.pi * r ** 4), rel=0.02)
    assert 2 * math.sqrt(2) / (math.pi * r ** 4) == pytest.approx(0.0035169, rel=1e-4)
    assert fit.r_probe == r


def test_free_integer_terms_are_te_taylor_terms():
    r, t = 3.0, 1e-3
    te = models.psi_te_free(r, t)
    assert abs(analysis.free_integer_terms(r, t, order=6) - te) < 1e-15 * abs(te)
    assert analysis.free_integer_terms(r, 0.0, order=2) == pytest.approx(models.psi0_hydrogen(r))


def test_noisy_fits_within_three_stderr():
    # 1% multiplicative noise: the regression stderr must be calibrated, so the
    # standardized errors behave like a t-distribution with 28 degrees of freedom
    rng = np.random.default_rng(12345)
    t = np.geomspace(1e-3, 1e-1, 30)
    z = []
    for _ in range(100):
        nu = rng.uniform(1.5, 6.5)
        vals = 2.0 * t ** nu * (1 + 0.01 * rng.standard_normal(t.size))
        fit = analysis.fit_half_power(t, vals)
        z.append((fit.exponent - nu) / fit.stderr_exponent)
    z = np.array(z)
    # P(|T_28| > 3) = 0.0056; more than 3 of 100 would have probability 0.2%
    assert np.sum(np.abs(z) > 3) <= 3
    assert np.max(np.abs(z)) < 5
    assert abs(z.mean()) < 0.35 and 0.75 < z.std() < 1.3


@pytest.mark.parametrize("t,v,msg", [
    (np.geomspace(1, 2, 5), np.ones(5), "samples"),
    (np.linspace(-1, 1, 10), np.ones(10), "> 0"),
    (np.linspace(1, 2, 10), np.zeros(10), "positive"),
    (np.linspace(1, 1 + 1e-9, 10), np.ones(10), "ill-conditioned"),
    (np.linspace(1, 2, 10), np.ones(9), "equal length"),
])
def test_fit_errors(t, v, msg):
    with pytest.raises(FitError, match=msg):
        analysis.fit_half_power(t, v)


def test_fit_result_window_invariant():
    with pytest.raises(FitError):
        analysis.FitResult(1.0, 2.0, 0.1, (1.0, 1.0))


# ---------------------------------------------------------------- tails

def test_tail_identity_closed_form():
    amp = 256 / (2835 * math.sqrt(math.pi))
    c = 137.035999
    got = analysis.t_power_to_omega_tail(amp, Fraction(9, 2))
    assert got == pytest.approx(16 * math.sqrt(2) * math.pi / (3 * c), rel=1e-12)
    assert got == pytest.approx(0.172913, rel=1e-5)
    assert analysis.t_power_to_omega_tail(2 * amp, Fraction(9, 2)) == pytest.approx(2 * got, rel=1e-15)


def test_tail_identity_symbolic():
    import sympy as sp
    Z, c = sp.symbols("Z c", positive=True)
    nu = sp.Rational(9, 2)
    amp = 256 * Z ** 5 / (2835 * sp.sqrt(sp.pi))
    expr = 4 * sp.pi / c * amp * nu * sp.gamma(nu) * sp.Abs(sp.sin(sp.pi * nu / 2))
    assert sp.simplify(expr - 16 * sp.sqrt(2) * Z ** 5 * sp.pi / (3 * c)) == 0


def test_tail_three_halves():
    got = analysis.t_power_to_omega_tail(1.0, Fraction(3, 2))
    ref = 4 * math.pi / 137.035999 * 1.5 * math.gamma(1.5) * math.sqrt(2) / 2
    assert got == pytest.approx(ref, rel=1e-14)


@pytest.mark.parametrize("nu", [Fraction(3, 2), Fraction(5, 2), Fraction(9, 2), Fraction(11, 2)])
def test_tail_quadrature_oracle(nu):
    closed = analysis.t_power_to_omega_tail(1.0, nu)
    assert analysis.omega_tail_quadrature(1.0, nu) == pytest.approx(closed, rel=0.01)


def test_tail_errors():
    with pytest.raises(UnsupportedError):
        analysis.t_power_to_omega_tail(1.0, 4)
    with pytest.raises(DomainError):
        analysis.t_power_to_omega_tail(1.0, -0.5)
    with pytest.raises(UnsupportedError):
        analysis.omega_tail_quadrature(1.0, 2.0)


def test_consistency_chain():
    for Z in (1.0, 2.0):
        p = ModelParams(Z=Z)
        coeff = analysis.t_power_to_omega_tail(models.dipole_short_time_coefficient(p), Fraction(9, 2), p)
        for w in (3.0, 50.0):
            assert models.sigma_tail(w, p) / (coeff * w ** -3.5) == pytest.approx(1, abs=1e-12)


# ---------------------------------------------------------------- Filon and cross-sections

@pytest.mark.parametrize("omega", [0.3, 7.0, 300.0])
@pytest.mark.parametrize("n", [101, 100])
def test_filon_against_quad(omega, n):
    t0, h = 0.5, 0.01
    t = t0 + h * np.arange(n)
    f = lambda x: np.exp(-x) * (1 + x * x)
    s, c = analysis.filon(f(t), t0, h, omega)
    rs = integrate.quad(f, t[0], t[-1], weight="sin", wvar=omega)[0]
    rc = integrate.quad(f, t[0], t[-1], weight="cos", wvar=omega)[0]
    tol = 1e-8 if n % 2 else 1e-5  # an even count closes with a linear interval
    assert abs(s - rs) < tol and abs(c - rc) < tol


@pytest.mark.parametrize("theta", [1e-4, 0.05, 0.5, 0.9999, 1.0001, 3.0])
def test_filon_weights_against_mpmath(theta):
    import mpmath
    mpmath.mp.dps = 50
    th = mpmath.mpf(theta)
    s, c = mpmath.sin(th), mpmath.cos(th)
    ref = [(th * th + th * s * c - 2 * s * s) / th ** 3, 2 * (th * (1 + c * c) - 2 * s * c) / th ** 3,
           4 * (s - th * c) / th ** 3]
    for got, want in zip(analysis._filon_weights(theta), ref):
        assert abs(got - float(want)) <= 2e-14 * abs(float(want))


def test_filon_phase_large_argument():
    # sin(w t) at w t ~ 1e6 must keep full relative accuracy
    t0, h, n, w = 1e4, 1e-3, 1001, 99.9
    s, _ = analysis.filon(np.ones(n), t0, h, w)
    ref = (math.cos(w * t0) - math.cos(w * (t0 + h * (n - 1)))) / w
    assert abs(s - ref) < 1e-12


def test_cross_section_zero_signal():
    t = np.arange(0, 10, 0.01)
    spec = analysis.cross_section(t, np.zeros(t.size), [1.0, 2.0, 5.0], damping=0.1)
    assert np.all(spec.sigma == 0)


def test_cross_section_single_oscillator_peak():
    t = np.arange(0, 300, 0.01)
    w0, eta = 2.0, 0.05
    mu = -0.1 * np.cos(w0 * t)
    omegas = np.arange(1.0, 3.0, 0.02)
    spec = analysis.cross_section(t, mu, omegas, damping=eta)
    k = int(np.argmax(spec.sigma))
    assert abs(omegas[k] - w0) <= 0.02 + 1e-12
    assert spec.sigma[k] > 0


@pytest.mark.parametrize("method", ["parts", "derivative"])
def test_cross_section_methods_agree_on_smooth_data(method):
    t = np.arange(0, 60, 0.005)
    mu = t ** 2 * np.exp(-0.3 * t)
    spec = analysis.cross_section(t, mu, [1.0, 4.0], damping=0.2, method=method)
    eta = 0.2
    ref = []
    for w in (1.0, 4.0):
        d = lambda x: (2 * x - 0.3 * x * x) * math.exp(-0.3 * x) * math.exp(-eta * x)
        ref.append(4 * math.pi * w / 137.035999 * integrate.quad(d, 0, 60, weight="sin", wvar=w, limit=200)[0])
    assert np.allclose(spec.sigma, ref, rtol=1e-7, atol=1e-12)
    assert spec.window["method"] == method


def test_synthetic_half_power_plateau():
    s = 0.1  # damping of the synthetic signal
    t = np.arange(0.0, 600.0 + 5e-4, 1e-3)
    mu = t ** 4.5 * np.exp(-s * t)
    omegas = np.array([20.0, 30.0, 50.0, 70.0, 100.0])
    spec = analysis.cross_section(t, mu, omegas)
    plateau = spec.sigma * omegas ** 3.5 / analysis.t_power_to_omega_tail(1.0, Fraction(9, 2))
    assert np.all(np.abs(plateau - 1) <= 0.03)


def test_cross_section_errors():
    t = np.arange(0, 1, 0.01)
    mu = np.zeros(t.size)
    with pytest.raises(RangeError, match="Nyquist"):
        analysis.cross_section(t, mu, [400.0])
    with pytest.raises(DomainError):
        analysis.cross_section(t, mu, [0.0])
    with pytest.raises(DomainError):
        analysis.cross_section(t, mu, [1.0], damping=-1)
    with pytest.raises(DomainError):
        analysis.cross_section(t, mu, [1.0], method="fft")


def test_spectrum_json_and_validation():
    sp = analysis.Spectrum([1.0, 2.0], [0.5, 0.25], {"damping": 0.1})
    back = analysis.Spectrum.from_json(sp.to_json())
    assert np.array_equal(back.sigma, sp.sigma) and back.window == {"damping": 0.1}
    with pytest.raises(DomainError):
        analysis.Spectrum([2.0, 1.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        analysis.Spectrum([1.0, 2.0], [0.0, np.nan])
    with pytest.raises(DomainError):
        analysis.Spectrum.from_json('{"schema": "x"}')


# ---------------------------------------------------------------- figure data and CSV

def test_figure1_rows():
    d = analysis.figure1_data([0.0, 0.5], [0.0, 0.01, 2.0])
    assert d["t"].tolist() == [0.0] * 3 + [0.5] * 3
    assert np.array_equal(d["rho_exact"][:3], d["rho_te"][:3])
    assert d["rho_te"][3] == math.inf and math.isfinite(d["rho_exact"][3])
    assert d["rho_te"][4] / d["rho_exact"][4] > 1e3
    with pytest.raises(DomainError):
        analysis.figure1_data([-1.0], [1.0])


def test_figure1_small_r_all_times():
    d = analysis.figure1_data([0.2, 0.5, 1.0], [0.01])
    assert np.all(d["rho_te"] / d["rho_exact"] >= 1e3)


def test_figure1_large_r_moderate_radii():
    # near r = 20 t the two densities still agree; far out the t^(5/2) term takes over
    d = analysis.figure1_data([0.2], [4.0])
    assert abs(d["rho_te"][0] / d["rho_exact"][0] - 1) < 0.05


def test_csv_round_trip(tmp_path):
    cols = {"t": np.array([0.1, 1 / 3]), "rho": np.array([math.inf, 1e-300])}
    analysis.write_table_csv(tmp_path / "x.csv", cols, {"t": "au"})
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "t[au],rho"
    back, units = analysis.read_table_csv(tmp_path / "x.csv")
    assert units == {"t": "au"}
    for k in cols:
        assert np.array_equal(back[k], cols[k])
