"""Registry of verification checks run by ``cusplab verify``.

Each check measures something, compares it with a tolerance and reports
machine-readable values. ``docs/checks.md`` is generated from this registry
(:func:`render_markdown`), so names, anchors and tolerances live in one place.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import analysis, cxmath, models
from .errors import UnsupportedError
from .models import ModelParams
from .propagate import GridSpec, propagate_radial_coupled
from .series import (ChannelField, ComplexField, asymptotic_eval_optimal, borel_resum,
                     laurent_channels, log_profile, reduced_potential_terms, reduced_residual,
                     s_ode_residual, te_reduced_terms, xi4_asymptotic_series)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    anchor: str
    status: str = "run"
    details: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "status": self.status,
                "anchor": self.anchor, "measured": self.measured,
                "tolerance": self.tolerance, "details": self.details}


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    summary: str
    tolerance: dict
    func: object = field(repr=False, compare=False)
    slow: bool = False


REGISTRY = {}


def register(name, anchor, summary, tolerance, slow=False):
    def deco(func):
        REGISTRY[name] = Check(name, anchor, summary, dict(tolerance), func, slow)
        return func
    return deco


def _max(x):
    return float(np.max(np.abs(x)))


# ---------------------------------------------------------------- reduced recursion

_RB_STEP = 0.0025
_RB_PAD = (0.1, 8.5)     # closures at the ends of the grid stay outside the window
_RB_WINDOW = (0.2, 8.0)


def _reduced_setup(p):
    rb = np.arange(_RB_PAD[0], _RB_PAD[1] + 0.5 * _RB_STEP, _RB_STEP)
    win = (rb >= _RB_WINDOW[0] - 1e-12) & (rb <= _RB_WINDOW[1] + 1e-12)
    terms = te_reduced_terms(p, 4)
    fields = [laurent_channels(t, rb) for t in terms]
    return rb, win, fields, reduced_potential_terms(p)


def _channel_max(res, win):
    return max(_max(v[win]) for v in res.channels.values())


def _field_params(opts):
    return ModelParams(Z=float(opts.get("Z", 1.0)), field=float(opts.get("field", 0.01)))


@register("te_residual_m0_3", "order-by-order reduced recursion, orders 0-3",
          "Laurent terms psi_0..psi_3 (hydrogen + field) satisfy the reduced recursion "
          "on rb in [0.2, 8] (4th-order differences, step 0.0025).", {"max_residual": 1e-6})
def check_te_residual_m0_3(opts):
    p = _field_params(opts)
    rb, win, fields, pot = _reduced_setup(p)
    per = [_channel_max(reduced_residual(m, fields[m], fields[:m], pot), win) for m in range(4)]
    worst = max(per)
    return worst <= 1e-6, {"max_residual": worst, "per_order": per}, ""


@register("te_residual_m4", "fourth order: Laurent part plus resummed correction",
          "psi_4 = Laurent part + xi_4 = g(rb) rb cos(theta) satisfies the recursion on "
          "[0.2, 8] and stays bounded down to rb = 1e-3 (max |psi_4| on [1e-3, 1] at most "
          "10 |psi_4(1)|). Option c2_scale rescales c2 (0 gives the negative control).",
          {"max_residual": 1e-6, "small_r_growth": 10.0})
def check_te_residual_m4(opts):
    p = _field_params(opts)
    c2 = models.c2_coefficient(p) * float(opts.get("c2_scale", 1.0))
    rb, win, fields, pot = _reduced_setup(p)
    chans = dict(fields[4].channels)
    chans[1] = chans.get(1, 0) + models.xi4_profile(rb, p, c2) * rb
    res = _channel_max(reduced_residual(4, ChannelField(rb, chans), fields[:4], pot), win)
    small = np.geomspace(1e-3, 1.0, 61)
    mag = np.abs(models.psi4_full(small, 1.0, p, c2))
    growth = float(mag.max() / mag[-1])
    ok = res <= 1e-6 and growth <= 10.0
    details = "" if growth <= 10.0 else (
        f"psi_4 diverges at small rb: |psi_4(1e-3)| = {mag[0]:.6g} vs |psi_4(1)| = {mag[-1]:.6g}")
    return ok, {"max_residual": res, "small_r_growth": growth, "c2": [c2.real, c2.imag]}, details


@register("te_divergence", "small-rb divergence of the plain Taylor term",
          "The Laurent part of psi_4 alone grows like rb^-2 as rb -> 0: log-log slope on "
          "rb in [1e-3, 1e-2] equals -2 within 0.05.", {"exponent_error": 0.05})
def check_te_divergence(opts):
    p = _field_params(opts)
    rb = np.geomspace(1e-3, 1e-2, 16)
    fit = analysis.fit_half_power(rb, models.psi4_te(rb, 1.0, p))
    err = abs(fit.exponent + 2.0)
    return err <= 0.05, {"exponent": fit.exponent, "stderr": fit.stderr_exponent,
                         "exponent_error": err}, ""


@register("s_equation", "nonlinear first-order form of the fourth-order correction",
          "S = log g of the resummed radial profile satisfies S'' + S'^2 - 2i rb S' + 4S'/rb "
          "+ 6i = 0 on rb in [0.5, 5] (step 0.0025).", {"max_residual": 1e-5})
def check_s_equation(opts):
    p = _field_params(opts)
    rb = np.arange(0.5, 5.0 + 0.5 * _RB_STEP, _RB_STEP)
    S = ComplexField(rb, log_profile(models.xi4_profile(rb, p)))
    worst = _max(s_ode_residual(S).values)
    return worst <= 1e-5, {"max_residual": worst}, ""


# ---------------------------------------------------------------- Borel

@register("borel_eq20", "Borel-Pade sum of the divergent branch vs closed form",
          "Borel-Pade resummation of the inverse-power branch (amplitude -c2) reproduces the "
          "closed-form profile at rb in {1, 2, 5}; optimal truncation at rb = 10 agrees "
          "within its own error estimate.", {"max_relative": 1e-6, "truncation_ratio": 1.0})
def check_borel(opts):
    p = _field_params(opts)
    ser = xi4_asymptotic_series(p)
    rel = {}
    for rb in (1.0, 2.0, 5.0):
        ref = complex(models.xi4_profile(rb, p))
        rel[str(rb)] = abs(borel_resum(ser, rb) - ref) / abs(ref)
    val, est = asymptotic_eval_optimal(ser, 10.0)
    dev = abs(val - complex(models.xi4_profile(10.0, p)))
    worst = max(rel.values())
    ratio = dev / est
    ok = bool(worst <= 1e-6 and ratio <= 1.0)
    return ok, {"max_relative": worst, "relative": rel, "truncation_deviation": dev,
                "truncation_estimate": est, "truncation_ratio": ratio}, ""


# ---------------------------------------------------------------- tails

@register("tail_identity", "short-time t^(9/2) dipole vs omega^(-7/2) absorption tail",
          "The tail map applied to the dipole coefficient equals 16 sqrt(2) Z^5 pi/(3c); "
          "the model tail sigma_tail agrees to 1e-12; damped quadrature agrees within 3%.",
          {"relative": 1e-12, "quadrature_relative": 0.03})
def check_tail_identity(opts):
    p = ModelParams(Z=float(opts.get("Z", 1.0)))
    coeff = analysis.t_power_to_omega_tail(models.dipole_short_time_coefficient(p), Fraction(9, 2), p)
    closed = 16 * math.sqrt(2) * p.Z ** 5 * math.pi / (3 * p.light_speed)
    rel = abs(coeff / closed - 1)
    chain = abs(models.sigma_tail(2.0, p) / (coeff * 2.0 ** -3.5) - 1)
    quad = analysis.omega_tail_quadrature(models.dipole_short_time_coefficient(p), 4.5, p)
    qrel = abs(quad / coeff - 1)
    ok = rel <= 1e-12 and chain <= 1e-12 and qrel <= 0.03
    return ok, {"coefficient": coeff, "relative": max(rel, chain), "quadrature_relative": qrel}, ""


@register("half_power_free", "t^(5/2) law after removing the nucleus",
          "Exact nucleus-free evolution minus the integer-power terms through t^2, at Z=1, "
          "r=4, t in [1e-3, 1e-2]: fitted exponent 2.5 within 0.02, amplitude "
          "2 sqrt(2)/(pi r^4) within 2%.", {"exponent_error": 0.02, "amplitude_relative": 0.02})
def check_half_power_free(opts):
    p = ModelParams()
    r = 4.0
    t = np.geomspace(1e-3, 1e-2, 20)
    vals = models.psi_exact_free(r, t, p)
    fit = analysis.fit_half_power(t, vals, subtract=lambda tt, k: analysis.free_integer_terms(r, tt, p, k),
                                  order=2, r_probe=r)
    target = 2 * math.sqrt(2) / (math.pi * r ** 4)
    e_err, a_err = abs(fit.exponent - 2.5), abs(fit.amplitude / target - 1)
    return e_err <= 0.02 and a_err <= 0.02, {
        "exponent": fit.exponent, "stderr": fit.stderr_exponent, "amplitude": fit.amplitude,
        "exponent_error": e_err, "amplitude_relative": a_err}, ""


# ---------------------------------------------------------------- figure data

@register("figure1_small_r", "Taylor density blows up at the nucleus",
          "TE density exceeds the exact density by at least 1e3 at r = 0.01 for t in "
          "{0.2, 0.5, 1.0}.", {"min_ratio": 1e3})
def check_figure1_small_r(opts):
    d = analysis.figure1_data((0.2, 0.5, 1.0), (0.01,))
    ratio = float(np.min(d["rho_te"] / d["rho_exact"]))
    return ratio >= 1e3, {"min_ratio": ratio}, ""


@register("figure1_large_r", "Taylor and exact densities far from the nucleus",
          "Relative density difference at most 1e-4 for r >= 20 Z t (t in {0.2, 0.5, 1.0}, "
          "r up to 20). Known to fail: the exact density carries the t^(5/2) oscillating "
          "term, which dominates the e^(-2Zr) density at large r.", {"max_relative": 1e-4})
def check_figure1_large_r(opts):
    worst, where = 0.0, None
    for t in (0.2, 0.5, 1.0):
        radii = np.linspace(20 * t, 20.0, 25)
        d = analysis.figure1_data((t,), radii)
        rel = np.abs(d["rho_te"] / d["rho_exact"] - 1)
        k = int(np.argmax(rel))
        if rel[k] > worst:
            worst, where = float(rel[k]), (t, float(radii[k]))
    return worst <= 1e-4, {"max_relative": worst, "at_t_r": list(where)}, ""


# ---------------------------------------------------------------- propagation

def _free_density_error(p, g):
    r = g.points()
    traj = propagate_radial_coupled({0: models.psi0_hydrogen(r, p)}, p, g, coulomb=False)
    u = traj.snapshots[-1][0]
    exact = 4 * math.pi * r * r * np.abs(models.psi_exact_free(r, traj.times[-1], p)) ** 2
    return math.sqrt(g.spacing * float(np.sum((np.abs(u) ** 2 - exact) ** 2)))


FREE_GRID = GridSpec("radial", 60.0, 0.008, 2e-4, 2500)


@register("free_propagation", "radial Crank-Nicolson vs exact nucleus-free solution",
          "Density L2 error at t = 0.5 (dr = 0.008, dt = 2e-4, box 60) at most 1e-4; halving "
          "dt shrinks the error by a factor in [3.5, 4.5].",
          {"l2_error": 1e-4, "ratio_min": 3.5, "ratio_max": 4.5}, slow=True)
def check_free_propagation(opts):
    p = ModelParams()
    g = FREE_GRID
    g2 = GridSpec(g.kind, g.extent, g.spacing, g.dt / 2, g.steps * 2)
    e1, e2 = _free_density_error(p, g), _free_density_error(p, g2)
    ratio = e1 / e2
    return e1 <= 1e-4 and 3.5 <= ratio <= 4.5, {"l2_error": e1, "l2_error_half_dt": e2,
                                                 "ratio": ratio}, ""


@register("ehrenfest", "induced dipole at short times follows the force law",
          "Hydrogen in a static field 0.01 (l_max = 2): mu(t) = -E t^2/2 within 2% for "
          "0 < t <= 0.05.", {"max_relative": 0.02}, slow=True)
def check_ehrenfest(opts):
    p = ModelParams(field=float(opts.get("field", 0.01)))
    g = GridSpec("radial", 30.0, 0.01, 1e-3, 50, l_max=2)
    r = g.points()
    traj = propagate_radial_coupled({0: models.psi0_hydrogen(r, p)}, p, g)
    t, mu = traj.times[1:], traj.dipole_series[1:].real
    rel = np.abs(mu / (-0.5 * p.field * t * t) - 1)
    worst = float(rel.max())
    return worst <= 0.02, {"max_relative": worst}, ""


# ---------------------------------------------------------------- special functions

@register("special_functions", "complex error function and Gamma",
          "w(z) + w(-z) = 2 exp(-z^2) relative to 1e-10 on a 20x20 grid over [-5, 5]^2; "
          "erfc_complex on the real axis [-6, 6] vs math.erfc to 1e-10; "
          "Gamma(11/2) = 945 sqrt(pi)/32 to 1e-12.",
          {"reflection_relative": 1e-10, "erfc_relative": 1e-10, "gamma_relative": 1e-12})
def check_special_functions(opts):
    x = np.linspace(-5, 5, 20)
    z = x[:, None] + 1j * x[None, :]
    w1, w2 = cxmath.faddeeva_w(z), cxmath.faddeeva_w(-z)
    rhs = 2 * np.exp(-z * z)
    refl = float(np.max(np.abs(w1 + w2 - rhs) / np.abs(rhs)))
    scaled = float(np.max(np.abs(w1 + w2 - rhs) / np.maximum(np.abs(rhs), np.abs(w1))))
    xs = np.linspace(-6, 6, 241)
    erfc = max(abs(complex(cxmath.erfc_complex(v)) - math.erfc(v)) / math.erfc(v) for v in xs)
    gam = abs(cxmath.gamma_real(5.5) / (945 * math.sqrt(math.pi) / 32) - 1)
    ok = refl <= 1e-10 and erfc <= 1e-10 and gam <= 1e-12
    details = "" if refl <= 1e-10 else (
        "reflection residual is limited by cancellation where |exp(-z^2)| << |w(z)|; "
        f"relative to max(|2exp(-z^2)|, |w(z)|) it is {scaled:.3g}")
    return ok, {"reflection_relative": refl, "reflection_scaled": scaled,
                "erfc_relative": erfc, "gamma_relative": gam}, details


# ---------------------------------------------------------------- documented substitution

SUBSTITUTES = ("te_residual_m4", "borel_eq20", "s_equation")


@register("t11_2_amplitude", "t^(11/2) field amplitude from grid propagation",
          "Not reproducible at desk scale: in the window where the asymptotic form holds "
          "(r >= 5 sqrt(t)) the term is many orders below the integer-power response and the "
          "propagation error (its size at r = 1, t = 0.01 is reported). Substituted by te_residual_m4, borel_eq20 and "
          "s_equation, which verify the same amplitude through the reduced recursion and the "
          "closed form; running this check runs the substitutes.", {})
def check_t11_2(opts):
    p = _field_params(opts)
    term = models.field_half_power_term(p)
    # magnitude at r = 1, t = 0.01 (where the grid would have to resolve it)
    size = abs(models.leading_half_power_field(1.0, 1.0, 0.01, p))
    sub = {name: REGISTRY[name].func(opts)[0] for name in SUBSTITUTES}
    return all(sub.values()), {"amplitude_at_r1_t0.01": size, "substitutes": sub,
                               "power": float(term.t_exponent)}, "substituted"


# ---------------------------------------------------------------- running

def run_check(name, opts=None):
    if name not in REGISTRY:
        raise UnsupportedError(f"unknown check {name!r}; known: {', '.join(REGISTRY)}")
    chk = REGISTRY[name]
    passed, measured, details = chk.func(dict(opts or {}))
    status = "substituted" if details == "substituted" else "run"
    if status == "substituted":
        details = "not reproducible at desk scale; verified through " + ", ".join(SUBSTITUTES)
    return CheckResult(name, bool(passed), measured, chk.tolerance, chk.anchor, status, details)


def render_markdown():
    """Documentation table for every registered check."""
    lines = ["# Verification checks", "",
             "Generated from `cusplab.checks.REGISTRY`; regenerate with "
             "`python -m cusplab.checks > docs/checks.md`.", ""]
    for chk in REGISTRY.values():
        lines.append(f"## `{chk.name}`")
        lines.append("")
        lines.append(f"Anchor: {chk.anchor}")
        lines.append("")
        lines.append(chk.summary)
        lines.append("")
        if chk.tolerance:
            tol = ", ".join(f"`{k}` = {v:g}" for k, v in chk.tolerance.items())
            lines.append(f"Tolerances: {tol}")
            lines.append("")
        if chk.slow:
            lines.append("Runs a propagation (seconds).")
            lines.append("")
    return "\n".join(lines)


if __name__ == "__main__":
    print(render_markdown(), end="")
