"""Half-power fits, short-time to high-frequency tail map, cross-sections and figure data."""

from dataclasses import dataclass, field
from fractions import Fraction
import csv
import json
import math
import warnings

import numpy as np
from scipy import integrate

from . import fd
from .cxmath import gamma_real
from .errors import DomainError, FitError, RangeError, UnsupportedError
from .models import ModelParams, psi_exact_free, psi_te_free, psi0_hydrogen

MIN_FIT_SAMPLES = 8
# Design-matrix condition number above which a log-log window is rejected.
MAX_WINDOW_CONDITION = 1e8


@dataclass(frozen=True)
class FitResult:
    """``|R(t)| ~ amplitude * t**exponent`` over ``window``."""

    amplitude: float
    exponent: float
    stderr_exponent: float
    window: tuple
    r_probe: float = float("nan")
    stderr_log_amplitude: float = float("nan")
    samples: int = 0

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise FitError("fit window must satisfy t_min < t_max")


def free_integer_terms(r, t, p=ModelParams(), order=2):
    """Integer-power part ``sum_{k<=order} c_k(r) t^k`` of the nucleus-free evolution.

    These are the Taylor coefficients of the resummed TE form
    ``N e^{-Zr} e^{iZ^2 t/2} (1 - iZt/r)``, shared by the exact solution at
    large r.
    """
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    a = 0.5j * p.Z ** 2
    acc = np.zeros(np.broadcast(r, t).shape, dtype=complex)
    for k in range(order + 1):
        ck = a ** k / math.factorial(k)
        if k >= 1:
            ck = ck - 1j * p.Z / r * a ** (k - 1) / math.factorial(k - 1)
        acc = acc + ck * t ** k
    return psi0_hydrogen(r, p) * acc


def fit_half_power(t, values, subtract=None, order=None, r_probe=float("nan")):
    """Log-log least squares of ``|values - subtract(t, order)|`` against t.

    ``subtract`` removes known integer-power terms up to ``order`` before
    fitting (integer powers dominate the raw signal). Phases are discarded.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=complex)
    if t.shape != v.shape or t.ndim != 1:
        raise FitError("t and values must be 1-D arrays of equal length")
    if t.size < MIN_FIT_SAMPLES:
        raise FitError(f"need at least {MIN_FIT_SAMPLES} samples, got {t.size}")
    if np.any(t <= 0):
        raise FitError("times must be > 0")
    if subtract is not None:
        v = v - np.asarray(subtract(t, order), dtype=complex)
    mag = np.abs(v)
    if np.any(~np.isfinite(mag)) or np.any(mag <= 0):
        raise FitError("residual moduli must be finite and positive")
    x = np.log(t)
    y = np.log(mag)
    A = np.column_stack([np.ones_like(x), x - x.mean()])
    if np.linalg.cond(A) > MAX_WINDOW_CONDITION:
        raise FitError("fit window too narrow in log t (ill-conditioned)")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = t.size - 2
    s2 = float(resid @ resid) / dof
    sxx = float(np.sum((x - x.mean()) ** 2))
    slope = float(coef[1])
    intercept = float(coef[0] - slope * x.mean())
    se_slope = math.sqrt(s2 / sxx)
    se_int = math.sqrt(s2 * (1.0 / t.size + x.mean() ** 2 / sxx))
    return FitResult(math.exp(intercept), slope, se_slope, (float(t.min()), float(t.max())),
                     float(r_probe), se_int, int(t.size))


# ---------------------------------------------------------------- frequency tails

def _check_nu(nu):
    nu_f = float(nu)
    if not nu_f > 0:
        raise DomainError("nu must be > 0")
    if float(nu_f).is_integer():
        raise UnsupportedError("integer powers of t have no algebraic high-frequency tail")
    return nu_f


def t_power_to_omega_tail(amplitude, nu, p=ModelParams()):
    """Tail coefficient C of ``sigma(w) ~ C w^{1-nu}`` for a dipole term ``A t^nu``.

    ``C = (4 pi/c) A nu Gamma(nu) |sin(pi nu / 2)|``, from the Abel-regularized
    sine transform of ``d/dt [A t^nu]``.
    """
    nu_f = _check_nu(nu)
    if isinstance(nu, Fraction) and nu.denominator == 2:
        s = math.sqrt(0.5) if nu.numerator % 4 in (1, 3) else 1.0
    else:
        s = abs(math.sin(0.5 * math.pi * nu_f))
    return 4 * math.pi / p.light_speed * amplitude * nu_f * gamma_real(nu_f) * s


def omega_tail_quadrature(amplitude, nu, p=ModelParams(), etas=(0.1, 0.05, 0.025, 0.0125)):
    """Independent route to :func:`t_power_to_omega_tail` by damped quadrature.

    ``I(eta) = int_0^inf nu t^{nu-1} e^{-eta t} sin(t) dt`` is integrated
    numerically (QAWF, unit frequency) and extrapolated to ``eta -> 0``
    by a polynomial through the given damping values.
    """
    nu_f = _check_nu(nu)
    vals = []
    for eta in etas:
        f = lambda t, e=eta: nu_f * t ** (nu_f - 1) * math.exp(-e * t)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            # split off [0, 1] so the weak t^{nu-1} endpoint behavior is handled by QAWO
            head = integrate.quad(f, 0, 1, weight="sin", wvar=1.0, limit=200)[0]
            g = lambda s: f(s + 1.0)
            tail = integrate.quad(g, 0, np.inf, weight="sin", wvar=1.0, limlst=200)[0]
            tail2 = integrate.quad(g, 0, np.inf, weight="cos", wvar=1.0, limlst=200)[0]
        # sin(s + 1) = sin s cos 1 + cos s sin 1
        vals.append(head + tail * math.cos(1.0) + tail2 * math.sin(1.0))
    coef = np.polyfit(np.asarray(etas), np.asarray(vals), len(etas) - 1)
    return 4 * math.pi / p.light_speed * amplitude * abs(float(coef[-1]))


@dataclass
class Spectrum:
    """Cross-section samples with the window used to produce them."""

    omegas: np.ndarray
    sigma: np.ndarray
    window: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.omegas.shape != self.sigma.shape:
            raise DomainError("omegas and sigma must have equal length")
        if np.any(np.diff(self.omegas) <= 0):
            raise DomainError("omegas must be increasing")
        if not np.all(np.isfinite(self.sigma)):
            raise DomainError("sigma must be finite")

    def to_json(self):
        return json.dumps({"schema": "cusplab.spectrum/1", "omegas": self.omegas.tolist(),
                           "sigma": self.sigma.tolist(), "window": self.window})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get("schema") != "cusplab.spectrum/1":
            raise DomainError("not a cusplab spectrum")
        return cls(d["omegas"], d["sigma"], d.get("window", {}))


# Taylor coefficients in theta^2 (ascending) of the Filon weights; below
# FILON_SERIES_THETA the closed forms lose digits to cancellation.
FILON_SERIES_THETA = 1.0
_ALPHA_SERIES = (2 / 45, -2 / 315, 2 / 4725, -8 / 467775, 4 / 8513505, -2 / 212837625,
                 2 / 13956067125, -16 / 9280784638125, 4 / 238206805711875,
                 -4 / 29585285269414875, 4 / 4370553505709015625)
_BETA_SERIES = (2 / 3, 2 / 15, -4 / 105, 2 / 567, -4 / 22275, 4 / 675675, -8 / 58046625,
                2 / 834978375, -4 / 123743795175, 4 / 11464498670625, -8 / 2595200462229375,
                4 / 176102888508421875)
_GAMMA_SERIES = (4 / 3, -2 / 15, 1 / 210, -1 / 11340, 1 / 997920, -1 / 129729600,
                 1 / 23351328000, -1 / 5557616064000, 1 / 1689515283456000,
                 -1 / 638636777146368000, 1 / 293772917487329280000)


def _filon_weights(theta):
    if abs(theta) < FILON_SERIES_THETA:
        t2 = theta * theta
        alpha = theta * t2 * float(np.polyval(_ALPHA_SERIES[::-1], t2))
        beta = float(np.polyval(_BETA_SERIES[::-1], t2))
        gamma = float(np.polyval(_GAMMA_SERIES[::-1], t2))
    else:
        s, c = math.sin(theta), math.cos(theta)
        t3 = theta ** 3
        alpha = (theta * theta + theta * s * c - 2 * s * s) / t3
        beta = 2 * (theta * (1 + c * c) - 2 * s * c) / t3
        gamma = 4 * (s - theta * c) / t3
    return alpha, beta, gamma


def _phases(theta, offset, n):
    """``sin`` and ``cos`` of ``offset + k theta`` for k < n without eps*k*theta phase noise.

    theta is split (Veltkamp) so that ``k * theta_hi`` is exact in binary64;
    otherwise the rounding of a large phase leaks into long sine sums.
    """
    if n >= 2 ** 26:
        raise DomainError("too many samples for the split phase product")
    p = 134217729.0 * theta
    hi = p - (p - theta)
    lo = theta - hi
    k = np.arange(n, dtype=float)
    a = k * hi
    b = k * lo + offset
    sa, ca = np.sin(a), np.cos(a)
    sb, cb = np.sin(b), np.cos(b)
    return sa * cb + ca * sb, ca * cb - sa * sb


def filon(f, t0, h, omega):
    """``(int f sin(omega t) dt, int f cos(omega t) dt)`` over uniform samples (Filon-Simpson).

    An odd trailing interval (even sample count) is added with the exact
    integral of the linear interpolant.
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 3:
        raise DomainError("need at least 3 samples")
    if omega <= 0:
        raise DomainError("omega must be > 0")
    extra_s = extra_c = 0.0
    if n % 2 == 0:
        a, b = t0 + (n - 2) * h, t0 + (n - 1) * h
        fa, fb = f[-2], f[-1]
        m = (fb - fa) / h
        w = omega
        sa, sb, ca, cb = math.sin(w * a), math.sin(w * b), math.cos(w * a), math.cos(w * b)
        extra_s = (fa * ca - fb * cb) / w + m * (sb - sa) / (w * w)
        extra_c = (fb * sb - fa * sa) / w + m * (cb - ca) / (w * w)
        f = f[:-1]
        n -= 1
    if n < 3:
        raise DomainError("need at least 3 samples")
    theta = omega * h
    alpha, beta, gamma = _filon_weights(theta)
    s, c = _phases(theta, omega * t0, n)
    fs, fc = f * s, f * c
    s_even = fs[0::2].sum() - 0.5 * (fs[0] + fs[-1])
    c_even = fc[0::2].sum() - 0.5 * (fc[0] + fc[-1])
    int_s = h * (alpha * (f[0] * c[0] - f[-1] * c[-1]) + beta * s_even + gamma * fs[1::2].sum())
    int_c = h * (alpha * (f[-1] * s[-1] - f[0] * s[0]) + beta * c_even + gamma * fc[1::2].sum())
    return int_s + extra_s, int_c + extra_c


def filon_sin(f, t0, h, omega):
    """``int f(t) sin(omega t) dt`` by Filon-Simpson."""
    return filon(f, t0, h, omega)[0]


def cross_section(t, mu, omegas, damping=0.0, p=ModelParams(), method="parts"):
    """``sigma(w) = (4 pi w / c) int mu'(tau) e^{-eta (tau - t0)} sin(w tau) dtau``.

    ``method="parts"`` (default) moves the derivative onto the kernel,
    ``[mu e sin] - int mu e (w cos - eta sin)``, so rounding noise in mu is
    not amplified by 1/dt. ``method="derivative"`` takes mu' by 4th-order
    differences. Both integrate with Filon-Simpson. Raises RangeError for
    frequencies above the sampling Nyquist limit.
    """
    t = np.asarray(t, dtype=float)
    mu = np.asarray(mu)
    if np.iscomplexobj(mu):
        mu = mu.real
    h = fd.check_grid(t)
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(om <= 0):
        raise DomainError("frequencies must be > 0")
    nyq = math.pi / h
    if np.any(om > nyq):
        raise RangeError(f"frequency above the Nyquist limit {nyq:.6g} of the sampling")
    if damping < 0:
        raise DomainError("damping must be >= 0")
    if method not in ("parts", "derivative"):
        raise DomainError(f"unknown method {method!r}")
    env = np.exp(-damping * (t - t[0]))
    out = []
    for w in om:
        if method == "derivative":
            val = filon_sin(fd.derivative(mu, h, 1) * env, t[0], h, w)
        else:
            g = mu * env
            i_s, i_c = filon(g, t[0], h, w)
            ends = g[-1] * math.sin(w * t[-1]) - g[0] * math.sin(w * t[0])
            val = ends - w * i_c + damping * i_s
        out.append(4 * math.pi * w / p.light_speed * val)
    return Spectrum(om, np.array(out), {"t0": float(t[0]), "t1": float(t[-1]), "dt": h,
                                        "damping": damping, "method": method})


# ---------------------------------------------------------------- figure 1

def figure1_data(times, radii, p=ModelParams()):
    """Columns ``t, r, rho_exact, rho_te`` over the (t, r) product.

    ``rho_te`` is ``inf`` at r = 0 for t > 0, where the TE form diverges.
    """
    rows = {"t": [], "r": [], "rho_exact": [], "rho_te": []}
    for t in times:
        t = float(t)
        if t < 0:
            raise DomainError("times must be >= 0")
        for r in radii:
            r = float(r)
            ex = abs(psi_exact_free(r, t, p)) ** 2
            te = abs(psi_te_free(r, t, p)) ** 2
            rows["t"].append(t)
            rows["r"].append(r)
            rows["rho_exact"].append(ex)
            rows["rho_te"].append(te if math.isfinite(te) else math.inf)
    return {k: np.array(v) for k, v in rows.items()}


# ---------------------------------------------------------------- CSV

def write_table_csv(path, columns, units=None):
    """One header line ``name[unit],...``; numbers with 17 significant digits."""
    names = list(columns)
    units = units or {}
    cols = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"{n}[{units[n]}]" if n in units else n for n in names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def read_table_csv(path):
    """Inverse of :func:`write_table_csv`; returns ``(columns, units)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names, units = [], {}
        for h in header:
            if h.endswith("]") and "[" in h:
                n, u = h[:-1].split("[", 1)
                units[n] = u
            else:
                n = h
            names.append(n)
        data = [[float(x) for x in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(-1, len(names))
    return {n: arr[:, i] for i, n in enumerate(names)}, units
