"""Inverse-power asymptotic series, optimal truncation and Borel-Pade resummation.

A series is stored as

    prefactor(rb) * sum_n A_n y^n,   y = rb**(-var_power),
    prefactor(rb) = amplitude * rb**r_power * (exp(i rb^2) if oscillatory)

For the fourth-order correction of hydrogen in a field the two branches of
the large-rb expansion of ``g = exp(S)`` are

    c1 branch:  rb^3 (1 + 9i/2 y - 9/4 y^2 + 3i/8 y^3),  y = rb^-2, terminating
    c2 branch:  e^{i rb^2} rb^-8 (1 + sum_m a_m y^{m+1}),   factorially divergent

with ``a_m = (-i)^{m+1} (m+4) (2m+6)! / ((m+1)! 2^{2m+5} 9)``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import json
import math
import warnings

import numpy as np
from scipy import integrate

from ..errors import DomainError, OptimalTruncationError, RangeError, RayObstructionError
from ..models import ModelParams, c2_coefficient
from .fields import decode_complex, encode_complex

SCHEMA = "cusplab.asymptotic_series/1"

DEFAULT_RAY = -math.pi / 4
DEFAULT_PADE_ORDER = 12

# Largest m whose a_m is representable in float64 (|a_166| > 1.8e308).
MAX_FLOAT_COEFFICIENT = 165
MAX_LOG_COEFFICIENT = 200

# Optimal truncation requires the smallest term below this fraction of the sum.
TRUNCATION_RATIO = 1e-3

# Pade poles closer to the Laplace ray than this (relative to |pole|) obstruct it.
RAY_CLEARANCE = 1e-6

_MINUS_I_POW = (1, -1j, -1, 1j)
_MINUS_I_PHASE = (0.0, -math.pi / 2, math.pi, math.pi / 2)


@dataclass(frozen=True)
class AsymptoticSeries:
    """``amplitude * rb^r_power * [e^{i rb^2}] * sum_n coeffs[n] * rb^(-var_power n)``."""

    coeffs: tuple
    amplitude: complex = 1.0
    r_power: int = 0
    oscillatory: bool = False
    var_power: int = 2
    divergence: str = "factorial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not self.coeffs:
            raise DomainError("series needs at least one coefficient")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in self.coeffs):
            raise DomainError("coefficients must be finite")
        if self.var_power < 1:
            raise DomainError("var_power must be >= 1")
        if self.divergence not in ("terminating", "factorial"):
            raise DomainError("divergence must be 'terminating' or 'factorial'")

    def prefactor(self, rbar):
        val = self.amplitude * rbar ** self.r_power
        if self.oscillatory:
            val = val * np.exp(1j * rbar * rbar)
        return complex(val)

    def variable(self, rbar):
        if not rbar > 0:
            raise DomainError("rbar must be > 0")
        return rbar ** (-self.var_power)

    def terms(self, rbar):
        y = self.variable(rbar)
        return np.array([c * y ** n for n, c in enumerate(self.coeffs)])

    def to_dict(self):
        return {"schema": SCHEMA, "amplitude": encode_complex([self.amplitude])[0],
                "r_power": self.r_power, "oscillatory": self.oscillatory,
                "var_power": self.var_power, "divergence": self.divergence,
                "coeffs": encode_complex(self.coeffs)}

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA:
            raise DomainError(f"expected schema {SCHEMA!r}")
        amp = decode_complex([d["amplitude"]])[0]
        return cls(tuple(decode_complex(d["coeffs"])), complex(amp), int(d["r_power"]),
                   bool(d["oscillatory"]), int(d["var_power"]), d["divergence"])

    def dumps(self):
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- coefficients

@lru_cache(maxsize=None)
def _coefficient_fraction(m):
    return Fraction((m + 4) * math.factorial(2 * m + 6),
                    9 * math.factorial(m + 1) * 2 ** (2 * m + 5))


def borel_coefficient(m):
    """``a_m`` of the c2 branch, exact to one rounding (big-integer factorials).

    Raises RangeError for m > 165, where ``|a_m|`` exceeds float64; use
    :func:`log_borel_coefficient` there.
    """
    if m < 0:
        raise DomainError("m must be >= 0")
    if m > MAX_FLOAT_COEFFICIENT:
        raise RangeError(f"|a_{m}| overflows float64; use log_borel_coefficient")
    return complex(float(_coefficient_fraction(m))) * _MINUS_I_POW[(m + 1) % 4]


def log_borel_coefficient(m):
    """``(log|a_m|, arg a_m)`` for ``0 <= m <= 200``."""
    if not 0 <= m <= MAX_LOG_COEFFICIENT:
        raise DomainError(f"m must be in [0, {MAX_LOG_COEFFICIENT}]")
    v = _coefficient_fraction(m)
    mag = math.log(v.numerator) - math.log(v.denominator)
    return mag, _MINUS_I_PHASE[(m + 1) % 4]


def c1_branch(amplitude=1.0):
    """Terminating branch ``rb^3 + 9i rb/2 - 9/(4 rb) + 3i/(8 rb^3)``."""
    return AsymptoticSeries((1, 4.5j, -2.25, 0.375j), amplitude, r_power=3,
                            oscillatory=False, divergence="terminating")


def c2_branch(amplitude=1.0, n_terms=120):
    """Divergent branch ``e^{i rb^2} rb^-8 (1 + sum_m a_m rb^{-2m-2})`` with n_terms coefficients."""
    if not 1 <= n_terms <= MAX_FLOAT_COEFFICIENT + 2:
        raise DomainError(f"n_terms must be in [1, {MAX_FLOAT_COEFFICIENT + 2}]")
    coeffs = (1.0,) + tuple(borel_coefficient(m) for m in range(n_terms - 1))
    return AsymptoticSeries(coeffs, amplitude, r_power=-8, oscillatory=True, divergence="factorial")


def xi4_asymptotic_series(p=ModelParams(), n_terms=120):
    """Large-rb expansion of the radial profile ``g`` of xi4 (amplitude ``-c2``)."""
    return c2_branch(-c2_coefficient(p), n_terms)


# ---------------------------------------------------------------- optimal truncation

def asymptotic_eval_optimal(series, rbar):
    """Sum up to (excluding) the smallest term; returns ``(value, error_estimate)``.

    The error estimate is the first omitted term plus a rounding bound
    ``4 eps sum|T_n|``, both times ``|prefactor|``. A terminating series is
    summed exactly with zero error estimate.
    """
    pref = series.prefactor(rbar)
    terms = series.terms(rbar)
    if series.divergence == "terminating":
        return pref * complex(terms.sum()), 0.0
    mags = np.abs(terms)
    n = int(np.argmin(mags[1:])) + 1
    partial = complex(terms[:n].sum())
    if mags[n] > TRUNCATION_RATIO * abs(partial):
        raise OptimalTruncationError(
            f"smallest term {mags[n]:.3g} is not below {TRUNCATION_RATIO:g} of the sum at rb={rbar}; "
            "rb too small for optimal truncation")
    err = mags[n] + 4 * np.finfo(float).eps * float(mags[:n].sum())
    return pref * partial, abs(pref) * err


# ---------------------------------------------------------------- Borel-Pade

def _fraction_solve(mat, rhs):
    """Gaussian elimination over the rationals."""
    n = len(rhs)
    aug = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise RangeError("degenerate Pade table; lower pade_order")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        for r in range(col + 1, n):
            if aug[r][col] != 0:
                f = aug[r][col] / pv
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = aug[r][n] - sum(aug[r][k] * x[k] for k in range(r + 1, n))
        x[r] = acc / aug[r][r]
    return x


def _pade_denominator(br, L, M):
    # sum_{j=1}^{M} q_j b_{k-j} = -b_k for k = L+1..L+M, split into real and imaginary rows.
    mat, rhs = [], []
    for k in range(L + 1, L + M + 1):
        idx = [k - j for j in range(1, M + 1)]
        mat.append([br[i][0] if i >= 0 else 0 for i in idx] + [-br[i][1] if i >= 0 else 0 for i in idx])
        rhs.append(-br[k][0])
        mat.append([br[i][1] if i >= 0 else 0 for i in idx] + [br[i][0] if i >= 0 else 0 for i in idx])
        rhs.append(-br[k][1])
    sol = _fraction_solve(mat, rhs) if M else []
    return [(Fraction(1), Fraction(0))] + [(sol[j], sol[M + j]) for j in range(M)]


def pade_exact(b, order):
    """Diagonal ``[order/order]`` Pade approximant of ``sum_n b_n z^n``.

    The linear system for the denominator is solved exactly on the binary
    values of ``b``; the result is rounded once. If the table is degenerate
    (e.g. ``b`` is itself rational of lower degree) the denominator degree is
    lowered until the system is solvable. Returns ``(p, q)`` in ascending
    powers with ``q[0] = 1``.
    """
    N = order
    if N < 0 or len(b) < 2 * N + 1:
        raise DomainError(f"Pade order {N} needs {2 * N + 1} coefficients, got {len(b)}")
    br = [(Fraction(z.real), Fraction(z.imag)) for z in (complex(v) for v in b[: 2 * N + 1])]
    for M in range(N, -1, -1):
        try:
            q = _pade_denominator(br, N, M)
            break
        except RangeError:
            continue
    p = []
    for k in range(N + 1):
        js = range(min(k, M) + 1)
        re = sum(q[j][0] * br[k - j][0] - q[j][1] * br[k - j][1] for j in js)
        im = sum(q[j][0] * br[k - j][1] + q[j][1] * br[k - j][0] for j in js)
        p.append(complex(float(re), float(im)))
    qc = [complex(float(a), float(c)) for a, c in q]
    return np.array(p), np.array(qc)


def _check_ray(p, q, theta):
    if len(q) < 2:
        return
    poles = np.roots(q[::-1])
    for z in poles:
        scale = float(np.sum(np.abs(p) * abs(z) ** np.arange(len(p))))
        if abs(np.polyval(p[::-1], z)) < 1e-8 * scale:
            continue  # pole cancelled by a numerator zero (Froissart doublet)
        d = np.angle(z * np.exp(-1j * theta))
        if abs(d) < math.pi / 2 and abs(math.sin(d)) <= RAY_CLEARANCE:
            raise RayObstructionError(
                f"Pade pole at zeta={complex(z):.6g} lies on the ray arg={theta:.4g}; choose another angle")


def borel_resum(series, rbar, ray_angle=DEFAULT_RAY, pade_order=DEFAULT_PADE_ORDER):
    """Borel-Pade sum of ``series`` at ``rbar``, including the prefactor.

    ``B(zeta) = sum A_n zeta^n / n!`` is replaced by its diagonal Pade
    approximant ``R`` and ``sum A_n y^n = int_0^inf e^{-zeta} R(y zeta) dzeta``
    is integrated along ``zeta = rho e^{i ray_angle}``.
    """
    if len(series.coeffs) < 2 * pade_order + 1:
        raise DomainError(f"pade_order {pade_order} needs {2 * pade_order + 1} coefficients, "
                          f"series has {len(series.coeffs)}")
    if not abs(ray_angle) < math.pi / 2:
        raise DomainError("ray angle must lie in (-pi/2, pi/2) for the Laplace integral to converge")
    y = series.variable(rbar)
    n = 2 * pade_order + 1
    b = [c / math.factorial(k) for k, c in enumerate(series.coeffs[:n])]
    p, q = pade_exact(b, pade_order)
    _check_ray(p, q, ray_angle)
    ph = complex(math.cos(ray_angle), math.sin(ray_angle))
    pr, qr = p[::-1], q[::-1]

    def f(rho):
        z = y * rho * ph
        return np.exp(-rho * ph) * np.polyval(pr, z) / np.polyval(qr, z) * ph

    # Absolute floor from the integral of |f| so a vanishing real or imaginary part converges.
    scale = integrate.quad(lambda s: abs(f(s)), 0, np.inf, limit=200, epsrel=1e-6)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda s: f(s).real, 0, np.inf, limit=400,
                            epsabs=1e-16 * scale, epsrel=1e-13)[0]
        im = integrate.quad(lambda s: f(s).imag, 0, np.inf, limit=400,
                            epsabs=1e-16 * scale, epsrel=1e-13)[0]
    return series.prefactor(rbar) * complex(re, im)
