"""Closed-form wavefunctions and short-time laws, in Hartree atomic units.

Scenarios covered:

* free propagation of the hydrogen 1s orbital after the nucleus is removed
  (exact Green's-function solution, its Taylor-in-time resummation, and the
  short-time expansion with its ``t**(5/2)`` cusp term);
* hydrogen in a suddenly applied static field at fourth order of the
  reduced-variable expansion (``psi4_te``, the correction ``xi4`` and the
  leading ``t**(11/2)`` term);
* the delta-well analogue in one dimension, the induced dipole and the
  high-frequency photoabsorption tail.

Functions broadcast over NumPy arrays; scalar input returns scalars.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np
from scipy import special

from .cxmath import SQRT_PI, erfcx_complex, sqrt_2it
from .errors import DomainError, RangeError

DEFAULT_LIGHT_SPEED = 137.035999

# Minimum r / sqrt(t) for which the short-time asymptotic forms are evaluated.
ASYMPTOTIC_RATIO = 5.0

# Below r = SMALL_R_FACTOR * sqrt(t) the exact free solution is continued
# from the origin, where the displayed form is 0/0.
SMALL_R_FACTOR = 1e-4

DIVERGENT = complex(math.inf, math.inf)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of a scenario.

    ``Z`` is the nuclear charge (or delta-well strength in 1D), ``field`` the
    static field amplitude switched on at t=0, ``dim`` the spatial dimension
    and ``light_speed`` the speed of light in atomic units.
    """

    Z: float = 1.0
    field: float = 0.0
    dim: int = 3
    light_speed: float = DEFAULT_LIGHT_SPEED

    def __post_init__(self):
        if not (math.isfinite(self.Z) and self.Z > 0):
            raise DomainError(f"Z must be > 0, got {self.Z!r}")
        if not math.isfinite(self.field):
            raise DomainError("field must be finite")
        if self.dim not in (1, 3):
            raise DomainError(f"dim must be 1 or 3, got {self.dim!r}")
        if not (math.isfinite(self.light_speed) and self.light_speed > 0):
            raise DomainError("light_speed must be > 0")


@dataclass(frozen=True)
class HalfPowerTerm:
    """One non-analytic contribution ``A t**nu exp(i r^2/2t) cos(theta)^k / r**n``.

    ``amplitude`` carries every constant (charges, field, pi). In 1D the
    coordinate is signed, so ``r_power`` odd gives an odd function of x.
    """

    amplitude: complex
    t_exponent: Fraction
    r_power: int
    angular: str = "none"  # "none" or "cos_theta"
    oscillatory: bool = True

    def __post_init__(self):
        if self.t_exponent <= 0 or self.t_exponent.denominator != 2:
            raise DomainError("t_exponent must be a positive half-integer")
        if self.r_power < 0:
            raise DomainError("r_power must be >= 0")
        if self.angular not in ("none", "cos_theta"):
            raise DomainError(f"unknown angular factor {self.angular!r}")

    def __call__(self, r, t, ctheta=1.0):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        _require_asymptotic(np.abs(r), t)
        val = self.amplitude * t ** float(self.t_exponent) / r ** self.r_power
        if self.oscillatory:
            val = val * np.exp(1j * r * r / (2.0 * t))
        if self.angular == "cos_theta":
            val = val * np.asarray(ctheta, dtype=float)
        return _scalar(val)


def _scalar(val):
    val = np.asarray(val)
    if val.ndim == 0:
        return complex(val) if np.iscomplexobj(val) else float(val)
    return val


def _require_asymptotic(r, t):
    if np.any(r < ASYMPTOTIC_RATIO * np.sqrt(t)):
        raise RangeError("short-time asymptotics need r >= 5*sqrt(t) (r >> sqrt(t))")


def _nonneg_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise DomainError("radius must be finite and >= 0")
    return r


# ---------------------------------------------------------------- disappearing nucleus

def psi0_hydrogen(r, p=ModelParams()):
    """Hydrogenic 1s orbital ``Z^{3/2} exp(-Z r) / sqrt(pi)``."""
    r = _nonneg_radius(r)
    return _scalar(p.Z ** 1.5 * np.exp(-p.Z * r) / SQRT_PI + 0j)


def psi0_delta_well(x, p=ModelParams(dim=1)):
    """Bound state ``sqrt(Z) exp(-Z |x|)`` of the well ``-Z delta(x)``."""
    x = np.asarray(x, dtype=float)
    return _scalar(math.sqrt(p.Z) * np.exp(-p.Z * np.abs(x)) + 0j)


def _free_origin(t, Z):
    # Limit r -> 0 of the exact solution: Z^{3/2}/sqrt(pi) * exp(iZ^2 t/2) * f'(0, t).
    a = sqrt_2it(t)
    u0 = 1j * Z * t / a
    return Z ** 1.5 / SQRT_PI * ((1 + 1j * Z * Z * t) * erfcx_complex(u0)
                                 - 2j * Z * t / (SQRT_PI * a))


def _free_bulk(r, t, Z):
    # Z^{3/2} e^{iZ^2t/2} / (2 sqrt(pi) r) * [f(r,t) - f(-r,t)] with
    # f(r,t) = (r + iZt) e^{Zr} erfc((r + iZt)/sqrt(2it)), rewritten through
    # erfcx so that no exp(Z r) is ever formed.
    a = sqrt_2it(t)
    phase = np.exp(1j * (r * r - Z * Z * t * t) / (2.0 * t))
    u = (r + 1j * Z * t) / a
    f_plus = (r + 1j * Z * t) * phase * erfcx_complex(u)
    v = (-r + 1j * Z * t) / a
    # e^{-Zr} erfc(v): scaled form on Re v >= 0, reflection otherwise.
    right = v.real >= 0
    ev = np.where(right, phase * erfcx_complex(np.where(right, v, -v)),
                  2.0 * np.exp(-Z * r) - phase * erfcx_complex(np.where(right, v, -v)))
    f_minus = (-r + 1j * Z * t) * ev
    return Z ** 1.5 * np.exp(0.5j * Z * Z * t) / (2.0 * SQRT_PI * r) * (f_plus - f_minus)


def psi_exact_free(r, t, p=ModelParams()):
    """Exact free evolution of the 1s orbital after the nucleus vanishes.

    Finite at the origin: for ``r < 1e-4*sqrt(t)`` the solution is continued
    as ``psi(0) + (psi(r_c) - psi(0)) (r/r_c)**2`` (the solution is even in r).
    """
    r = _nonneg_radius(r)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("time must be finite and >= 0")
    r, t = np.broadcast_arrays(r, t)
    Z = p.Z
    out = np.empty(r.shape, dtype=complex)
    zero_t = t == 0
    out[zero_t] = Z ** 1.5 * np.exp(-Z * r[zero_t]) / SQRT_PI
    live = ~zero_t
    rl, tl = r[live], t[live]
    rc = SMALL_R_FACTOR * np.sqrt(tl)
    small = rl < rc
    res = np.empty(rl.shape, dtype=complex)
    big = ~small
    if np.any(big):
        res[big] = _free_bulk(rl[big], tl[big], Z)
    if np.any(small):
        ts, rcs = tl[small], rc[small]
        origin = _free_origin(ts, Z)
        edge = _free_bulk(rcs, ts, Z)
        res[small] = origin + (edge - origin) * (rl[small] / rcs) ** 2
    out[live] = res
    return _scalar(out)


def psi_te_free(r, t, p=ModelParams()):
    """Taylor-in-time solution summed to all orders.

    ``Z^{3/2}/sqrt(pi) exp(-Zr + iZ^2 t/2) (1 - iZt/r)``. At ``r = 0`` with
    ``t > 0`` the value is reported as ``DIVERGENT`` (infinite modulus).
    """
    r = _nonneg_radius(r)
    t = np.asarray(t, dtype=float)
    r, t = np.broadcast_arrays(r, t)
    Z = p.Z
    out = np.full(r.shape, DIVERGENT, dtype=complex)
    ok = (r > 0) | (t == 0)
    rr, tt = r[ok], t[ok]
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(tt == 0, 1.0, 1.0 - 1j * Z * tt / np.where(rr > 0, rr, 1.0))
    out[ok] = Z ** 1.5 / SQRT_PI * np.exp(-Z * rr + 0.5j * Z * Z * tt) * corr
    return _scalar(out)


def free_half_power_term(p=ModelParams()):
    """The ``t**(5/2)`` cusp term of the disappearing-nucleus expansion."""
    return HalfPowerTerm(amplitude=-(2 + 2j) * p.Z ** 2.5 / math.pi,
                         t_exponent=Fraction(5, 2), r_power=4)


def short_time_free(r, t, p=ModelParams(), include_half_power=True):
    """Short-time expansion of the exact free solution for ``r >> sqrt(t)``.

    Integer powers t^0, t^1, t^2 plus, optionally, the oscillatory
    ``-(2+2i) Z^{5/2} e^{ir^2/2t} t^{5/2} / (pi r^4)`` term.
    """
    r = _nonneg_radius(r)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be >= 0")
    _require_asymptotic(r, t)
    Z = p.Z
    e = np.exp(-Z * r) / SQRT_PI
    val = (Z ** 1.5 * e
           + 0.5j * Z ** 2.5 * (Z * r - 2) * e / r * t
           - Z ** 4.5 * (Z * r - 4) * e / (8 * r) * t * t) + 0j
    if include_half_power:
        pos = t > 0
        hp = np.zeros(np.broadcast(r, t).shape, dtype=complex)
        if np.any(pos):
            rb, tb = np.broadcast_arrays(r, t)
            hp[pos] = free_half_power_term(p)(rb[pos], tb[pos])
        val = val + hp
    return _scalar(val)


# ---------------------------------------------------------------- hydrogen in a field

def psi4_te(rbar, ctheta, p=ModelParams()):
    """Fourth-order reduced Taylor term for hydrogen in a static field.

    Coulomb part ``Z^{3/2}(-3 + 12i rb^2 + 4 rb^4)/(24 sqrt(pi))`` plus the
    field part ``E i zb (1 + 6i rb^2 + 24 rb^4) / (12 sqrt(pi) Z^{3/2} rb^3)``
    with ``zb = rb*ctheta``. The field part diverges as ``rb**-2``; at
    ``rb = 0`` it is reported as ``DIVERGENT``.
    """
    rb = _nonneg_radius(rbar)
    ct = np.asarray(ctheta, dtype=float)
    rb, ct = np.broadcast_arrays(rb, ct)
    Z, E = p.Z, p.field
    r2 = rb * rb
    coul = Z ** 1.5 / (24 * SQRT_PI) * (-3 + 12j * r2 + 4 * r2 * r2)
    singular = (rb == 0) & (E * ct != 0)
    safe = np.where(rb > 0, rb, 1.0)
    fld = np.where(rb > 0, E * 1j * ct / (12 * SQRT_PI * Z ** 1.5 * safe * safe)
                   * (1 + 6j * r2 + 24 * r2 * r2), 0.0)
    out = np.where(singular, DIVERGENT, coul + fld)
    return _scalar(out)


def c2_coefficient(p=ModelParams()):
    """Amplitude of the decaying branch that keeps ``psi4`` finite.

    Cancelling the ``rb**-2`` singularity of ``psi4_te`` against
    ``xi4_closed`` gives ``(1-i) E / (sqrt(2) pi Z^{3/2})``.
    """
    return (1 - 1j) * p.field / (math.sqrt(2.0) * math.pi * p.Z ** 1.5)


def c2_printed(p=ModelParams()):
    """The printed value ``(1-i) E / (2 pi Z^{3/2})``, kept for comparison.

    It is smaller than :func:`c2_coefficient` by ``sqrt(2)`` and leaves a
    residual ``rb**-2`` divergence in ``psi4``.
    """
    return (1 - 1j) * p.field / (2 * math.pi * p.Z ** 1.5)


# erfcx(w), w = (1-i) rb/sqrt(2), is split as asymptotic polynomial + remainder for
# rb >= _XI4_CROSSOVER so the r^5 ... r^-3 cancellations happen in exact arithmetic.
_XI4_CROSSOVER = 2.0
_XI4_TERMS = 8
_LAGUERRE_NODES = 80


def _gauss_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


@lru_cache(maxsize=None)
def _xi4_laurent():
    """Exact Laurent coefficients of (2+2i) r P4 - sqrt(2 pi) P6 * A_K(w).

    Returns {power: complex}; non-negative powers cancel exactly.
    """
    F = Fraction
    p4 = {0: (F(-3), F(0)), 2: (F(0), F(16)), 4: (F(4), F(0))}
    p6 = {0: (F(0), F(3)), 2: (F(-18), F(0)), 4: (F(0), F(36)), 6: (F(8), F(0))}
    acc = {}

    def add(power, val):
        cur = acc.get(power, (F(0), F(0)))
        acc[power] = (cur[0] + val[0], cur[1] + val[1])

    for k, c in p4.items():
        add(k + 1, _gauss_mul((F(2), F(2)), c))
    # sqrt(2 pi) * erfcx asymptotics = (1+i) sum_k (-i)^k (2k-1)!!/2^k r^{-2k-1}
    minus_i_pow = [(F(1), F(0)), (F(0), F(-1)), (F(-1), F(0)), (F(0), F(1))]
    dfact = F(1)
    for k in range(_XI4_TERMS):
        if k:
            dfact *= F(2 * k - 1, 2)
        coef = _gauss_mul((F(1), F(1)), minus_i_pow[k % 4])
        coef = (coef[0] * dfact, coef[1] * dfact)
        for j, c in p6.items():
            prod = _gauss_mul(coef, c)
            add(j - 2 * k - 1, (-prod[0], -prod[1]))
    if any(v != (0, 0) for pw, v in acc.items() if pw >= 0):
        raise AssertionError("polynomial part of xi4 failed to cancel")
    return {pw: complex(float(v[0]), float(v[1])) for pw, v in acc.items()
            if pw < 0 and v != (0, 0)}


@lru_cache(maxsize=None)
def _laguerre():
    x, w = special.roots_laguerre(_LAGUERRE_NODES)
    return x, w


@lru_cache(maxsize=None)
def _binom_half():
    # binom(-1/2, k) for k < 80
    out = [1.0]
    for k in range(1, 80):
        out.append(out[-1] * (-0.5 - (k - 1)) / k)
    return np.array(out)


def _erfcx_remainder(rb):
    """erfcx(w) minus its first _XI4_TERMS asymptotic terms, w = (1-i) rb/sqrt(2)."""
    x, wts = _laguerre()
    b = _binom_half()
    K = _XI4_TERMS
    rb = np.asarray(rb, dtype=float)
    y = 1j * x[None, :] / (rb[..., None] ** 2)
    ay = np.abs(y)
    direct = (1 + y) ** -0.5 - np.polyval(b[:K][::-1], y)
    tail = np.polyval(b[K:][::-1], y) * y ** K
    integrand = np.where(ay <= 0.5, tail, direct)
    w = (1 - 1j) * rb / math.sqrt(2.0)
    return (integrand @ wts) / (SQRT_PI * w)


def _xi4_bracket(rb):
    """(2+2i) rb P4 - sqrt(2 pi) P6 erfcx(w): the Eq.-style bracket without e^{i rb^2}."""
    rb = np.asarray(rb, dtype=float)
    r2 = rb * rb
    p6 = 3j - 18 * r2 + 36j * r2 * r2 + 8 * r2 ** 3
    out = np.empty(rb.shape, dtype=complex)
    near = rb < _XI4_CROSSOVER
    if np.any(near):
        rn = rb[near]
        q = rn * rn
        p4 = -3 + 16j * q + 4 * q * q
        w = (1 - 1j) * rn / math.sqrt(2.0)
        out[near] = (2 + 2j) * rn * p4 - math.sqrt(2 * math.pi) * p6[near] * erfcx_complex(w)
    far = ~near
    if np.any(far):
        rf = rb[far]
        lau = sum(c * rf ** pw for pw, c in _xi4_laurent().items())
        out[far] = lau - math.sqrt(2 * math.pi) * p6[far] * _erfcx_remainder(rf)
    return out


def xi4_profile(rbar, p=ModelParams(), c2=None):
    """Radial factor ``exp(S(rb))`` of the correction ``xi4 = exp(S) * zb``.

    The Borel-resummed closed form
    ``c2 (1+i)/(72 rb^3) [(2+2i) e^{i rb^2} rb (-3+16i rb^2+4 rb^4)
    - sqrt(2 pi)(3i-18 rb^2+36i rb^4+8 rb^6) erfc((1-i) rb/sqrt(2))]``,
    evaluated with e^{i rb^2} factored out of erfc. Behaves like
    ``-c2 e^{i rb^2}/rb^8`` at large rb. ``c2`` defaults to
    :func:`c2_coefficient`.
    """
    rb = _nonneg_radius(rbar)
    if c2 is None:
        c2 = c2_coefficient(p)
    out = np.full(rb.shape, DIVERGENT if c2 != 0 else 0j, dtype=complex)
    pos = rb > 0
    rp = rb[pos]
    out[pos] = c2 * (1 + 1j) / (72 * rp ** 3) * np.exp(1j * rp * rp) * _xi4_bracket(rp)
    return _scalar(out)


def xi4_closed(rbar, ctheta, p=ModelParams(), c2=None):
    """Correction ``xi4 = exp(S(rb)) * rb * cos(theta)`` restoring finiteness."""
    rb = _nonneg_radius(rbar)
    ct = np.asarray(ctheta, dtype=float)
    rb, ct = np.broadcast_arrays(rb, ct)
    g = np.asarray(xi4_profile(rb, p, c2), dtype=complex)
    with np.errstate(invalid="ignore"):
        out = np.where(rb > 0, g * rb * ct, np.where(ct * (c2_coefficient(p) if c2 is None else c2) != 0,
                                                     DIVERGENT, 0j))
    return _scalar(out)


def psi4_full(rbar, ctheta, p=ModelParams(), c2=None):
    """``psi4_te + xi4_closed`` (finite at the nucleus for the default c2)."""
    return _scalar(np.asarray(psi4_te(rbar, ctheta, p)) + np.asarray(xi4_closed(rbar, ctheta, p, c2)))


def field_half_power_term(p=ModelParams()):
    """Leading ``t**(11/2)`` term for hydrogen in a static field."""
    return HalfPowerTerm(amplitude=-(8 - 8j) * p.field * p.Z ** 2.5 / math.pi,
                         t_exponent=Fraction(11, 2), r_power=7, angular="cos_theta")


def leading_half_power_field(r, ctheta, t, p=ModelParams()):
    """``-(8-8i) E Z^{5/2} e^{ir^2/2t} cos(theta) t^{11/2} / (pi r^7)``, r >= 5 sqrt(t)."""
    return field_half_power_term(p)(r, t, ctheta)


def delta_well_half_power_term(p=ModelParams(dim=1)):
    """Leading ``t**(9/2)`` term for the delta well in a static field."""
    return HalfPowerTerm(amplitude=-(4 + 4j) * p.field * p.Z ** 1.5 / SQRT_PI,
                         t_exponent=Fraction(9, 2), r_power=5)


def leading_half_power_delta_well(x, t, p=ModelParams(dim=1)):
    """``-(4+4i) E Z^{3/2} e^{ix^2/2t} t^{9/2} / (sqrt(pi) x^5)``, |x| >= 5 sqrt(t).

    Odd in x, as a response to the odd perturbation ``E x`` must be.
    """
    return delta_well_half_power_term(p)(x, t)


# ---------------------------------------------------------------- dipole and absorption

def dipole_short_time_coefficient(p=ModelParams()):
    """Modulus of the ``t**(9/2)`` coefficient of the induced dipole, per unit field.

    The term itself enters with a negative sign: ``mu ~ -A t^{9/2}``.
    """
    return 256.0 * p.Z ** 5 / (2835.0 * SQRT_PI)


def sigma_tail(omega, p=ModelParams()):
    """High-frequency photoabsorption cross-section ``16 sqrt(2) Z^5 pi / (3 c w^{7/2})``."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise DomainError("omega must be > 0")
    return _scalar(16.0 * math.sqrt(2.0) * p.Z ** 5 * math.pi / (3.0 * p.light_speed * w ** 3.5))
