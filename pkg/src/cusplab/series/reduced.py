"""Reduced variables s = Z sqrt(t), rb = r / sqrt(2t) and the order-by-order equations.

Writing ``psi = sum_m psi_m(rb) s^m`` turns the TDSE into

    {L - m i} psi_m + (2/Z^2) sum_{q=1}^{m} v_{q-2} psi_{m-q} = 0,
    L = -Lap_rb / 2 + i rb d/drb,

with the potential split as ``v = sum_p v_p(rb) s^p``. Fields are kept as
Legendre channels ``sum_l f_l(rb) P_l(cos theta)`` so each order is a set of
radial ODEs:

    L_l f = -(f'' + 2 f'/rb - l(l+1) f/rb^2)/2 + i rb f'.

Two routes are provided: exact Laurent-polynomial solutions of the recursion
(:func:`te_reduced_terms`), and a 4th-order finite-difference residual for
arbitrary sampled fields (:func:`reduced_residual`).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .. import fd
from ..cxmath import SQRT_PI
from ..errors import DomainError, RangeError, UnsupportedError
from ..models import ModelParams
from .fields import ChannelField, ComplexField

# Relative tolerance for the solvability condition at k = m.
_RESONANCE_TOL = 1e-10
# Coefficients below this fraction of the channel's largest are round-off.
_PRUNE_TOL = 1e-13


def reduced_coords(r, t, p=ModelParams()):
    """``(s, rb) = (Z sqrt(t), r / sqrt(2 t))``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("reduced coordinates need t > 0")
    s = p.Z * np.sqrt(t)
    rb = np.asarray(r, dtype=float) / np.sqrt(2.0 * t)
    if s.ndim == 0 and np.ndim(rb) == 0:
        return float(s), float(rb)
    return s, rb


def physical_coords(s, rbar, p=ModelParams()):
    """Inverse map: ``r = sqrt(2) rb s / Z``, ``t = s^2 / Z^2``."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("s must be > 0")
    r = math.sqrt(2.0) * np.asarray(rbar, dtype=float) * s / p.Z
    t = s * s / (p.Z * p.Z)
    if s.ndim == 0 and np.ndim(r) == 0:
        return float(r), float(t)
    return r, t


# ---------------------------------------------------------------- potential

@dataclass(frozen=True)
class PotentialTerm:
    """Monomial ``coeff * rb**power`` times ``cos(theta)`` if ``angular == "cos_theta"``."""

    coeff: float
    power: int
    angular: str = "none"

    def profile(self, rbar):
        return self.coeff * np.asarray(rbar, dtype=float) ** self.power


@dataclass(frozen=True)
class ReducedPotential:
    """Terms ``v_p(rb)`` of ``v = sum_p v_p s^p`` for charge ``Z``."""

    Z: float
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        for q in self.terms:
            if q < -1:
                raise DomainError("reduced potential terms start at p = -1")


def reduced_potential_terms(p=ModelParams(), kind="hydrogen"):
    """Reduced potential for ``-Z/r + E z`` (``kind="hydrogen"``) or ``0`` (``"free"``).

    Substituting ``r = sqrt(2) rb s / Z`` gives ``v_{-1} = -Z^2/(sqrt(2) rb)`` and
    ``v_1 = sqrt(2) E rb cos(theta) / Z``. The 1D delta well has no power-law
    profile and is rejected.
    """
    if p.dim != 3:
        raise UnsupportedError("reduced potentials are implemented for 3D power-law potentials only")
    if kind == "free":
        return ReducedPotential(p.Z, {})
    if kind != "hydrogen":
        raise UnsupportedError(f"unsupported potential {kind!r}")
    terms = {-1: PotentialTerm(-p.Z ** 2 / math.sqrt(2.0), -1)}
    if p.field != 0:
        terms[1] = PotentialTerm(math.sqrt(2.0) * p.field / p.Z, 1, "cos_theta")
    return ReducedPotential(p.Z, terms)


def _times_cos(channels):
    """Multiply a Legendre expansion by cos(theta)."""
    out = {}
    for ell, val in channels.items():
        up = (ell + 1) / (2 * ell + 1)
        out[ell + 1] = out.get(ell + 1, 0) + up * val
        if ell > 0:
            out[ell - 1] = out.get(ell - 1, 0) + ell / (2 * ell + 1) * val
    return out


# ---------------------------------------------------------------- Laurent route

def _laurent_add(acc, poly, scale):
    for k, c in poly.items():
        acc[k] = acc.get(k, 0j) + scale * c


def _source(m, terms, pot):
    """Channels of ``(2/Z^2) sum_q v_{q-2} psi_{m-q}`` as Laurent dicts."""
    src = {}
    for q in range(1, m + 1):
        term = pot.terms.get(q - 2)
        if term is None:
            continue
        scale = 2.0 * term.coeff / pot.Z ** 2
        shifted = {ell: {k + term.power: c for k, c in poly.items()}
                   for ell, poly in terms[m - q].items()}
        if term.angular == "cos_theta":
            moved = {}
            for ell, poly in shifted.items():
                for ell2, w in _times_cos({ell: 1.0}).items():
                    _laurent_add(moved.setdefault(ell2, {}), poly, w)
            shifted = moved
        for ell, poly in shifted.items():
            _laurent_add(src.setdefault(ell, {}), poly, scale)
    return src


def _solve_channel(m, ell, src, top):
    """Laurent solution of ``(L_l - m i) a + src = 0`` with ``a_m = top``."""
    powers = list(src) + [m]
    kmax = max(powers)
    kmin = min(min(powers), -ell - 3) - 2
    scale = max([abs(c) for c in src.values()] + [abs(top), 1e-300])
    a = {}
    for k in range(kmax, kmin - 1, -1):
        if (k - m) % 2:
            continue
        up = 0.5 * ((k + 2) * (k + 3) - ell * (ell + 1)) * a.get(k + 2, 0j)
        rhs = up - src.get(k, 0j)
        if k == m:
            if abs(rhs) > _RESONANCE_TOL * scale:
                raise RangeError(f"order {m}, channel {ell}: recursion has no Laurent solution")
            a[k] = complex(top)
        else:
            a[k] = rhs / (1j * (k - m))
    # cancellation leaves round-off where an exact coefficient vanishes
    big = max([abs(c) for c in a.values()] + [0.0])
    return {k: c for k, c in a.items() if abs(c) > _PRUNE_TOL * big}


def te_reduced_terms(p=ModelParams(), order=4, kind="hydrogen"):
    """Exact Laurent coefficients of ``psi_0 .. psi_order`` for the 1s initial state.

    Returns a list of ``{ell: {power: coefficient}}``. The free coefficient at
    ``rb**m`` is fixed by the initial condition: ``psi0 = N e^{-Zr}`` gives
    ``N (-sqrt 2)^m / m!`` in the s-wave, ``N = Z^{3/2}/sqrt(pi)``.
    ``kind="free"`` re-expands the nucleus-free evolution (the TE solution).
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    pot = reduced_potential_terms(p, kind)
    norm = p.Z ** 1.5 / SQRT_PI
    terms = []
    for m in range(order + 1):
        src = _source(m, terms, pot)
        chans = {}
        for ell in sorted(set(src) | {0}):
            top = norm * (-math.sqrt(2.0)) ** m / math.factorial(m) if ell == 0 else 0.0
            sol = _solve_channel(m, ell, src.get(ell, {}), top)
            if sol:
                chans[ell] = sol
        terms.append(chans)
    return terms


def laurent_channels(terms, rbar):
    """Evaluate ``{ell: {power: c}}`` on a grid as a ChannelField."""
    rb = np.asarray(rbar, dtype=float)
    chans = {ell: sum(c * rb ** k for k, c in poly.items()) for ell, poly in terms.items()}
    return ChannelField(rb, chans)


# ---------------------------------------------------------------- finite-difference route

def channel_operator(f, rbar, ell, m=0):
    """``(L_l - m i) f`` at 4th order."""
    h = fd.check_grid(rbar)
    d1 = fd.derivative(f, h, 1)
    d2 = fd.derivative(f, h, 2)
    rb = np.asarray(rbar, dtype=float)
    lap = d2 + 2.0 * d1 / rb - ell * (ell + 1) * f / (rb * rb)
    return -0.5 * lap + 1j * rb * d1 - 1j * m * f


def _as_channels(f):
    if isinstance(f, ComplexField):
        return ChannelField(f.grid, {0: f.values})
    return f


def reduced_residual(m, psi_m, lower, pot):
    """Residual ``{L - m i} psi_m + (2/Z^2) sum_{q=1}^{m} v_{q-2} psi_{m-q}`` per channel.

    ``psi_m`` and ``lower = [psi_0, ..., psi_{m-1}]`` are ChannelFields (a
    ComplexField is taken as pure s-wave) on one uniform reduced-radius grid
    excluding rb = 0.
    """
    if m < 0 or len(lower) != m:
        raise DomainError("lower must hold psi_0 .. psi_{m-1}")
    psi_m = _as_channels(psi_m)
    lower = [_as_channels(f) for f in lower]
    rb = psi_m.grid
    fd.check_grid(rb)
    if np.any(rb <= 0):
        raise DomainError("reduced grid must exclude rb = 0")
    for f in lower:
        if f.grid.shape != rb.shape or not np.array_equal(f.grid, rb):
            raise DomainError("all fields must share one grid")
    out = {}
    for ell, vals in psi_m.channels.items():
        out[ell] = channel_operator(vals, rb, ell, m)
    for q in range(1, m + 1):
        term = pot.terms.get(q - 2)
        if term is None:
            continue
        prof = 2.0 * term.profile(rb) / pot.Z ** 2
        chans = lower[m - q].channels
        if term.angular == "cos_theta":
            chans = _times_cos(chans)
        for ell, vals in chans.items():
            out[ell] = out.get(ell, 0) + prof * vals
    return ChannelField(rb, out)


# ---------------------------------------------------------------- S equation

def log_profile(g):
    """``S = log g`` with the phase unwrapped along the grid."""
    g = np.asarray(g, dtype=complex)
    if np.any(g == 0):
        raise DomainError("profile has zeros; log is undefined")
    return np.log(np.abs(g)) + 1j * np.unwrap(np.angle(g))


def s_ode_residual(S):
    """``S'' + S'^2 - 2i rb S' + 4 S'/rb + 6i`` for ``S`` sampled on a reduced grid."""
    rb = S.grid
    h = fd.check_grid(rb)
    if np.any(rb <= 0):
        raise DomainError("reduced grid must exclude rb = 0")
    d1 = fd.derivative(S.values, h, 1)
    d2 = fd.derivative(S.values, h, 2)
    return ComplexField(rb, d2 + d1 * d1 - 2j * rb * d1 + 4.0 * d1 / rb + 6j, S.coord)
