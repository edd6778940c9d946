"""Taylor expansion of the time-evolution operator on a grid.

``c_p = (-i H)^p psi0 / p!`` is built by applying a discretized Hamiltonian
repeatedly. Radial problems act on ``u = r psi`` so that the Laplacian is a
plain second derivative; the grid should not contain r = 0.

Only the 5-point central stencil is used. One-sided closures at the grid
ends leave O(h^4) spikes that every further application amplifies by the
spectral radius, so instead each order drops two points per side and the
series is returned on ``grid[2P:-2P]``.
"""

from dataclasses import dataclass
import math
from typing import Callable, Optional
import warnings

import numpy as np

from .. import fd
from ..errors import AccuracyWarning, DomainError, ResolutionError
from .fields import ComplexField, TimePowerSeries

# Coefficients whose estimated round-off amplification exceeds this fraction
# of their own size are flagged.
NOISE_FRACTION = 1e-3


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H = -1/2 Laplacian + V``.

    ``geometry`` is ``"radial"`` (one partial wave ``ell``, acting on u = r psi)
    or ``"line"``. ``potential`` maps grid coordinates to real values; None
    means free motion.
    """

    geometry: str = "radial"
    potential: Optional[Callable] = None
    ell: int = 0

    def __post_init__(self):
        if self.geometry not in ("radial", "line"):
            raise DomainError(f"unknown geometry {self.geometry!r}")
        if self.ell < 0 or (self.geometry == "line" and self.ell):
            raise DomainError("ell must be >= 0 and is only meaningful for radial problems")

    def diagonal(self, x):
        v = np.zeros_like(x) if self.potential is None else np.asarray(self.potential(x), dtype=float)
        if self.geometry == "radial" and self.ell:
            v = v + self.ell * (self.ell + 1) / (2.0 * x * x)
        return v

    def apply_interior(self, f, x, h):
        """``H f`` at 4th order on ``x[2:-2]`` (f is u = r psi for radial problems)."""
        c = fd.stencil_weights((-2, -1, 0, 1, 2), 2)
        n = f.shape[-1]
        lap = sum(ck * f[k:n - 4 + k] for k, ck in enumerate(c)) / (h * h)
        return -0.5 * lap + self.diagonal(x[2:-2]) * f[2:-2]

    def spectral_radius(self, x, h):
        # 5-point second-derivative symbol peaks at 16/(3 h^2); H carries a factor 1/2.
        return 8.0 / (3.0 * h * h) + float(np.max(np.abs(self.diagonal(x))))


def te_coefficients_grid(hamiltonian, psi0, P):
    """Taylor coefficients ``c_0 .. c_P`` of ``exp(-i H t) psi0`` on ``grid[2P:-2P]``.

    Emits AccuracyWarning when the round-off amplification of repeated
    differencing, ``eps * max|psi0| * rho^p / p!`` with ``rho`` the discrete
    spectral radius, exceeds NOISE_FRACTION of ``max|c_p|``. Partial sums at
    small t can still be accurate then, since ``t^p`` damps the noise.
    """
    if P < 0:
        raise DomainError("order P must be >= 0")
    x = psi0.grid
    h = fd.check_grid(x)
    if x.size < 4 * P + fd.MIN_POINTS:
        raise ResolutionError(f"order {P} needs at least {4 * P + fd.MIN_POINTS} grid points")
    radial = hamiltonian.geometry == "radial"
    if radial and np.any(x <= 0):
        raise DomainError("radial grids must exclude r = 0")
    f = psi0.values * x if radial else psi0.values.copy()
    rho = hamiltonian.spectral_radius(x, h)
    scale = float(np.max(np.abs(psi0.values))) or 1.0
    raw = [f]
    xs = x
    flagged = None
    for p in range(1, P + 1):
        f = -1j * hamiltonian.apply_interior(f, xs, h) / p
        xs = xs[2:-2]
        raw.append(f)
        size = float(np.max(np.abs(f / xs if radial else f)))
        noise = np.finfo(float).eps * scale * math.exp(p * math.log(rho) - math.lgamma(p + 1))
        if flagged is None and noise > NOISE_FRACTION * size:
            flagged = p
    if flagged is not None:
        warnings.warn(f"Taylor coefficients from order {flagged} on are dominated by round-off "
                      f"amplification (spectral radius {rho:.3g}); coarsen the grid or lower P",
                      AccuracyWarning, stacklevel=2)
    coeffs = []
    for p, vals in enumerate(raw):
        k = 2 * (P - p)
        vals = vals[k:vals.size - k] if k else vals
        coeffs.append(ComplexField(xs, vals / xs if radial else vals, psi0.coord))
    return TimePowerSeries(coeffs, "t")


def te_partial_sum(series, t, order=None):
    """Evaluate the truncated Taylor series at time ``t``."""
    if t < 0:
        raise DomainError("t must be >= 0")
    return series.partial_sum(t, order)
