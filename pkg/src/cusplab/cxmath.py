"""Complex special functions used by the closed-form propagations.

All functions accept Python scalars or NumPy arrays and return the same
shape. Scalar input gives a Python ``complex``/``float`` back.

The Faddeeva function is backed by ``scipy.special.wofz`` (the
Poppe-Wijers / Johnson implementation), which already switches between a
power series near the origin and a continued fraction for large ``|z|``.
Everything else here is built on top of it:

    erfcx(z) = w(iz)               scaled complementary error function
    erfc(z)  = exp(-z**2) w(iz)     for Re z >= 0
    erfc(z)  = 2 - erfc(-z)         for Re z <  0

so the only exponential ever formed is ``exp(-z**2)`` with a bounded
partner, and overflow can be detected up front.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError, RangeError

# exp(x) overflows float64 just above 709.78; keep a margin for the prefactor.
_EXP_LIMIT = 700.0

SQRT_PI = math.sqrt(math.pi)


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("complex argument must be finite")
    return arr


def _unwrap(arr, like):
    if np.ndim(like) == 0 and arr.ndim == 0:
        return complex(arr)
    return arr


def faddeeva_w(z):
    """Faddeeva function ``w(z) = exp(-z**2) * erfc(-i z)``.

    Raises RangeError in the lower half plane where ``exp(-z**2)`` overflows
    (``Im z < 0`` and ``(Im z)**2 - (Re z)**2 > 700``).
    """
    zz = _as_complex(z)
    growth = zz.imag ** 2 - zz.real ** 2
    if np.any((zz.imag < 0) & (growth > _EXP_LIMIT)):
        raise RangeError("faddeeva_w overflows for Im z << 0 with |Im z| > |Re z|")
    return _unwrap(special.wofz(zz), z)


def erfcx_complex(z):
    """Scaled complementary error function ``exp(z**2) * erfc(z) = w(i z)``."""
    return faddeeva_w(_as_complex(z) * 1j)


def erfc_complex(z):
    """Complementary error function of a complex argument.

    Evaluated through the scaled function on the right half plane and the
    reflection ``erfc(-z) = 2 - erfc(z)`` on the left, so large ``|z|`` along
    the real axis never overflows. Raises RangeError where the true value
    exceeds float range (``(Im z)**2 - (Re z)**2 > 700``).
    """
    zz = _as_complex(z)
    if np.any(zz.imag ** 2 - zz.real ** 2 > _EXP_LIMIT):
        raise RangeError("erfc(z) overflows: |Im z| too large relative to |Re z|")
    left = zz.real < 0
    a = np.where(left, -zz, zz)
    # a is in the closed right half plane, so w(i a) is bounded.
    val = np.exp(-a * a) * special.wofz(1j * a)
    out = np.where(left, 2.0 - val, val)
    return _unwrap(out, z)


def gamma_real(x):
    """Gamma function for real ``x > 0``."""
    if np.ndim(x) == 0:
        xf = float(x)
        if not xf > 0 or not math.isfinite(xf):
            raise DomainError(f"gamma_real needs finite x > 0, got {x!r}")
        return math.gamma(xf)
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("gamma_real needs finite x > 0")
    return special.gamma(arr)


def sqrt_2it(t):
    """Principal ``sqrt(2 i t)`` for ``t >= 0``: ``sqrt(2t) * exp(i pi/4)``."""
    return np.sqrt(2.0 * np.asarray(t, dtype=float)) * np.exp(0.25j * np.pi)
