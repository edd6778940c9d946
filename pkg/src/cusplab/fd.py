"""Fourth-order finite differences on uniform grids.

Interior points use 5-point central stencils; the two points at each end
use 6-point one-sided stencils of the same order. Weights are generated
exactly (rational arithmetic) so there are no hand-typed coefficients.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ResolutionError

ORDER = 4
MIN_POINTS = 7


@lru_cache(maxsize=None)
def stencil_weights(offsets, deriv):
    """Weights ``c_j`` with ``f^(deriv)(0) ~ sum_j c_j f(offset_j)`` (unit spacing)."""
    n = len(offsets)
    # Solve sum_j c_j o_j^k / k! = delta_{k,deriv} for k < n by Gauss-Jordan on Fractions.
    rows = [[Fraction(o) ** k / factorial(k) for o in offsets] + [Fraction(int(k == deriv))]
            for k in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [v / p for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple(float(rows[k][n]) for k in range(n))


def check_grid(x):
    """Return the spacing of a uniform grid, raising ResolutionError otherwise."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < MIN_POINTS:
        raise ResolutionError(f"need a 1-D grid with at least {MIN_POINTS} points")
    dx = np.diff(x)
    h = dx.mean()
    if h <= 0 or np.max(np.abs(dx - h)) > 1e-9 * max(h, 1.0):
        raise ResolutionError("grid must be uniform and increasing")
    return float(h)


def derivative(f, h, deriv):
    """``deriv``-th derivative (1 or 2) of samples ``f`` at 4th order."""
    f = np.asarray(f)
    n = f.shape[-1]
    if n < MIN_POINTS:
        raise ResolutionError(f"need at least {MIN_POINTS} samples")
    out = np.empty_like(f, dtype=np.result_type(f, float))
    c = stencil_weights((-2, -1, 0, 1, 2), deriv)
    out[..., 2:-2] = (c[0] * f[..., :-4] + c[1] * f[..., 1:-3] + c[2] * f[..., 2:-2]
                      + c[3] * f[..., 3:-1] + c[4] * f[..., 4:])
    for i in (0, 1):
        offs = tuple(range(-i, 6 - i))
        w = stencil_weights(offs, deriv)
        out[..., i] = sum(wk * f[..., k] for k, wk in enumerate(w))
        offs_r = tuple(-o for o in offs)
        w = stencil_weights(offs_r, deriv)
        out[..., n - 1 - i] = sum(wk * f[..., n - 1 - k] for k, wk in enumerate(w))
    return out / h ** deriv
