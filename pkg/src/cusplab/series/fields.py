"""Sampled fields and time-power series containers, with JSON round-trips.

Complex numbers are serialized as ``[re, im]`` pairs. Floats are written
with ``repr`` precision by the standard ``json`` module, so a dump/load
cycle is exact.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from ..errors import DomainError

FIELD_SCHEMA = "cusplab.complex_field/1"
SERIES_SCHEMA = "cusplab.time_power_series/1"


def encode_complex(values):
    arr = np.asarray(values, dtype=complex).ravel()
    return [[float(v.real), float(v.imag)] for v in arr]


def decode_complex(pairs):
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("complex data must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


@dataclass
class ComplexField:
    """Complex samples on a 1-D grid.

    ``coord`` names the grid variable: ``"r"`` (radius), ``"rbar"`` (reduced
    radius) or ``"x"`` (signed 1D position).
    """

    grid: np.ndarray
    values: np.ndarray
    coord: str = "r"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.ndim != 1 or self.values.shape != self.grid.shape:
            raise DomainError("grid and values must be 1-D arrays of equal length")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values must be finite")
        if self.coord not in ("r", "rbar", "x"):
            raise DomainError(f"unknown coordinate {self.coord!r}")

    def same_grid(self, other):
        return (self.coord == other.coord and self.grid.shape == other.grid.shape
                and np.array_equal(self.grid, other.grid))

    def to_dict(self):
        return {"schema": FIELD_SCHEMA, "coord": self.coord,
                "grid": self.grid.tolist(), "values": encode_complex(self.values)}

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != FIELD_SCHEMA:
            raise DomainError(f"expected schema {FIELD_SCHEMA!r}")
        return cls(np.asarray(d["grid"], dtype=float), decode_complex(d["values"]), d["coord"])


@dataclass
class ChannelField:
    """Angular-channel decomposition ``f(rb, theta) = sum_l f_l(rb) P_l(cos theta)``.

    Channels are stored in the Legendre basis (not normalized spherical
    harmonics), so ``f_1`` is literally the coefficient of ``cos(theta)``.
    """

    grid: np.ndarray
    channels: dict = field(default_factory=dict)
    coord: str = "rbar"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        chans = {}
        for ell, vals in self.channels.items():
            if int(ell) < 0:
                raise DomainError("channel index must be >= 0")
            v = np.asarray(vals, dtype=complex)
            if v.shape != self.grid.shape:
                raise DomainError(f"channel {ell} does not match the grid")
            chans[int(ell)] = v
        self.channels = chans

    def channel(self, ell):
        return self.channels.get(ell, np.zeros(self.grid.shape, dtype=complex))

    def evaluate(self, ctheta):
        """Values at a fixed ``cos(theta)`` (scalar)."""
        from numpy.polynomial import legendre
        out = np.zeros(self.grid.shape, dtype=complex)
        for ell, v in self.channels.items():
            basis = np.zeros(ell + 1)
            basis[ell] = 1.0
            out += v * legendre.legval(ctheta, basis)
        return out


@dataclass
class TimePowerSeries:
    """Coefficient fields ``c_p`` of ``sum_p c_p t**p`` (or ``s**p``)."""

    coeffs: list
    variable: str = "t"

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("a time-power series needs at least c_0")
        if self.variable not in ("t", "s"):
            raise DomainError("variable must be 't' or 's'")
        first = self.coeffs[0]
        for c in self.coeffs[1:]:
            if not first.same_grid(c):
                raise DomainError("all coefficient fields must share one grid")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def grid(self):
        return self.coeffs[0].grid

    def partial_sum(self, t, order=None):
        """``sum_{p<=order} c_p t**p`` by Horner's rule."""
        n = self.order if order is None else min(order, self.order)
        acc = np.zeros(self.grid.shape, dtype=complex)
        for c in reversed(self.coeffs[: n + 1]):
            acc = acc * t + c.values
        return ComplexField(self.grid, acc, self.coeffs[0].coord)

    def to_dict(self):
        c0 = self.coeffs[0]
        return {"schema": SERIES_SCHEMA, "variable": self.variable, "order": self.order,
                "coord": c0.coord, "grid": c0.grid.tolist(),
                "coeffs": [encode_complex(c.values) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SERIES_SCHEMA:
            raise DomainError(f"expected schema {SERIES_SCHEMA!r}")
        grid = np.asarray(d["grid"], dtype=float)
        coeffs = [ComplexField(grid, decode_complex(c), d["coord"]) for c in d["coeffs"]]
        if len(coeffs) != d["order"] + 1:
            raise DomainError("order does not match the number of coefficients")
        return cls(coeffs, d["variable"])

    def dumps(self):
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))
