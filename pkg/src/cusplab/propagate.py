"""Crank-Nicolson propagation: 1D lines and 3D radial partial waves.

Radial problems evolve ``u_l(r) = r psi_l(r)`` on ``r_j = j h`` (j = 1..N)
with u(0) = u(R) = 0. The kinetic term uses the 4th-order 5-point stencil;
the ghost value at r = -h is the odd reflection ``u(-h) = -u(h)``. The
Coulomb potential is taken at face value on the grid (r_1 = h, no
softening). A static field ``E z`` couples neighbouring partial waves with
``<l+1| cos(theta) |l> = (l+1)/sqrt((2l+1)(2l+3))``; unknowns are ordered
r-major (all channels of one radius together) so the Crank-Nicolson matrix
is banded and its sparse LU factorization is cheap. It is factorized once.

Lines use the 3-point stencil so that a delta well ``-Z delta(x)`` can be a
single cell of depth ``-Z/h`` with a closed-form lattice bound state:
``sinh(kappa h) = Z h`` and ``E = -(sqrt(1 + Z^2 h^2) - 1)/h^2``.
"""

from dataclasses import dataclass, field
import math
import struct
import warnings

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .errors import AccuracyWarning, ConfigError, DomainError
from .models import ModelParams

SNAPSHOT_MAGIC = b"CUSPSNAP"
SNAPSHOT_VERSION = 1
# magic, version, kind (0 line, 1 radial), channels, points, snapshots, spacing, dt, origin
_HEADER = struct.Struct("<8sIBIIIddd")

# CN phase accuracy heuristic: dt * (energy spread of psi0) above this warns.
PHASE_LIMIT = 0.2
# Norm fraction allowed in the outermost cells at the end of a run.
BOUNDARY_LIMIT = 1e-6
BOUNDARY_CELLS = 5


@dataclass(frozen=True)
class GridSpec:
    """Spatial and temporal discretization.

    ``kind="line"``: x in [-extent, extent]; ``kind="radial"``: r in (0, extent].
    ``absorber_width``/``absorber_strength`` define a cos^2 mask applied after
    every step (width 0 disables it). Snapshots are kept every
    ``snapshot_every`` steps (0: only the first and last).
    """

    kind: str = "radial"
    extent: float = 40.0
    spacing: float = 0.01
    dt: float = 1e-3
    steps: int = 100
    l_max: int = 0
    absorber_width: float = 0.0
    absorber_strength: float = 0.0
    snapshot_every: int = 0

    def __post_init__(self):
        if self.kind not in ("line", "radial"):
            raise ConfigError(f"grid kind must be 'line' or 'radial', got {self.kind!r}")
        for name in ("extent", "spacing", "dt"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be > 0")
        if self.steps < 0 or self.l_max < 0 or self.snapshot_every < 0:
            raise ConfigError("steps, l_max and snapshot_every must be >= 0")
        if self.spacing * 10 > self.extent:
            raise ConfigError("extent must span at least 10 grid cells")
        if self.absorber_width < 0 or not 0 <= self.absorber_strength <= 1:
            raise ConfigError("absorber width must be >= 0 and strength in [0, 1]")
        if self.absorber_width >= self.extent:
            raise ConfigError("absorber wider than the box")
        if self.kind == "line" and self.l_max:
            raise ConfigError("l_max applies to radial grids only")

    def points(self):
        if self.kind == "radial":
            n = int(round(self.extent / self.spacing))
            return self.spacing * np.arange(1, n)
        n = int(round(self.extent / self.spacing))
        return self.spacing * np.arange(-n + 1, n)


@dataclass
class Trajectory:
    """Time series of a propagation.

    ``snapshots[k]`` has shape (channels, points): u_l(r) for radial grids
    (normalized-harmonic channels) or psi(x) for lines.
    """

    grid: GridSpec
    x: np.ndarray
    times: np.ndarray
    norm_series: np.ndarray
    dipole_series: np.ndarray
    snapshot_times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


# ---------------------------------------------------------------- operators

def _laplacian_radial(n, h):
    c = [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]
    diags = [np.full(n - abs(k), c[k + 2]) for k in range(-2, 3)]
    D = sparse.diags(diags, range(-2, 3), format="lil")
    # odd reflection ghosts: u(-h) = -u(h) and u(R+h) = -u(R-h)
    D[0, 0] += 1 / 12
    D[n - 1, n - 1] += 1 / 12
    return D.tocsr() / (h * h)


def _laplacian_line(n, h):
    return sparse.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], format="csr") / (h * h)


def cos_coupling(ell):
    """``<Y_{l+1,0}| cos(theta) |Y_{l,0}>``."""
    return (ell + 1) / math.sqrt((2 * ell + 1) * (2 * ell + 3))


def radial_hamiltonian(r, h, l_max, Z_nuc, field_amp):
    """Sparse coupled-channel Hamiltonian, r-major ordering (index = j*L + l)."""
    n = r.size
    L = l_max + 1
    D = _laplacian_radial(n, h)
    blocks = []
    for ell in range(L):
        v = ell * (ell + 1) / (2 * r * r) - Z_nuc / r
        blocks.append(-0.5 * D + sparse.diags(v))
    H = sparse.block_diag(blocks, format="csr")
    if field_amp != 0 and L > 1:
        rows, cols, vals = [], [], []
        for ell in range(L - 1):
            c = field_amp * cos_coupling(ell) * r
            a = ell * n + np.arange(n)
            b = (ell + 1) * n + np.arange(n)
            rows += [a, b]
            cols += [b, a]
            vals += [c, c]
        C = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                              shape=H.shape)
        H = H + C
    # channel-major -> r-major permutation keeps the matrix banded
    perm = (np.arange(n)[:, None] + n * np.arange(L)[None, :]).ravel()
    return H[perm][:, perm].tocsc(), perm


def line_hamiltonian(x, h, potential):
    return (-0.5 * _laplacian_line(x.size, h) + sparse.diags(potential)).tocsc()


def delta_well_potential(x, h, p=ModelParams(dim=1)):
    """``-Z/h`` on the cell at x = 0 plus ``E x``."""
    v = p.field * x
    i0 = int(np.argmin(np.abs(x)))
    if abs(x[i0]) > 1e-9 * h:
        raise DomainError("line grid must contain x = 0 for the delta well")
    v = v.copy()
    v[i0] -= p.Z / h
    return v


def lattice_delta_energy(Z, h):
    """Bound-state energy of the single-cell well on the infinite 3-point lattice."""
    return -(math.sqrt(1.0 + (Z * h) ** 2) - 1.0) / (h * h)


def delta_well_ground_state(grid, p=ModelParams(dim=1)):
    """Normalized ground state of the field-free lattice delta well and its energy.

    Checks that the energy is within 0.5% of the continuum value ``-Z^2/2``.
    """
    x = grid.points()
    h = grid.spacing
    H = line_hamiltonian(x, h, delta_well_potential(x, h, ModelParams(Z=p.Z, dim=1)))
    vals, vecs = splinalg.eigsh(H.real, k=1, sigma=lattice_delta_energy(p.Z, h) * 1.01, which="LM")
    e0 = float(vals[0])
    if abs(e0 / (-0.5 * p.Z ** 2) - 1) > 5e-3:
        raise ConfigError(f"lattice delta-well energy {e0:.6g} is not within 0.5% of -Z^2/2; refine the grid")
    psi = vecs[:, 0].astype(complex)
    psi /= math.sqrt(h * float(np.sum(np.abs(psi) ** 2)))
    if psi[np.argmin(np.abs(x))].real < 0:
        psi = -psi
    return psi, e0


def gaussian_packet(x, sigma, x0=0.0, k0=0.0):
    """Normalized Gaussian ``exp(-(x-x0)^2/(4 sigma^2) + i k0 x)`` (variance sigma^2)."""
    g = np.exp(-((x - x0) ** 2) / (4 * sigma * sigma) + 1j * k0 * x)
    return g / (2 * math.pi * sigma * sigma) ** 0.25


# ---------------------------------------------------------------- stepping

def _mask(x, g):
    if g.absorber_width <= 0 or g.absorber_strength <= 0:
        return None
    edge = g.extent - g.absorber_width
    d = np.clip((np.abs(x) - edge) / g.absorber_width, 0.0, 1.0)
    return 1.0 - g.absorber_strength * np.sin(0.5 * math.pi * d) ** 2


def _phase_check(H, psi, dt):
    hpsi = H @ psi
    spread = math.sqrt(max(float(np.vdot(hpsi, hpsi).real) / float(np.vdot(psi, psi).real)
                           - (float(np.vdot(psi, hpsi).real) / float(np.vdot(psi, psi).real)) ** 2, 0.0))
    if dt * spread > PHASE_LIMIT:
        warnings.warn(f"dt * energy spread = {dt * spread:.3g} exceeds {PHASE_LIMIT}; "
                      "Crank-Nicolson phases will be inaccurate", AccuracyWarning, stacklevel=3)


def _run(H, psi, g, x, norm_fn, dipole_fn, shape):
    n = psi.size
    ident = sparse.identity(n, dtype=complex, format="csc")
    A = (ident + 0.5j * g.dt * H).tocsc()
    B = (ident - 0.5j * g.dt * H).tocsr()
    lu = splinalg.splu(A, permc_spec="NATURAL")
    mask = _mask(x, g)
    if mask is not None:
        mask = np.repeat(mask, shape[0]) if shape[0] > 1 else mask
    _phase_check(H, psi, g.dt)
    times = g.dt * np.arange(g.steps + 1)
    norms = np.empty(g.steps + 1)
    dip = np.empty(g.steps + 1, dtype=complex)
    snap_t, snaps = [0.0], [psi.copy()]
    norms[0], dip[0] = norm_fn(psi), dipole_fn(psi)
    for k in range(1, g.steps + 1):
        psi = lu.solve(B @ psi)
        if mask is not None:
            psi *= mask
        norms[k], dip[k] = norm_fn(psi), dipole_fn(psi)
        if (g.snapshot_every and k % g.snapshot_every == 0) or k == g.steps:
            snap_t.append(times[k])
            snaps.append(psi.copy())
    return times, norms, dip, snap_t, snaps


def _boundary_check(last, x, g, norm):
    outer = np.abs(x) >= g.extent - (BOUNDARY_CELLS + 1) * g.spacing
    frac = float(np.sum(np.abs(last[..., outer]) ** 2) * g.spacing) / max(norm, 1e-300)
    if frac > BOUNDARY_LIMIT:
        warnings.warn(f"{frac:.3g} of the norm reached the box edge; reflections contaminate "
                      "the result (enlarge the box or strengthen the absorber)",
                      AccuracyWarning, stacklevel=3)


def propagate_line(psi0, potential, g):
    """Crank-Nicolson evolution on a line.

    ``psi0`` holds samples on ``g.points()``; ``potential`` is an array on
    the same points or a callable of x. Records norm and ``<x>`` every step.
    """
    if g.kind != "line":
        raise ConfigError("propagate_line needs a line grid")
    x = g.points()
    h = g.spacing
    psi = np.asarray(psi0, dtype=complex).copy()
    if psi.shape != x.shape:
        raise DomainError("psi0 does not match the grid")
    v = np.asarray(potential(x) if callable(potential) else potential, dtype=float)
    if v.shape != x.shape:
        raise DomainError("potential does not match the grid")
    H = line_hamiltonian(x, h, v)
    norm_fn = lambda f: h * float(np.sum(np.abs(f) ** 2))
    dipole_fn = lambda f: complex(h * np.sum(x * np.abs(f) ** 2))
    times, norms, dip, snap_t, snaps = _run(H, psi, g, x, norm_fn, dipole_fn, (1,))
    _boundary_check(snaps[-1], x, g, norms[-1])
    return Trajectory(g, x, times, norms, dip, snap_t, [s[None, :] for s in snaps])


def legendre_to_radial(psi0, r):
    """Legendre channels ``f_l(r)`` -> normalized-harmonic ``u_l = sqrt(4pi/(2l+1)) r f_l``."""
    return {ell: math.sqrt(4 * math.pi / (2 * ell + 1)) * r * np.asarray(f, dtype=complex)
            for ell, f in psi0.items()}


def propagate_radial_coupled(psi0, p, g, coulomb=True):
    """Coupled partial waves ``l = 0..l_max`` in the field ``E z``.

    ``psi0`` maps ``l`` to samples of ``f_l(r)`` in ``psi = sum_l f_l(r) P_l(cos theta)``
    on ``g.points()``. ``coulomb=False`` removes the nucleus (free evolution of
    the same initial state).
    """
    if g.kind != "radial":
        raise ConfigError("propagate_radial_coupled needs a radial grid")
    if p.field != 0 and g.l_max < 1:
        raise ConfigError("a nonzero field couples l to l+1; l_max must be >= 1")
    r = g.points()
    n, L = r.size, g.l_max + 1
    u = legendre_to_radial(psi0, r)
    if any(ell > g.l_max for ell in u):
        raise ConfigError("psi0 has channels above l_max")
    chans = np.zeros((L, n), dtype=complex)
    for ell, vals in u.items():
        if vals.shape != r.shape:
            raise DomainError("psi0 channel does not match the grid")
        chans[ell] = vals
    H, perm = radial_hamiltonian(r, g.spacing, g.l_max, p.Z if coulomb else 0.0, p.field)
    h = g.spacing
    coup = np.array([cos_coupling(ell) for ell in range(L - 1)])

    def norm_fn(f):
        return h * float(np.sum(np.abs(f) ** 2))

    def dipole_fn(f):
        c = f.reshape(n, L)
        if L < 2:
            return 0j
        cross = np.sum(np.conj(c[:, :-1]) * c[:, 1:] * r[:, None], axis=0)
        return complex(2 * h * np.sum(coup * cross.real))

    psi = chans.T.ravel()
    times, norms, dip, snap_t, snaps = _run(H, psi, g, r, norm_fn, dipole_fn, (L,))
    snaps = [s.reshape(n, L).T.copy() for s in snaps]
    _boundary_check(snaps[-1], r, g, norms[-1])
    return Trajectory(g, r, times, norms, dip, snap_t, snaps)


def observables(traj):
    """``(norm(t), density snapshots, mu(t))``.

    Density snapshots are ``sum_l |u_l(r)|^2`` (radial, integrates over dr to
    the norm) or ``|psi(x)|^2`` (line).
    """
    if traj.times.size == 0:
        raise DomainError("empty trajectory")
    dens = [np.sum(np.abs(s) ** 2, axis=0) for s in traj.snapshots]
    return traj.norm_series, dens, traj.dipole_series


# ---------------------------------------------------------------- export

def write_csv(traj, path):
    """Columns t, norm, re_mu, im_mu in 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("t[au],norm,re_mu[au],im_mu[au]\n")
        for t, nv, mu in zip(traj.times, traj.norm_series, traj.dipole_series):
            fh.write(f"{t:.17g},{nv:.17g},{mu.real:.17g},{mu.imag:.17g}\n")


def write_snapshots(traj, path):
    """Binary dump: header then per snapshot ``time`` and channels x points complex values.

    Layout (little endian): 8-byte magic ``CUSPSNAP``, uint32 version, uint8
    kind (0 line, 1 radial), uint32 channels, uint32 points, uint32
    snapshots, f64 spacing, f64 dt, f64 first grid coordinate; then for each
    snapshot one f64 time followed by channels*points (re, im) f64 pairs.
    """
    ch, npts = traj.snapshots[0].shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, 0 if traj.grid.kind == "line" else 1,
                              ch, npts, len(traj.snapshots), traj.grid.spacing, traj.grid.dt,
                              float(traj.x[0])))
        for t, s in zip(traj.snapshot_times, traj.snapshots):
            fh.write(struct.pack("<d", t))
            fh.write(np.ascontiguousarray(s, dtype="<c16").tobytes())


def read_snapshots(path):
    """Inverse of :func:`write_snapshots`: ``(header dict, times, array[snap, channel, point])``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, kind, ch, npts, ns, h, dt, x0 = _HEADER.unpack_from(raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise DomainError("not a cusplab snapshot file")
    if version != SNAPSHOT_VERSION:
        raise DomainError(f"unsupported snapshot version {version}")
    off = _HEADER.size
    block = ch * npts * 16
    times, data = [], []
    for _ in range(ns):
        times.append(struct.unpack_from("<d", raw, off)[0])
        off += 8
        data.append(np.frombuffer(raw, dtype="<c16", count=ch * npts, offset=off).reshape(ch, npts))
        off += block
    header = {"version": version, "kind": "line" if kind == 0 else "radial", "channels": ch,
              "points": npts, "snapshots": ns, "spacing": h, "dt": dt, "origin": x0}
    return header, np.array(times), np.array(data)
