"""Inverse side on the spectral lattice: the operators T and C, the Neumann
solve of m = 1 + C T m, and reconstruction of u.

In xi-coordinates (area element conj(d zeta) ^ d zeta = i pi / |xi1| d xi):

    C phi(lambda) = -1/2 iint phi(zeta(xi)) / ((zeta(xi) - lambda) |xi1|) d xi,
    T phi(xi)     = s_c(xi) E(x, xi) phi(-xi),
    u(x)          = iint w E m(-xi) d xi + iint w E d_x1 m(-xi) / (2 pi i xi1) d xi,

with ``E = exp(2 pi i (xi1 x1 + xi2 x2) + (conj(l)^3 - l^3) x3)``.  The first
integral split off with ``m = 1`` is u1; the remaining two are u20 and u21.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coordinates import jacobian_zeta, xi_from_zeta, zeta_from_xi
from .errors import MaxIterExceeded, NoContraction, StepTooLarge
from .forward import linear_pole_cell_average
from .scattering import ScatteringGrid


def t_exponent(lam, x):
    """(conj(l) - l) x1 + (conj(l)^2 - l^2) x2 + (conj(l)^3 - l^3) x3 (purely imaginary)."""
    lam = np.asarray(lam, dtype=complex)
    lb = np.conj(lam)
    return (lb - lam) * x[0] + (lb ** 2 - lam ** 2) * x[1] + (lb ** 3 - lam ** 3) * x[2]


def plane_wave(grid: ScatteringGrid, x):
    """E(x, xi) on the lattice, built from xi to keep |E| = 1 to rounding."""
    xi1, xi2 = grid.xi_lattice.mesh()
    t = -x[2]
    phase = xi1 * x[0] + xi2 * x[1] + t * (np.pi ** 2 * xi1 ** 3 - 0.75 * xi2 ** 2 / xi1)
    return np.exp(2j * np.pi * phase)


def apply_T(S: ScatteringGrid, phi, x, conj_flip=True):
    phi = np.asarray(phi, dtype=complex)
    reflected = phi[::-1, ::-1] if conj_flip else phi
    return S.scattering_samples() * plane_wave(S, x) * reflected


def _self_cell(lattice, xi1c, xi2c, lam):
    """int over the cell at (xi1c, xi2c) of 1/((zeta(xi) - lam)|xi1|) d xi, zeta linearised."""
    h1, h2 = lattice.spacing
    j1, j2 = jacobian_zeta(xi1c, xi2c)
    z0 = zeta_from_xi(xi1c, xi2c)
    # root of z0 + j1 d1 + j2 d2 = lam in real (d1, d2)
    mat = np.array([[j1.real, j2.real], [j1.imag, j2.imag]])
    rhs = np.array([(lam - z0).real, (lam - z0).imag])
    d = np.linalg.solve(mat, rhs)
    if abs(d[0]) > 0.5 * h1 or abs(d[1]) > 0.5 * h2:
        return h1 * h2 / ((z0 - lam) * abs(xi1c))
    avg = linear_pole_cell_average(complex(j1), complex(j2), (-d[0], -d[1]), h1, h2)
    return h1 * h2 * avg / abs(xi1c)


def apply_C(phi, lambda_eval, lattice):
    """-(1/pi) iint phi / (zeta - lambda) dA by lattice quadrature with a singular-cell correction."""
    phi = np.asarray(phi, dtype=complex)
    xi1, xi2 = lattice.mesh()
    zeta = zeta_from_xi(xi1, xi2)
    lam = complex(lambda_eval)
    h1, h2 = lattice.spacing
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = h1 * h2 / ((zeta - lam) * np.abs(xi1))
    if lam.imag != 0:
        lx1, lx2 = xi_from_zeta(lam)
        a1, a2 = lattice.axes()
        i = int(np.floor((lx1 - a1[0]) / h1 + 0.5))
        j = int(np.floor((lx2 - a2[0]) / h2 + 0.5))
        if 0 <= i < lattice.count_1 and 0 <= j < lattice.count_2:
            kern[i, j] = _self_cell(lattice, a1[i], a2[j], lam)
    kern = np.where(np.isfinite(kern), kern, 0.0)
    return complex(-0.5 * np.sum(kern * phi))


def cauchy_matrix(lattice):
    """K with (C phi)(zeta_i) = sum_j K_ij phi_j at every lattice point.

    The self cell has its pole at the centre; the linearised average vanishes.
    """
    xi1, xi2 = lattice.mesh()
    zeta = zeta_from_xi(xi1, xi2).ravel()
    w = lattice.cell_area / np.abs(xi1).ravel()
    diff = zeta[None, :] - zeta[:, None]
    np.fill_diagonal(diff, 1.0)
    K = -0.5 * w[None, :] / diff
    np.fill_diagonal(K, 0.0)
    return K


@dataclass
class EigenfunctionBatch:
    positions: np.ndarray  # (P, 3)
    values: np.ndarray  # (P, N1, N2): m(x, zeta(xi))
    order: int
    residual: float
    terms: list = field(default_factory=list)
    resolved: bool = True


_CAUCHY_CACHE = {}


def _cached_cauchy(lattice):
    key = (lattice.length_1, lattice.length_2, lattice.count_1, lattice.count_2)
    if key not in _CAUCHY_CACHE:
        _CAUCHY_CACHE.clear()
        _CAUCHY_CACHE[key] = cauchy_matrix(lattice)
    return _CAUCHY_CACHE[key]


def phase_resolution(S: ScatteringGrid, x, rel=1e-8):
    """Largest phase increment of E per lattice cell where s_c is non-negligible."""
    xi1, xi2 = S.xi_lattice.mesh()
    h1, h2 = S.xi_lattice.spacing
    t = -x[2]
    g1 = 2 * np.pi * np.abs(x[0] + t * (3 * np.pi ** 2 * xi1 ** 2 + 0.75 * xi2 ** 2 / xi1 ** 2))
    g2 = 2 * np.pi * np.abs(x[1] - 1.5 * t * xi2 / xi1)
    mag = np.abs(S.transform)
    sel = mag > rel * max(mag.max(), 1e-300)
    if not np.any(sel):
        return 0.0
    return float(np.max(g1[sel] * h1 + g2[sel] * h2))


def _t_weights(S, positions):
    s = S.scattering_samples().ravel()
    return np.stack([s * plane_wave(S, x).ravel() for x in positions])


def neumann_m(S: ScatteringGrid, x, tol=1e-10, n_max=60):
    """m(x, zeta(xi)) on the whole lattice; ``x`` may be one position or a (P, 3) array."""
    positions = np.atleast_2d(np.asarray(x, dtype=float))
    shape = S.xi_lattice.shape
    n = shape[0] * shape[1]
    P = len(positions)
    if S.is_zero():
        return EigenfunctionBatch(positions, np.ones((P,) + shape, complex), 0, 0.0)
    K = _cached_cauchy(S.xi_lattice)
    TW = _t_weights(S, positions)  # (P, n)
    flip = np.arange(n).reshape(shape)[::-1, ::-1].ravel()
    m = np.ones((P, n), dtype=complex)
    terms = []
    prev = None
    strikes = 0
    for order in range(1, n_max + 1):
        new = 1.0 + (TW * m[:, flip]) @ K.T
        res = float(np.max(np.abs(new - m)))
        terms.append(res)
        m = new
        if prev is not None and res >= prev and res > tol:
            strikes += 1
            if strikes >= 2:
                raise NoContraction(res / prev)
        else:
            strikes = 0
        prev = res
        if res < tol:
            break
    else:
        raise MaxIterExceeded(n_max, res)
    resolved = all(phase_resolution(S, p) < 0.5 * np.pi for p in positions)
    return EigenfunctionBatch(positions, m.reshape((P,) + shape), order, res, terms, resolved)


def _dx1_solve(S, batch: EigenfunctionBatch, tol=1e-10, n_max=60):
    """Exact x1-derivative of the lattice fixed point: n = C T n + C[(2 pi i xi1) T m]."""
    shape = S.xi_lattice.shape
    n = shape[0] * shape[1]
    K = _cached_cauchy(S.xi_lattice)
    TW = _t_weights(S, batch.positions)
    flip = np.arange(n).reshape(shape)[::-1, ::-1].ravel()
    xi1 = S.xi_lattice.mesh()[0].ravel()
    m = batch.values.reshape(len(batch.positions), n)
    source = (2j * np.pi * xi1 * TW * m[:, flip]) @ K.T
    d = source.copy()
    for _ in range(n_max):
        new = source + (TW * d[:, flip]) @ K.T
        res = float(np.max(np.abs(new - d)))
        d = new
        if res < tol:
            break
    return d.reshape(batch.values.shape)


def dx1_m(S: ScatteringGrid, x, tol=1e-6, h0=1e-2, solve_tol=1e-13):
    """Central difference in x1 with a Richardson check at h0/2.

    Returns (derivative, extrapolation_error); the derivative is the
    Richardson-extrapolated value.
    """
    x = np.asarray(x, dtype=float)
    shifts = np.array([[h0, 0, 0], [-h0, 0, 0], [h0 / 2, 0, 0], [-h0 / 2, 0, 0]])
    vals = neumann_m(S, x[None, :] + shifts, tol=solve_tol).values
    d_h = (vals[0] - vals[1]) / (2 * h0)
    d_h2 = (vals[2] - vals[3]) / h0
    rich = (4 * d_h2 - d_h) / 3
    err = float(np.max(np.abs(rich - d_h2)))
    scale = max(1.0, float(np.max(np.abs(rich))))
    if err > 10 * tol * scale:
        raise StepTooLarge(f"Richardson disagreement {err:.3g} exceeds {10 * tol * scale:.3g}")
    return rich, err


@dataclass
class ReconstructionValue:
    u1: complex
    u20: complex
    u21: complex
    meta: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.u1 + self.u20 + self.u21

    @property
    def imaginary_residue(self):
        return abs(self.total.imag)


def reconstruct_lattice(S: ScatteringGrid, positions, tol=1e-10, n_max=60):
    """Reconstruction by lattice quadrature; valid while E is resolved by the lattice."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    P = len(positions)
    if S.is_zero():
        return [ReconstructionValue(0j, 0j, 0j) for _ in range(P)]
    batch = neumann_m(S, positions, tol, n_max)
    dm = _dx1_solve(S, batch, tol, n_max)
    xi1 = S.xi_lattice.mesh()[0]
    h = S.xi_lattice.cell_area
    out = []
    for p in range(P):
        wE = S.transform * plane_wave(S, positions[p]) * h
        mr = batch.values[p][::-1, ::-1]
        dr = dm[p][::-1, ::-1]
        out.append(ReconstructionValue(
            complex(np.sum(wE)), complex(np.sum(wE * (mr - 1.0))), complex(np.sum(wE * dr / (2j * np.pi * xi1))),
            {"order": batch.order, "residual": batch.residual, "resolved": batch.resolved,
             "method": "lattice"}))
    return out
