"""Residue representation of C T 1 in physical space.

After the xi2 integral is replaced by its residue, C T 1 at
``x = (t1 t, t2 t, -t)`` and ``lambda = lambda' + t2 / 3`` reads

    e^{i pi t S0(a; lambda')} iint dx' [u0 mm0](x1' - 2 t2 x2' / 3, x2') e^{i lI (x1' + 2 lR x2')}
        * int d xi'' e^{2 pi i t (4 pi^2 xi''^3 + c xi'')} F(xi''),

    c = a - 3 lR^2 - (x1' + 2 lR x2') / t,      X = x2' + 3 t lR,     b = lI / (2 pi),
    F = -pi sgn(X) theta(-X (xi''^2 - b^2)) exp(4 pi^2 X (xi''^2 - b^2)),

and the integral carries F / pi.  That normalisation is the one the residue
step produces (check: as t -> 0 the chirp disappears, the residue evaluation of
the xi2 integral becomes exact, and the formula with F / pi reproduces C T 1).
For t > 0 the residue step drops the part of the xi2 integral that is not a
residue (the chirp exp(-i B xi2^2) does not decay in either half-plane), so the
formula is an approximation whose defect ``ct1_crosscheck`` measures.

where ``mm0 - 1`` is the inverse transform of the diagonal samples
``M(xi) = (m0(.; conj zeta(xi)) - 1)^(xi)``.

The xi'' integral is over ``|xi''| < |b|`` when X > 0 and over the two tails
when X < 0.  The tails are taken along the real axis up to a point past which
the phase derivative is positive, then along the rays of steepest decay of
the cubic (directions e^{+-i pi / 6}).  The x2' integral is split at X = 0,
where F changes sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import chirp_quadrature
from .asymptotics import cone_frame
from .coordinates import phase_S0, zeta_from_xi
from .errors import InnerIntegralNonConvergent
from .forward import InitialData, lattice_norm, nonuniform_transform, solve_m0_batch
from .lattice import ComplexField2D, Lattice2D, Space
from .oscillatory import gauss_legendre
from .scattering import ScatteringGrid


@dataclass
class KernelField:
    mfrak0: ComplexField2D
    meta: dict = field(default_factory=dict)

    @property
    def deviation(self):
        """sup |mm0 - 1|."""
        return float(np.max(np.abs(self.mfrak0.samples - 1.0)))


def build_mfrak0(u0: InitialData, xi_lattice: Lattice2D | None = None, tol=1e-10, batch=64) -> KernelField:
    """mm0 on the physical lattice from the diagonal transform of m0 at conj zeta(xi)."""
    lat = u0.lattice
    if xi_lattice is None:
        # cell-centred copy of the mode lattice: same range, no xi1 = 0 row
        xi_lattice = Lattice2D(lat.count_1 / lat.length_1, lat.count_2 / lat.length_2, lat.count_1, lat.count_2)
    if not np.any(u0.samples):
        return KernelField(ComplexField2D(lat, np.ones(lat.shape, complex), Space.PHYSICAL), {"xi_lattice": xi_lattice})
    f1, f2 = (v.ravel() for v in xi_lattice.mesh())
    lams = np.conj(zeta_from_xi(f1, f2))
    M = np.zeros(len(lams), dtype=complex)
    worst = 0.0
    for start in range(0, len(lams), batch):
        sl = slice(start, start + batch)
        m, infos = solve_m0_batch(u0, lams[sl], tol)
        M[sl] = nonuniform_transform(lat, m - 1.0, f1[sl], f2[sl])
        worst = max([worst] + [i.residual for i in infos])
    M = M.reshape(xi_lattice.shape)
    a1, a2 = lat.axes()
    b1, b2 = xi_lattice.axes()
    e1 = np.exp(2j * np.pi * np.outer(a1, b1))
    e2 = np.exp(2j * np.pi * np.outer(b2, a2))
    dev = xi_lattice.cell_area * (e1 @ M @ e2)
    field_ = ComplexField2D(lat, 1.0 + dev, Space.PHYSICAL)
    return KernelField(field_, {"xi_lattice": xi_lattice, "worst_residual": worst,
                                "deviation": float(np.max(np.abs(dev))), "epsilon0": u0.epsilon0})


def unit_kernel(u0: InitialData) -> KernelField:
    """mm0 = 1: the Born-order kernel."""
    lat = u0.lattice
    return KernelField(ComplexField2D(lat, np.ones(lat.shape, complex), Space.PHYSICAL), {"born": True})


def amplitude_F(t, lambda_prime, x2p, xi1pp):
    lam = complex(lambda_prime)
    X = np.asarray(x2p, dtype=float) + 3.0 * t * lam.real
    b = lam.imag / (2 * np.pi)
    q = np.asarray(xi1pp, dtype=float) ** 2 - b ** 2
    arg = -X * q
    with np.errstate(over="ignore"):
        val = -np.pi * np.sign(X) * np.where(arg > 0, np.exp(np.minimum(4 * np.pi ** 2 * X * q, 0.0)), 0.0)
    return val[()] if np.ndim(val) == 0 else val


# -- trigonometric interpolation of lattice data -----------------------------

def _trig_rows(lattice, samples, y2):
    """Coefficients in x1 (k1 modes) of the field evaluated at x2 = y2: shape (N1, len(y2))."""
    a1, a2 = lattice.axes()
    N1, N2 = lattice.shape
    k1 = np.arange(-N1 // 2, N1 // 2)
    k2 = np.arange(-N2 // 2, N2 // 2)
    F1 = np.exp(-2j * np.pi * np.outer(k1, a1) / lattice.length_1) / N1
    F2 = np.exp(-2j * np.pi * np.outer(a2, k2) / lattice.length_2) / N2
    C = F1 @ samples @ F2  # (k1, k2)
    C[0, :] = 0.0
    C[:, 0] = 0.0
    E2 = np.exp(2j * np.pi * np.outer(k2, y2) / lattice.length_2)
    return k1, C @ E2


def _shifted_values(lattice, samples, y2, shift):
    """f(x1_lattice - shift_n, y2_n) for every lattice x1 and node n."""
    a1, _ = lattice.axes()
    k1, rows = _trig_rows(lattice, samples, y2)
    ph = np.exp(2j * np.pi * k1[:, None, None] * (a1[None, :, None] - shift[None, None, :]) / lattice.length_1)
    return np.einsum("kn,kin->in", rows, ph)


# -- the xi'' integral -------------------------------------------------------

def inner_integral(t, c, X, b, order=48):
    """int e^{2 pi i t (4 pi^2 s^3 + c s)} theta(-X (s^2 - b^2)) e^{4 pi^2 X (s^2 - b^2)} ds.

    ``c`` and ``X`` are arrays of the same shape; the sign factor -pi sgn(X) is
    not included.
    """
    c = np.asarray(c, dtype=float)
    X = np.broadcast_to(np.asarray(X, dtype=float), c.shape)
    out = np.zeros(c.shape, dtype=complex)
    b = abs(b)
    gx, gw = gauss_legendre(order)
    k3 = 8 * np.pi ** 3 * t

    def integrand(s, cc, XX, direction):
        return np.exp(direction * 2j * np.pi * t * (4 * np.pi ** 2 * s ** 3 + cc * s) + 4 * np.pi ** 2 * XX * (s * s - b * b))

    pos = X > 0
    if np.any(pos):
        cc = c[pos][:, None]
        rate = 2 * np.pi * t * (12 * np.pi ** 2 * b ** 2 + np.abs(cc).max())
        panels = max(1, int(np.ceil(rate * 2 * b / 6.0)))
        edges = np.linspace(-b, b, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1] - edges[0])
        s = (mid[:, None] + half * gx[None, :]).ravel()
        w = np.tile(half * gw, panels)
        out[pos] = np.sum(w[None, :] * integrand(s[None, :], cc, X[pos][:, None], 1), axis=1)
    neg = ~pos
    if np.any(neg):
        cc = c[neg][:, None]
        XX = X[neg][:, None]
        turn = np.sqrt(np.maximum(-cc, 0.0) / (12 * np.pi ** 2))
        start = np.maximum(b, turn + 0.05)
        # real segment [b, start] with panels sized by its phase range
        seg_phase = 2 * np.pi * t * (4 * np.pi ** 2 * (start ** 3 - b ** 3) + np.abs(cc) * (start - b))
        panels = max(1, int(np.ceil(seg_phase.max() / 6.0)))
        u = (np.arange(panels)[:, None] + 0.5 * (gx[None, :] + 1)).ravel() / panels
        wu = np.tile(gw / (2 * panels), panels)
        s = b + (start - b) * u[None, :]
        ws = (start - b) * wu[None, :]
        # ray: s = start + rho e^{i pi / 6}; |integrand| <= exp(-k3 rho^3 / 2 ...)
        # decay along the ray: cubic k3 rho^3 / ... plus the (non-negative) linear slope
        slope = np.pi * t * (12 * np.pi ** 2 * start ** 2 + cc)
        R = np.minimum((60.0 / k3) ** (1.0 / 3.0), 40.0 / np.maximum(slope, 1e-300))
        ray_panels = 4
        unit = (np.arange(ray_panels)[:, None] + 0.5 * (gx[None, :] + 1)).ravel() / ray_panels
        rho = R * unit[None, :]
        wr = R * np.tile(gw / (2 * ray_panels), ray_panels)[None, :]
        total = 0j
        for direction in (1, -1):
            e = np.exp(direction * 1j * np.pi / 6)
            seg = np.sum(ws * integrand(s, cc, XX, direction), axis=1)
            z = start + rho * e
            ray = np.sum(wr * e * integrand(z, cc, XX, direction), axis=1)
            total = total + seg + ray
        out[neg] = total
    return out


def _x2_rule(lattice, split, order=32, panels=4):
    lo, hi = -0.5 * lattice.length_2, 0.5 * lattice.length_2
    cuts = [lo, hi]
    if lo < split < hi:
        cuts = [lo, split, hi]
    gx, gw = gauss_legendre(order)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        edges = np.linspace(a, b, panels + 1)
        for p, q in zip(edges[:-1], edges[1:]):
            nodes.append(0.5 * (p + q) + 0.5 * (q - p) * gx)
            weights.append(0.5 * (q - p) * gw)
    return np.concatenate(nodes), np.concatenate(weights)


def ct1_representation(u0: InitialData, kernel: KernelField, x, lambda_prime, dx1_variant=False,
                       x2_order=32, x2_panels=4, inner_order=48):
    frame = cone_frame(x)
    lam = complex(lambda_prime)
    if lam.imag == 0:
        from .errors import RealAxisUndefined

        raise RealAxisUndefined("lambda' must be off the real axis")
    lat = u0.lattice
    f = u0.samples * kernel.mfrak0.samples
    if not np.any(f):
        return 0j
    if dx1_variant:
        k1 = np.fft.fftfreq(lat.count_1, lat.spacing[0])[:, None]
        f = np.fft.ifft(2j * np.pi * k1 * np.fft.fft(f, axis=0), axis=0)
    t = frame.t
    a1, _ = lat.axes()
    y2, w2 = _x2_rule(lat, -3 * t * lam.real, x2_order, x2_panels)
    vals = _shifted_values(lat, f, y2, (2 * frame.t2 / 3) * y2)  # (N1, n)
    X1, Y2 = np.meshgrid(a1, y2, indexing="ij")
    c = frame.a - 3 * lam.real ** 2 - (X1 + 2 * lam.real * Y2) / t
    X = Y2 + 3 * t * lam.real
    G = inner_integral(t, c, X, lam.imag / (2 * np.pi), inner_order)
    G = -np.sign(X) * G  # F / pi
    osc = np.exp(1j * lam.imag * (X1 + 2 * lam.real * Y2))
    total = lat.spacing[0] * np.sum(w2[None, :] * vals * osc * G)
    if not np.isfinite(total):
        raise InnerIntegralNonConvergent("non-finite representation integral")
    return complex(np.exp(1j * np.pi * t * phase_S0(frame.a, lam)) * total)


def ct1_direct(S: ScatteringGrid, x, lambda_prime, dx1_variant=False):
    """C T 1 at the same point by the spectral integral with an exact inner xi2 integral."""
    frame = cone_frame(x)
    return chirp_quadrature.cauchy_t1(S, x, complex(lambda_prime) + frame.t2 / 3.0, derivative=dx1_variant, refine=2)


def ct1_crosscheck(S: ScatteringGrid, u0: InitialData, x, lambda_prime, kernel: KernelField | None = None,
                   dx1_variant=False):
    """|rep - direct| / max(|direct|, 1e-3 eps0) and both values."""
    kernel = kernel or build_mfrak0(u0)
    rep = ct1_representation(u0, kernel, x, lambda_prime, dx1_variant)
    direct = ct1_direct(S, x, lambda_prime, dx1_variant)
    floor = 1e-3 * u0.epsilon0
    if rep == 0 and direct == 0:
        return 0.0, rep, direct
    return abs(rep - direct) / max(abs(direct), floor), rep, direct
