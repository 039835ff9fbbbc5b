"""Forward scattering: eigenfunction m0 at x3 = 0 and the scattering data s_c.

m0 solves (d_x2 - d_x1^2 - 2 lambda d_x1)(m0 - 1) = u0 m0, i.e.
(m0 - 1)^ = -(u0 m0)^ / p_lambda with the Green symbol

    p_lambda(xi) = (2 pi i xi1 + lambda)^2 - (2 pi i xi2 + lambda^2).

The symbol vanishes at xi = 0 and at xi(lambda); both lattice cells holding a
root carry the cell average of 1/p linearised about that root.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .coordinates import SpectralParam, zeta_from_xi
from .errors import MaxIterExceeded, NoContraction, RealAxisUndefined
from .lattice import ComplexField2D, Lattice2D, Space, forward_transform, inverse_transform
from .oscillatory import gauss_legendre
from .scattering import ScatteringGrid

log = logging.getLogger(__name__)

SINGULAR_FLOOR = 1e-12


@dataclass(frozen=True)
class InitialData:
    field: ComplexField2D
    epsilon0: float
    regularity: tuple = (0, 0)
    description: str = ""

    @classmethod
    def from_samples(cls, lattice, samples, regularity=(0, 0), description="samples"):
        samples = np.asarray(samples)
        if np.iscomplexobj(samples) and np.max(np.abs(samples.imag)) > 1e-14 * max(1.0, np.max(np.abs(samples))):
            raise ValueError("initial data must be real")
        real = np.real(samples).astype(float)
        fld = ComplexField2D(lattice, real + 0j, Space.PHYSICAL)
        return cls(fld, lattice_norm(lattice, real), regularity, description)

    @classmethod
    def gaussian(cls, lattice, amplitude, width=1.0, center=(0.0, 0.0)):
        x1, x2 = lattice.mesh()
        r2 = (x1 - center[0]) ** 2 + (x2 - center[1]) ** 2
        samples = amplitude * np.exp(-np.pi * r2 / width ** 2)
        return cls.from_samples(lattice, samples, (3, 7), f"gaussian(amplitude={amplitude}, width={width})")

    @classmethod
    def gaussian_dx(cls, lattice, amplitude, width=1.0):
        """Zero-mass datum: amplitude * width * d/dx1 of the unit-peak Gaussian, normalised to peak ~ amplitude."""
        x1, x2 = lattice.mesh()
        g = np.exp(-np.pi * (x1 ** 2 + x2 ** 2) / width ** 2)
        samples = -amplitude * np.sqrt(2 * np.pi * np.e) * x1 / width * g
        return cls.from_samples(lattice, samples, (3, 7), f"gaussian_dx(amplitude={amplitude}, width={width})")

    @classmethod
    def gaussian_dxx(cls, lattice, amplitude, width=1.0):
        """Datum with transform vanishing like xi1^2 at xi1 = 0: -(width^2 / 2 pi) d^2/dx1^2 of the Gaussian, peak = amplitude."""
        x1, x2 = lattice.mesh()
        g = np.exp(-np.pi * (x1 ** 2 + x2 ** 2) / width ** 2)
        samples = amplitude * (1.0 - 2.0 * np.pi * x1 ** 2 / width ** 2) * g
        return cls.from_samples(lattice, samples, (3, 7), f"gaussian_dxx(amplitude={amplitude}, width={width})")

    @classmethod
    def zero(cls, lattice):
        return cls.from_samples(lattice, np.zeros(lattice.shape))

    @property
    def lattice(self):
        return self.field.lattice

    @property
    def samples(self):
        return self.field.samples.real

    def scaled(self, factor):
        return InitialData.from_samples(self.lattice, factor * self.samples, self.regularity, self.description)


def lattice_norm(lattice, samples):
    """max(L^inf, L^1) on the lattice."""
    a = np.abs(samples)
    return float(max(a.max(), a.sum() * lattice.cell_area))


def weighted_norm(u0: InitialData, p: int, q: int) -> float:
    """sum_{|l| <= q} || d^l (1 + |x1| + |x2|)^p u0 ||_{L^inf cap L^1}, spectral derivatives."""
    lat = u0.lattice
    x1, x2 = lat.mesh()
    f = (1.0 + np.abs(x1) + np.abs(x2)) ** p * u0.samples
    if not np.any(f):
        return 0.0
    spec = forward_transform(lat, f)
    spec[lat.nyquist_mask()] = 0.0
    k1, k2 = lat.frequency_mesh()
    total = 0.0
    for order in range(q + 1):
        for l1 in range(order + 1):
            l2 = order - l1
            d = inverse_transform(lat, spec * (2j * np.pi * k1) ** l1 * (2j * np.pi * k2) ** l2).real
            if order == 0:
                d = f
            total += lattice_norm(lat, d)
    return total


# -- Green symbol -----------------------------------------------------------

def p_symbol(lam, xi1, xi2):
    return (2j * np.pi * xi1 + lam) ** 2 - (2j * np.pi * xi2 + lam ** 2)


def green_symbol(lam, xi1, xi2, singular_floor=SINGULAR_FLOOR):
    """Return (1/p_lambda, singular_flag).  Exact zeros give (0, True)."""
    lam = lam.lam if isinstance(lam, SpectralParam) else complex(lam)
    p = p_symbol(lam, np.asarray(xi1, float), np.asarray(xi2, float))
    flag = np.abs(p) < singular_floor
    inv = np.where(flag, 0.0, 1.0 / np.where(flag, 1.0, p))
    return inv[()], flag[()]


def linear_pole_cell_average(alpha, beta, offset, h1, h2, order=16):
    """Mean over a rectangle of 1 / (alpha d1 + beta d2), d measured from a root inside it.

    ``offset`` is the rectangle centre relative to the root.  The radial
    integral from the root to the boundary is exact; the angle is integrated by
    Gauss-Legendre on each of the four boundary triangles.
    """
    x, w = gauss_legendre(order)
    lo1, hi1 = offset[0] - 0.5 * h1, offset[0] + 0.5 * h1
    lo2, hi2 = offset[1] - 0.5 * h2, offset[1] + 0.5 * h2
    corners = [(hi1, lo2), (hi1, hi2), (lo1, hi2), (lo1, lo2)]
    total = 0.0 + 0.0j
    for k in range(4):
        p0 = np.array(corners[k])
        p1 = np.array(corners[(k + 1) % 4])
        th0 = np.arctan2(p0[1], p0[0])
        th1 = np.arctan2(p1[1], p1[0])
        if th1 < th0:
            th1 += 2 * np.pi
        th = 0.5 * (th0 + th1) + 0.5 * (th1 - th0) * x
        # distance to the edge line along direction th
        normal = np.array([p1[1] - p0[1], -(p1[0] - p0[0])])
        normal /= np.linalg.norm(normal)
        dist = abs(normal @ p0)
        if dist < 1e-15 * (h1 + h2):
            continue  # root on this edge: the triangle is degenerate
        cosang = np.abs(np.cos(th) * normal[0] + np.sin(th) * normal[1])
        radius = dist / cosang
        total += 0.5 * (th1 - th0) * np.sum(w * radius / (alpha * np.cos(th) + beta * np.sin(th)))
    return total / (h1 * h2)


def green_multiplier(lattice: Lattice2D, lam: complex):
    """-1/p_lambda on the mode lattice with root cells replaced by cell averages."""
    k1, k2 = lattice.frequency_mesh()
    f1, f2 = lattice.frequency_axes()
    d1 = 1.0 / lattice.length_1
    d2 = 1.0 / lattice.length_2
    p = p_symbol(lam, k1, k2)
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = -1.0 / p
    i0 = lattice.count_1 // 2
    j0 = lattice.count_2 // 2
    mult[i0, j0] = 0.0  # origin root at the cell centre: odd integrand, zero average
    xs1, xs2 = -lam.imag / np.pi, -2.0 * lam.real * lam.imag / np.pi
    i = int(np.rint(xs1 / d1)) + i0
    j = int(np.rint(xs2 / d2)) + j0
    if 0 < i < lattice.count_1 and 0 < j < lattice.count_2 and (i, j) != (i0, j0):
        alpha = -8.0 * np.pi ** 2 * xs1 + 4j * np.pi * lam  # dp/dxi1 at the root
        beta = -2j * np.pi
        offset = (f1[i] - xs1, f2[j] - xs2)
        mult[i, j] = -linear_pole_cell_average(alpha, beta, offset, d1, d2)
    mult[lattice.nyquist_mask()] = 0.0
    return mult


def apply_green(lam, phi: ComplexField2D) -> ComplexField2D:
    lam = lam.lam if isinstance(lam, SpectralParam) else complex(lam)
    if phi.space is not Space.PHYSICAL:
        raise ValueError("apply_green expects a physical-space field")
    lat = phi.lattice
    out = inverse_transform(lat, green_multiplier(lat, lam) * forward_transform(lat, phi.samples))
    return ComplexField2D(lat, out, Space.PHYSICAL)


# -- eigenfunction ----------------------------------------------------------

@dataclass
class SolveInfo:
    iterations: int
    ratio: float
    residual: float
    history: list = field(default_factory=list)


def solve_m0_batch(u0: InitialData, lams, tol=1e-10, max_iter=60):
    """Picard iteration m <- 1 + G_lambda(u0 m) for a batch of spectral parameters.

    Returns (m, info) with m of shape (B, N1, N2) and one SolveInfo per lambda.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if np.any(lams.imag == 0):
        raise RealAxisUndefined("lambda on the real axis")
    lat = u0.lattice
    u = u0.samples
    mults = np.stack([green_multiplier(lat, lam) for lam in lams])
    m = np.ones((len(lams),) + lat.shape, dtype=complex)
    if not np.any(u):
        return m, [SolveInfo(0, 0.0, 0.0) for _ in lams]
    hist = []
    strikes = np.zeros(len(lams), dtype=int)
    prev = None
    for it in range(1, max_iter + 1):
        new = 1.0 + inverse_transform(lat, mults * forward_transform(lat, u[None] * m))
        res = np.max(np.abs(new - m), axis=(1, 2))
        hist.append(res)
        m = new
        if prev is not None:
            ratio = res / np.maximum(prev, 1e-300)
            strikes = np.where((ratio >= 1.0) & (res > tol), strikes + 1, 0)
            if np.any(strikes >= 2):
                raise NoContraction(float(ratio[strikes >= 2].max()))
        prev = res
        if np.all(res < tol):
            break
    else:
        raise MaxIterExceeded(max_iter, float(res.max()))
    hist = np.array(hist)
    infos = []
    for b in range(len(lams)):
        h = hist[:, b]
        good = h[h > 1e-14]
        ratio = float(np.max(good[1:] / good[:-1])) if len(good) > 1 else 0.0
        infos.append(SolveInfo(it, ratio, float(h[-1]), list(h)))
    return m, infos


def solve_m0(u0: InitialData, lam, tol=1e-10, max_iter=60) -> ComplexField2D:
    lam = lam.lam if isinstance(lam, SpectralParam) else complex(lam)
    m, info = solve_m0_batch(u0, [lam], tol, max_iter)
    out = ComplexField2D(u0.lattice, m[0], Space.PHYSICAL, {"info": info[0], "lambda": lam})
    return out


def nonuniform_transform(lattice: Lattice2D, samples, xi1, xi2):
    """Direct sum h1 h2 sum_j f(x_j) exp(-2 pi i x_j . xi) at arbitrary frequencies.

    ``samples`` may carry a leading batch axis matched with ``xi1``/``xi2``.
    """
    a1, a2 = lattice.axes()
    xi1 = np.atleast_1d(np.asarray(xi1, float))
    xi2 = np.atleast_1d(np.asarray(xi2, float))
    e1 = np.exp(-2j * np.pi * xi1[:, None] * a1[None, :])
    e2 = np.exp(-2j * np.pi * xi2[:, None] * a2[None, :])
    samples = np.asarray(samples)
    if samples.ndim == 2:
        return lattice.cell_area * np.einsum("bi,ij,bj->b", e1, samples, e2)
    return lattice.cell_area * np.einsum("bi,bij,bj->b", e1, samples, e2)


def scattering_value(u0: InitialData, m0: ComplexField2D, lam) -> complex:
    lam = lam.lam if isinstance(lam, SpectralParam) else complex(lam)
    if lam.imag == 0:
        raise RealAxisUndefined("s_c is undefined on the real axis")
    xi1, xi2 = -lam.imag / np.pi, -2.0 * lam.real * lam.imag / np.pi
    w = nonuniform_transform(u0.lattice, u0.samples * m0.samples, xi1, xi2)[0]
    return complex(np.sign(lam.imag) * w / (2j * np.pi))


def born_grid(u0: InitialData, xi_lattice: Lattice2D) -> ScatteringGrid:
    """Scattering data with m0 = 1: s_c = sgn(lambda_I) u0^(xi) / (2 pi i)."""
    xi1, xi2 = xi_lattice.mesh()
    w = nonuniform_transform(u0.lattice, u0.samples, xi1.ravel(), np.zeros(1) + xi2.ravel())
    w = w.reshape(xi_lattice.shape)
    return ScatteringGrid(xi_lattice, w, meta={"born": True}, smooth_part=w)


def build_scattering_grid(u0: InitialData, xi_lattice: Lattice2D, tol=1e-10, max_iter=60, batch=64,
                          interpolation="rbf") -> ScatteringGrid:
    xi1, xi2 = xi_lattice.mesh()
    if np.any(xi1 == 0):
        raise ValueError("the xi-lattice must exclude the xi1 = 0 row")
    f1, f2 = xi1.ravel(), xi2.ravel()
    lams = zeta_from_xi(f1, f2)
    w = np.zeros(len(lams), dtype=complex)
    worst_ratio = 0.0
    iters = 0
    for start in range(0, len(lams), batch):
        sl = slice(start, start + batch)
        m, infos = solve_m0_batch(u0, lams[sl], tol, max_iter)
        w[sl] = nonuniform_transform(u0.lattice, u0.samples[None] * m, f1[sl], f2[sl])
        worst_ratio = max([worst_ratio] + [i.ratio for i in infos])
        iters = max([iters] + [i.iterations for i in infos])
    born = nonuniform_transform(u0.lattice, u0.samples, f1, f2).reshape(xi_lattice.shape)
    grid = ScatteringGrid(xi_lattice, w.reshape(xi_lattice.shape), interpolation=interpolation, smooth_part=born)
    s = grid.scattering_samples()
    norm = weighted_norm(u0, 0, 2)
    grid.meta.update(
        reality_violation=grid.reality_violation(),
        sup_norm=float(np.max(np.abs(s))),
        sup_norm_constant=float(np.max(np.abs(s)) / norm) if norm > 0 else 0.0,
        contraction_ratio=worst_ratio,
        max_iterations=iters,
        epsilon0=u0.epsilon0,
    )
    log.info("scattering grid: reality violation %.3g, sup|s_c| %.3g", grid.meta["reality_violation"], grid.meta["sup_norm"])
    return grid
