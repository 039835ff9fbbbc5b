"""Sampled scattering data and its off-lattice evaluation.

The grid stores the diagonal transform ``w(xi) = (u0 m0(.; zeta(xi)))^(xi)``
on a cell-centred xi-lattice (which never contains xi1 = 0).  Scattering data
follow as ``s_c(zeta(xi)) = sgn(lambda_I) w / (2 pi i) = -sgn(xi1) w / (2 pi i)``.

Two interpolants are offered, both confined to one half-plane at a time:

* ``bilinear`` -- piecewise bilinear in (xi1, xi2);
* ``rbf`` (default) -- Gaussian radial functions in xi2 centred on the lattice
  rows, with coefficients varying as cubic splines in xi1.  This form is smooth
  and makes every xi2 integral against a chirp or a simple pole closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_toeplitz

from .coordinates import xi_from_zeta
from .lattice import Lattice2D


@dataclass
class ScatteringGrid:
    xi_lattice: Lattice2D
    transform: np.ndarray  # w on the full lattice, shape (N1, N2)
    interpolation: str = "rbf"
    meta: dict = field(default_factory=dict)
    smooth_part: np.ndarray | None = None  # optional Born transform, continuous across xi1 = 0

    def __post_init__(self):
        self.transform = np.asarray(self.transform, dtype=complex)
        if self.transform.shape != self.xi_lattice.shape:
            raise ValueError("transform shape does not match the xi-lattice")
        if self.smooth_part is not None:
            self.smooth_part = np.asarray(self.smooth_part, dtype=complex)
            if self.smooth_part.shape != self.transform.shape:
                raise ValueError("smooth part shape does not match the xi-lattice")
        self._rbf = None

    # -- storage views ----------------------------------------------------
    @property
    def half(self):
        return self.xi_lattice.count_1 // 2

    @property
    def samples_minus(self):
        """w on the xi1 < 0 half (lambda_I > 0), xi1 ascending."""
        return self.transform[: self.half]

    @property
    def samples_plus(self):
        """w on the xi1 > 0 half (lambda_I < 0), xi1 ascending."""
        return self.transform[self.half:]

    @classmethod
    def from_halves(cls, xi_lattice, minus, plus, **kw):
        return cls(xi_lattice, np.concatenate([minus, plus], axis=0), **kw)

    def scattering_samples(self):
        """s_c at every lattice point."""
        xi1, _ = self.xi_lattice.mesh()
        return -np.sign(xi1) * self.transform / (2j * np.pi)

    def reality_violation(self):
        """max |s_c(lambda) - conj s_c(conj lambda)|; conjugation is xi -> -xi."""
        s = self.scattering_samples()
        return float(np.max(np.abs(s - np.conj(s[::-1, ::-1]))))

    def is_zero(self):
        return not np.any(self.transform)

    # -- interpolation ----------------------------------------------------
    def evaluate_w(self, xi1, xi2, method=None):
        method = method or self.interpolation
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        if method == "bilinear":
            return self._bilinear(xi1, xi2)
        if method == "rbf":
            return self._rbf_eval(xi1, xi2)
        raise ValueError(f"unknown interpolation {method!r}")

    def evaluate(self, zeta, method=None):
        """s_c at arbitrary off-axis zeta."""
        zeta = np.asarray(zeta, dtype=complex)
        xi1, xi2 = xi_from_zeta(zeta)
        w = self.evaluate_w(xi1, xi2, method)
        return (np.sign(zeta.imag) * w / (2j * np.pi))[()]

    def _bilinear(self, xi1, xi2):
        a1, a2 = self.xi_lattice.axes()
        h1, h2 = self.xi_lattice.spacing
        out = np.zeros(np.broadcast(xi1, xi2).shape, dtype=complex)
        xi1, xi2 = np.broadcast_arrays(xi1, xi2)
        inside = (np.abs(xi1) < 0.5 * self.xi_lattice.length_1) & (np.abs(xi2) < 0.5 * self.xi_lattice.length_2)
        for sign, cols in ((-1, slice(0, self.half)), (1, slice(self.half, None))):
            sel = inside & (np.sign(xi1) == sign)
            if not np.any(sel):
                continue
            c1 = a1[cols]
            data = self.transform[cols]
            f1 = np.clip((xi1[sel] - c1[0]) / h1, 0.0, len(c1) - 1.0)
            f2 = np.clip((xi2[sel] - a2[0]) / h2, 0.0, len(a2) - 1.0)
            i1 = np.minimum(f1.astype(int), len(c1) - 2)
            i2 = np.minimum(f2.astype(int), len(a2) - 2)
            t1 = f1 - i1
            t2 = f2 - i2
            out[sel] = ((1 - t1) * (1 - t2) * data[i1, i2] + t1 * (1 - t2) * data[i1 + 1, i2]
                        + (1 - t1) * t2 * data[i1, i2 + 1] + t1 * t2 * data[i1 + 1, i2 + 1])
        return out

    def rbf(self):
        """Lazily built radial representation (nodes, width, per-half splines)."""
        if self._rbf is None:
            self._rbf = RadialRepresentation(self)
        return self._rbf

    def _rbf_eval(self, xi1, xi2):
        rep = self.rbf()
        xi1, xi2 = np.broadcast_arrays(xi1, xi2)
        coef = rep.coefficients(xi1.ravel())  # (n, K)
        basis = np.exp(-0.5 * ((xi2.ravel()[:, None] - rep.nodes[None, :]) / rep.width) ** 2)
        return np.sum(coef * basis, axis=1).reshape(xi1.shape)


class RadialRepresentation:
    """w(xi1, xi2) ~ sum_k c_k(xi1) exp(-(xi2 - eta_k)^2 / (2 rho^2)), rho = row spacing."""

    def __init__(self, grid: ScatteringGrid):
        a1, a2 = grid.xi_lattice.axes()
        h1, h2 = grid.xi_lattice.spacing
        self.nodes = a2
        self.width = h2
        self.h1 = h1
        self.edge = 0.5 * grid.xi_lattice.length_1
        col = np.exp(-0.5 * ((a2 - a2[0]) / h2) ** 2)
        coef = solve_toeplitz(col, grid.transform.T).T  # (N1, N2)
        self.column_coefficients = coef
        half = grid.half
        # w jumps across xi1 = 0 (the sgn(lambda_I) branch of m0), so each half is
        # splined on its own.  One-sided extrapolation to the axis over h/2 costs a
        # relative error of order (h / width)^4; when the grid carries a smooth
        # part (the Born transform, continuous across the axis) only the O(eps)
        # smaller remainder is extrapolated.
        if grid.smooth_part is not None:
            smooth = solve_toeplitz(col, grid.smooth_part.T).T
            self._smooth = CubicSpline(a1, smooth, axis=0)
            rest = coef - smooth
        else:
            self._smooth = None
            rest = coef
        self._splines = {
            -1: CubicSpline(a1[:half], rest[:half], axis=0, extrapolate=True),
            1: CubicSpline(a1[half:], rest[half:], axis=0, extrapolate=True),
        }
        # drop radial terms that never matter
        mag = np.max(np.abs(coef), axis=0)
        self.active = mag > 1e-14 * max(mag.max(), 1e-300)

    def coefficients(self, xi1):
        xi1 = np.asarray(xi1, dtype=float)
        out = np.zeros(xi1.shape + (len(self.nodes),), dtype=complex)
        for sign in (-1, 1):
            sel = (np.sign(xi1) == sign) & (np.abs(xi1) <= self.edge)
            if np.any(sel):
                out[sel] = self._splines[sign](xi1[sel])
                if self._smooth is not None:
                    out[sel] += self._smooth(xi1[sel])
        return out

    def support(self, rel=1e-9):
        """Largest |xi1| column whose coefficients exceed ``rel`` of the maximum."""
        mag = np.max(np.abs(self.column_coefficients), axis=1)
        keep = mag > rel * max(mag.max(), 1e-300)
        xs = np.abs(np.linspace(-self.edge + 0.5 * self.h1, self.edge - 0.5 * self.h1, len(mag)))
        if not np.any(keep):
            return 0.0
        return float(min(xs[keep].max() + self.h1, self.edge))
