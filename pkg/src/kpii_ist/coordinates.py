"""Spectral coordinates, primed variables and the cubic phase S0.

The spectral plane is parametrised two ways: by ``zeta = zeta_R + i zeta_I``
and by the Fourier variable ``xi`` through

    zeta = xi2 / (2 xi1) - i pi xi1,     xi = (-zeta_I / pi, -2 zeta_R zeta_I / pi).

With these, ``conj(zeta) - zeta = 2 pi i xi1`` and
``conj(zeta)^2 - zeta^2 = 2 pi i xi2``.  Complex conjugation of zeta is the
reflection ``xi -> -xi``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SingularCoordinate


class RealAxisWarning(UserWarning):
    pass


def zeta_from_xi(xi1, xi2):
    xi1 = np.asarray(xi1, dtype=float)
    if np.any(xi1 == 0):
        raise SingularCoordinate("zeta(xi) is undefined on xi1 = 0")
    out = np.asarray(xi2, dtype=float) / (2.0 * xi1) - 1j * np.pi * xi1
    return out[()] if out.ndim == 0 else out


def xi_from_zeta(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta.imag == 0):
        warnings.warn("zeta on the real axis maps to xi = 0", RealAxisWarning, stacklevel=2)
    xi1 = -zeta.imag / np.pi
    xi2 = -2.0 * zeta.real * zeta.imag / np.pi
    if zeta.ndim == 0:
        return float(xi1), float(xi2)
    return xi1, xi2


def area_weight(xi1):
    """Density of d zeta_R d zeta_I with respect to d xi1 d xi2.

    The Jacobian of xi -> zeta is pi / (2 |xi1|); hence
    conj(d zeta) ^ d zeta = 2i d zeta_R d zeta_I = (i pi / |xi1|) d xi.
    """
    xi1 = np.asarray(xi1, dtype=float)
    if np.any(xi1 == 0):
        raise SingularCoordinate("area weight is singular on xi1 = 0")
    out = np.pi / (2.0 * np.abs(xi1))
    return out[()] if out.ndim == 0 else out


def jacobian_zeta(xi1, xi2):
    """Partial derivatives (d zeta / d xi1, d zeta / d xi2) as complex numbers."""
    xi1 = np.asarray(xi1, dtype=float)
    return -np.asarray(xi2, dtype=float) / (2.0 * xi1 ** 2) - 1j * np.pi, 1.0 / (2.0 * xi1)


def phase_S0(a, zeta_prime):
    z = np.asarray(zeta_prime, dtype=complex)
    zr, zi = z.real, z.imag
    out = -(a * zi + zi ** 3 - 3.0 * zi * zr ** 2) / np.pi
    return out[()] if out.ndim == 0 else out


def phase_S0_xi(a, xi1, xi2):
    """The same phase written in the Fourier variables (xi1 != 0)."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    return a * xi1 + np.pi ** 2 * xi1 ** 3 - 0.75 * xi2 ** 2 / xi1


def grad_S0(a, zeta_prime):
    z = np.asarray(zeta_prime, dtype=complex)
    zr, zi = z.real, z.imag
    d_r = 6.0 / np.pi * zr * zi
    d_i = (-a + 3.0 * (zr ** 2 - zi ** 2)) / np.pi
    if z.ndim == 0:
        return float(d_r), float(d_i)
    return d_r, d_i


def hessian_S0(zeta_prime):
    """Second derivatives (d_RR, d_RI, d_II); independent of a."""
    z = np.asarray(zeta_prime, dtype=complex)
    zr, zi = z.real, z.imag
    return 6.0 / np.pi * zi, 6.0 / np.pi * zr, -6.0 / np.pi * zi


@dataclass(frozen=True)
class SpectralParam:
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if lam.imag == 0:
            raise SingularCoordinate("spectral parameter on the real axis")
        object.__setattr__(self, "lam", lam)

    @property
    def half_plane(self):
        return 1 if self.lam.imag > 0 else -1

    @property
    def xi(self):
        return xi_from_zeta(self.lam)

    def conj(self):
        return SpectralParam(self.lam.conjugate())

    @classmethod
    def from_xi(cls, xi1, xi2):
        return cls(complex(zeta_from_xi(xi1, xi2)))


@dataclass(frozen=True)
class PhasePoint:
    zeta_prime: complex
    shift: float

    def unshift(self):
        return self.zeta_prime + self.shift


def primed_shift(zeta, t2):
    shift = t2 / 3.0
    return PhasePoint(complex(zeta) - shift, shift)


def growth_constant(a, samples, cutoff_weight):
    """Smallest observed ratio |grad S0| / (|a| + |zeta'|^2) where the weight is positive.

    ``cutoff_weight`` holds 1 - chi on ``samples``; the ratio is reported, not assumed.
    """
    samples = np.asarray(samples, dtype=complex)
    mask = np.asarray(cutoff_weight) > 0
    if not np.any(mask):
        return np.inf
    gr, gi = grad_S0(a, samples[mask])
    ratio = np.hypot(gr, gi) / (abs(a) + np.abs(samples[mask]) ** 2)
    return float(ratio.min())
