"""Uniform cell-centred lattices and the continuous-transform DFT contract.

A lattice of side ``L`` with ``N`` samples carries the points
``x_j = -L/2 + (j + 1/2) L/N``.  The transform pair approximates

    f^(xi) = iint f(x) exp(-2 pi i x.xi) dx,    f(x) = iint f^(xi) exp(2 pi i x.xi) dxi

on the mode frequencies ``k/L`` for ``k`` in ``[-N/2, N/2)``, stored in
ascending order (no fftshift bookkeeping leaks to callers).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Space(Enum):
    PHYSICAL = 0
    SPECTRAL = 1


@dataclass(frozen=True)
class Lattice2D:
    length_1: float
    length_2: float
    count_1: int
    count_2: int

    def __post_init__(self):
        for n in (self.count_1, self.count_2):
            if n < 4 or n % 2:
                raise ValueError("lattice counts must be even and >= 4")
        if not (self.length_1 > 0 and self.length_2 > 0):
            raise ValueError("lattice lengths must be positive")

    @classmethod
    def square(cls, length, count):
        return cls(float(length), float(length), int(count), int(count))

    @property
    def shape(self):
        return (self.count_1, self.count_2)

    @property
    def spacing(self):
        return (self.length_1 / self.count_1, self.length_2 / self.count_2)

    @property
    def cell_area(self):
        h1, h2 = self.spacing
        return h1 * h2

    def axes(self):
        """Cell-centred sample coordinates along each axis."""
        h1, h2 = self.spacing
        a1 = -0.5 * self.length_1 + (np.arange(self.count_1) + 0.5) * h1
        a2 = -0.5 * self.length_2 + (np.arange(self.count_2) + 0.5) * h2
        return a1, a2

    def mesh(self):
        a1, a2 = self.axes()
        return np.meshgrid(a1, a2, indexing="ij")

    def frequency_axes(self):
        """Mode frequencies k/L, ascending, k in [-N/2, N/2)."""
        k1 = np.arange(-self.count_1 // 2, self.count_1 // 2)
        k2 = np.arange(-self.count_2 // 2, self.count_2 // 2)
        return k1 / self.length_1, k2 / self.length_2

    def frequency_mesh(self):
        f1, f2 = self.frequency_axes()
        return np.meshgrid(f1, f2, indexing="ij")

    def nyquist_mask(self):
        """True on the unpaired k = -N/2 row and column."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = True
        mask[:, 0] = True
        return mask

    def refined(self, factor=2):
        return Lattice2D(self.length_1, self.length_2, self.count_1 * factor, self.count_2 * factor)

    def _phase(self):
        a1, a2 = self.axes()
        f1, f2 = self.frequency_axes()
        return np.exp(-2j * np.pi * a1[0] * f1)[:, None] * np.exp(-2j * np.pi * a2[0] * f2)[None, :]


def forward_transform(lattice, samples):
    """Physical samples -> continuous-transform values on the mode lattice."""
    spec = np.fft.fftshift(np.fft.fft2(samples), axes=(-2, -1))
    return spec * lattice._phase() * lattice.cell_area


def inverse_transform(lattice, spectrum):
    """Inverse of :func:`forward_transform`."""
    shifted = np.fft.ifftshift(spectrum / (lattice._phase() * lattice.cell_area), axes=(-2, -1))
    return np.fft.ifft2(shifted)


@dataclass(frozen=True)
class ComplexField2D:
    lattice: Lattice2D
    samples: np.ndarray
    space: Space = Space.PHYSICAL
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.shape != self.lattice.shape:
            raise ValueError(f"sample shape {arr.shape} does not match lattice {self.lattice.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def to_spectral(self):
        if self.space is Space.SPECTRAL:
            return self
        return ComplexField2D(self.lattice, forward_transform(self.lattice, self.samples), Space.SPECTRAL)

    def to_physical(self):
        if self.space is Space.PHYSICAL:
            return self
        return ComplexField2D(self.lattice, inverse_transform(self.lattice, self.samples), Space.PHYSICAL)

    def real_part(self):
        return self.samples.real
