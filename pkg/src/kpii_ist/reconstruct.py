"""Pointwise reconstruction u = u1 + u20 + u21 from scattering data.

At x3 = 0 (or whenever the plane wave is resolved by the spectral lattice)
the Neumann-series eigenfunction is used directly.  For t > 0 the lattice
cannot follow the phase near xi1 = 0, so u1 comes from the chirp quadrature and
the two second-order terms from their Born-order double sums.
"""

from __future__ import annotations

import numpy as np

from . import chirp_quadrature
from .inverse import ReconstructionValue, phase_resolution, reconstruct_lattice
from .perturbative import second_order_terms
from .scattering import ScatteringGrid


RESOLVED_RADIANS = 0.5  # phase increment per cell below which the lattice sum is trusted


def reconstruct_u(S: ScatteringGrid, x, tol=1e-10, box=(64.0, 64.0), method=None) -> ReconstructionValue:
    """u at one position; ``method`` forces "lattice" or "quadrature"."""
    x = np.asarray(x, dtype=float)
    if S.is_zero():
        return ReconstructionValue(0j, 0j, 0j, {"method": "zero"})
    if method is None:
        method = "lattice" if x[2] == 0 or phase_resolution(S, x) < RESOLVED_RADIANS else "quadrature"
    if method == "lattice":
        return reconstruct_lattice(S, x[None], tol)[0]
    if method != "quadrature":
        raise ValueError(f"unknown reconstruction method {method!r}")
    u1, err = chirp_quadrature.with_error(chirp_quadrature.linear_field, S, x)
    second = second_order_terms(S, x, box)
    return ReconstructionValue(u1, second.u20, second.u21,
                               {"method": "quadrature", "u1_error": err, "box": second.box,
                                "nodes": second.nodes})
