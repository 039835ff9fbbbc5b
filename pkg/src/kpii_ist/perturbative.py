"""Second-order reconstruction terms u20 and u21 at Born order.

With m - 1 replaced by its first Neumann term C T 1, and C T 1 written through
the Green's symbol,

    (C T 1)(lam) = -iint w(eta) E(eta) / p_lam(eta) d eta,
    -1 / p_{zeta(-xi)}(eta) = xi1 / (2 pi Z),
    Z = 2 pi xi1 eta1 (xi1 + eta1) + i (xi1 eta2 - xi2 eta1),

both terms become double sums over one frequency lattice k / L:

    u20 = sum_i a_i sum_j a_j xi1_i / (2 pi Z_ij),
    u21 = sum_i a_i / (2 pi i xi1_i) sum_j 2 pi i eta1_j a_j xi1_i / (2 pi Z_ij),

with ``a = w E / (L1 L2)``.  The lattice spacing 1 / L plays the role of a
periodic box of side L; the box must hold the radiation at the evaluation time.
The two integrable point singularities (eta = -xi and eta = 0) are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .scattering import ScatteringGrid


@dataclass
class SecondOrderValue:
    u20: complex
    u21: complex
    nodes: int
    box: tuple


def frequency_nodes(S: ScatteringGrid, box, rel=1e-7):
    """Lattice frequencies k / L (k1 != 0) inside the support of w and their w values."""
    L1, L2 = box
    rep = S.rbf()
    e1 = rep.support(rel)
    e2 = 0.5 * S.xi_lattice.length_2
    k1 = np.arange(-int(np.floor(e1 * L1)), int(np.floor(e1 * L1)) + 1) / L1
    k1 = k1[k1 != 0]
    k2 = np.arange(-int(np.floor(e2 * L2)), int(np.floor(e2 * L2)) + 1) / L2
    K1, K2 = np.meshgrid(k1, k2, indexing="ij")
    w = S.evaluate_w(K1, K2)
    keep = np.abs(w) > rel * np.abs(w).max()
    # keep the set closed under xi -> -xi so the sums stay real
    keep = keep | keep[::-1, ::-1]
    return K1[keep], K2[keep], w[keep]


def second_order_terms(S: ScatteringGrid, x, box=(128.0, 64.0), rel=1e-7) -> SecondOrderValue:
    x = np.asarray(x, dtype=float)
    if S.is_zero():
        return SecondOrderValue(0j, 0j, 0, tuple(box))
    k1, k2, w = frequency_nodes(S, box, rel)
    t = -x[2]
    phase = k1 * x[0] + k2 * x[1] + t * (np.pi ** 2 * k1 ** 3 - 0.75 * k2 ** 2 / k1)
    amp = w * np.exp(2j * np.pi * phase) / (box[0] * box[1])
    floor = 1e-12 * (1.0 / (box[0] * box[1])) ** 2
    u20, u21 = kernels.box_second_order(k1, k2, amp, floor)
    return SecondOrderValue(u20, u21, len(k1), tuple(box))
