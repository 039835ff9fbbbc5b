"""Hot kernels with a compiled backend and a numpy fallback.

The backend is chosen at import: the Cython extension when it imports cleanly,
numpy otherwise.  ``KPII_BACKEND=numpy`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.special import wofz


def chirp_pole_sum_numpy(xi1, coef, eta, rho, t, x2, lam, pole, block=4096):
    xi1 = np.asarray(xi1, float)
    out = np.empty(len(xi1), dtype=complex)
    inv2r2 = 0.5 / rho ** 2
    gamma = 2.0 * np.pi * x2
    b = eta / rho ** 2 + 1j * gamma
    c0 = -(eta ** 2) * inv2r2
    for start in range(0, len(xi1), block):
        x = xi1[start:start + block, None]
        A = inv2r2 + 1j * 1.5 * np.pi * t / x
        sA = np.sqrt(A)
        mu = b[None, :] / (2.0 * A)
        E = c0[None, :] + b[None, :] ** 2 / (4.0 * A)
        if not pole:
            val = np.sqrt(np.pi) / sA * np.exp(E)
        else:
            s = 2j * np.pi * x ** 2 + 2.0 * x * lam
            sig = np.where(s.imag > 0, 1.0, -1.0)
            Z = sig * sA * (s - mu)
            up = Z.imag >= 0
            with np.errstate(over="ignore", invalid="ignore"):
                lower = 2.0 * np.exp(E - Z ** 2) - np.exp(E) * wofz(-Z)
            val = 1j * np.pi * sig * np.where(up, np.exp(E) * wofz(np.where(up, Z, 0)), lower)
        out[start:start + block] = np.sum(coef[start:start + block] * val, axis=1)
    return out


def box_second_order_numpy(k1, k2, amp, floor, block=512):
    k1 = np.asarray(k1, float)
    k2 = np.asarray(k2, float)
    u20 = 0.0 + 0.0j
    u21 = 0.0 + 0.0j
    for start in range(0, len(k1), block):
        x1 = k1[start:start + block, None]
        x2 = k2[start:start + block, None]
        zr = 2 * np.pi * x1 * k1[None, :] * (x1 + k1[None, :])
        zi = x1 * k2[None, :] - x2 * k1[None, :]
        den = zr ** 2 + zi ** 2
        ok = den > floor
        term = np.where(ok, amp[None, :] * x1 * (zr - 1j * zi) / (2 * np.pi * np.where(ok, den, 1.0)), 0.0)
        c = term.sum(axis=1)
        d = (2j * np.pi * k1[None, :] * term).sum(axis=1)
        a = amp[start:start + block]
        u20 += np.sum(a * c)
        u21 += np.sum(a * d / (2j * np.pi * x1[:, 0]))
    return complex(u20), complex(u21)


BACKEND = "numpy"
chirp_pole_sum = chirp_pole_sum_numpy
box_second_order = box_second_order_numpy

if os.environ.get("KPII_BACKEND", "").lower() != "numpy":
    try:
        from . import _kernels

        def chirp_pole_sum(xi1, coef, eta, rho, t, x2, lam, pole):
            return _kernels.chirp_pole_sum(
                np.ascontiguousarray(xi1, dtype=float), np.ascontiguousarray(coef, dtype=complex),
                np.ascontiguousarray(eta, dtype=float), float(rho), float(t), float(x2), complex(lam), bool(pole))

        def box_second_order(k1, k2, amp, floor):
            return _kernels.box_second_order(
                np.ascontiguousarray(k1, dtype=float), np.ascontiguousarray(k2, dtype=float),
                np.ascontiguousarray(amp, dtype=complex), float(floor))

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass
