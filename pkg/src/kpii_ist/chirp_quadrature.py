"""Spectral integrals at large |x3| by an exact inner xi2 integral.

At fixed xi1 the plane wave is a Gaussian chirp in xi2,
``exp(i gamma xi2 - i B xi2^2)`` with ``B = 3 pi t / (2 xi1)``, ``gamma = 2 pi x2``.
With w written as a sum of Gaussians in xi2 (``RadialRepresentation``) the
integrals

    int w E d xi2               and     int w E / (xi2 - s) d xi2

are closed-form (the second through the Faddeeva function), so only the outer
xi1 integral is numerical.  It uses Gauss-Legendre panels sized by a bound on
the phase rate, graded geometrically toward xi1 = 0 where the inner integral
behaves like sqrt|xi1|, and broken at the xi1 where s crosses the real axis.

    u1(x)          = iint w E d xi
    C T 1(x, lam)  = (1 / 2 pi i) iint w E / (xi2 - s) d xi,   s = 2 pi i xi1^2 + 2 xi1 lam
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .oscillatory import gauss_legendre
from .scattering import ScatteringGrid


def _phase_rate(S: ScatteringGrid, x, lam=None):
    """Callable bound on |d phase / d xi1| for the outer integrand."""
    t = abs(x[2])
    x1, x2 = abs(x[0]), abs(x[1])
    inner = min(x2 ** 2 / (3 * t), 2 * x2 * 0.5 * S.xi_lattice.length_2) if t > 0 else x2 * 0.5 * S.xi_lattice.length_2
    extra = 0.0
    if lam is not None:
        extra = 2 * x2 * abs(lam.real) + 3 * t * abs(lam) ** 2
    base = 2 * np.pi * (x1 + inner + extra) + 40.0

    def rate(xi1):
        return base + 6 * np.pi ** 3 * t * xi1 ** 2

    return rate


def outer_rule(S: ScatteringGrid, x, lam=None, refine=1, order=16, radians_per_panel=3.0, grade=0.5, floor=1e-7):
    """Nodes and weights for the xi1 integral over both half-lines."""
    rep = S.rbf()
    edge = rep.support()
    if edge <= 0:
        return np.zeros(0), np.zeros(0)
    rate = _phase_rate(S, x, lam)
    budget = radians_per_panel / refine
    breaks = {-edge, 0.0, edge}
    if lam is not None:
        root = -lam.imag / np.pi
        if 0 < abs(root) < edge:
            breaks.add(root)
    breaks = sorted(breaks)
    gx, gw = gauss_legendre(order)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        edges = _graded_edges(lo, hi, rate, budget, grade ** (1.0 / refine), floor)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        nodes.append((mid[:, None] + half[:, None] * gx[None, :]).ravel())
        weights.append((half[:, None] * gw[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _graded_edges(lo, hi, rate, budget, grade, floor):
    """Panel edges on [lo, hi]; geometric toward an endpoint at 0, rate-limited elsewhere."""
    if lo == 0.0 or hi == 0.0:
        far = hi if lo == 0.0 else lo
        sign = np.sign(far)
        span = abs(far)
        pts = [0.0]
        s = floor * span
        pts.append(s)
        while s < span:
            step = min(s * (1 / grade - 1), budget / rate(s))
            s = min(s + step, span)
            pts.append(s)
        pts = np.asarray(pts)
        return pts if sign > 0 else -pts[::-1]
    pts = [lo]
    s = lo
    while s < hi:
        step = budget / max(rate(s), rate(min(s + budget / rate(s), hi)))
        s = min(s + step, hi)
        pts.append(s)
    return np.asarray(pts)


def _inner(S, nodes, x, lam, pole):
    rep = S.rbf()
    coef = rep.coefficients(nodes)
    act = rep.active
    return kernels.chirp_pole_sum(nodes, coef[:, act], rep.nodes[act], rep.width, -x[2], x[1],
                                  0j if lam is None else lam, pole)


def _outer_phase(nodes, x):
    t = -x[2]
    return np.exp(2j * np.pi * (nodes * x[0] + t * np.pi ** 2 * nodes ** 3))


def _integrate(S, x, lam, pole, derivative, refine):
    x = np.asarray(x, dtype=float)
    nodes, weights = outer_rule(S, x, lam, refine)
    if len(nodes) == 0:
        return 0j
    vals = _inner(S, nodes, x, lam, pole) * _outer_phase(nodes, x)
    if derivative:
        vals = vals * 2j * np.pi * nodes
    return complex(np.sum(weights * vals))


def linear_field(S: ScatteringGrid, x, derivative=False, refine=1):
    """u1(x) = iint w E d xi (``derivative``: its x1-derivative)."""
    if S.is_zero():
        return 0j
    return _integrate(S, x, None, False, derivative, refine)


def cauchy_t1(S: ScatteringGrid, x, lam, derivative=False, refine=1):
    """(C T 1)(x, lam), or its x1-derivative, for lam off the real axis."""
    lam = complex(lam)
    if lam.imag == 0:
        from .errors import RealAxisUndefined

        raise RealAxisUndefined("C T 1 is evaluated off the real axis only")
    if S.is_zero():
        return 0j
    return _integrate(S, x, lam, True, derivative, refine) / (2j * np.pi)


def with_error(fn, *args, **kw):
    """Value at the default rule and its change under doubled panel density."""
    coarse = fn(*args, refine=1, **kw)
    fine = fn(*args, refine=2, **kw)
    return fine, abs(fine - coarse)
