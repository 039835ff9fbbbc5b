"""Airy function, cubic-phase integrals and a brute-force oscillatory quadrature.

``Ai`` is evaluated from its Maclaurin pair for |z| <= 6 (in extended
precision, the positive side cancels badly in double) and from the classical
asymptotic expansions beyond.  Nothing here depends on an external
special-function library; scipy is used only as an independent oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateStationaryPoint

Z_SWITCH = 6.0

_LD = np.longdouble
_AI0 = _LD("0.35502805388781723926006318600418317639797917419917724")
_AIP0 = _LD("0.25881940379280679840518356018920396347909113835493458")  # -Ai'(0)


class AiryMethod(Enum):
    SERIES = "series"
    ASYMPTOTIC_NEG = "asymptotic_neg"
    ASYMPTOTIC_POS = "asymptotic_pos"


@dataclass(frozen=True)
class AiryEval:
    argument: float
    value: float
    method: AiryMethod
    error: float


def _u_coefficients(n):
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    return u


_U = _u_coefficients(40)


def _airy_series(z):
    z = np.asarray(z, dtype=_LD)
    z3 = z ** 3
    f = np.ones_like(z)
    g = z.copy()
    tf = np.ones_like(z)
    tg = z.copy()
    for k in range(60):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        f += tf
        g += tg
        if np.all(np.abs(tf) + np.abs(tg) < 1e-24 * (np.abs(f) + np.abs(g))):
            break
    value = _AI0 * f - _AIP0 * g
    # rounding bound: extended epsilon times the size of the cancelling sums
    err = np.finfo(_LD).eps * 8 * (_AI0 * np.abs(f) + _AIP0 * np.abs(g))
    return value.astype(float), err.astype(float)


def _asymptotic_sum(zeta, parity=None):
    """Optimally truncated sums of (-1)^k u_k zeta^-k; returns (sum, first omitted term)."""
    zeta = np.asarray(zeta, dtype=float)
    total = np.zeros_like(zeta)
    err = np.zeros_like(zeta)
    done = np.zeros(zeta.shape, dtype=bool)
    ks = range(len(_U)) if parity is None else range(parity, len(_U), 2)
    prev = np.full(zeta.shape, np.inf)
    sign_step = 1 if parity is None else 2
    for idx, k in enumerate(ks):
        sign = (-1.0) ** idx if parity is not None else (-1.0) ** k
        term = sign * _U[k] * zeta ** (-k)
        growing = np.abs(term) >= prev
        stop = (~done) & growing
        err = np.where(stop, np.abs(term), err)
        done |= stop
        total = np.where(done, total, total + term)
        prev = np.where(done, prev, np.abs(term))
        if np.all(done):
            break
    err = np.where(done, err, prev)
    del sign_step
    return total, err


def _airy_pos(z):
    zeta = 2.0 / 3.0 * z ** 1.5
    s, e = _asymptotic_sum(zeta)
    pref = np.exp(-zeta) / (2.0 * np.sqrt(np.pi) * z ** 0.25)
    return pref * s, pref * e


def _airy_neg(x):
    zeta = 2.0 / 3.0 * x ** 1.5
    se, ee = _asymptotic_sum(zeta, parity=0)
    so, eo = _asymptotic_sum(zeta, parity=1)
    pref = 1.0 / (np.sqrt(np.pi) * x ** 0.25)
    value = pref * (np.cos(zeta - np.pi / 4) * se + np.sin(zeta - np.pi / 4) * so)
    return value, pref * (ee + eo)


def airy_values(z, z_switch=None):
    """Vectorised Ai(z) with error estimates and method codes (0 series, 1 neg, 2 pos)."""
    z_switch = Z_SWITCH if z_switch is None else z_switch
    z = np.atleast_1d(np.asarray(z, dtype=float))
    value = np.empty_like(z)
    err = np.empty_like(z)
    method = np.zeros(z.shape, dtype=int)
    ser = np.abs(z) <= z_switch
    if np.any(ser):
        value[ser], err[ser] = _airy_series(z[ser])
    neg = z < -z_switch
    if np.any(neg):
        value[neg], err[neg] = _airy_neg(-z[neg])
        method[neg] = 1
    pos = z > z_switch
    if np.any(pos):
        value[pos], err[pos] = _airy_pos(z[pos])
        method[pos] = 2
    return value, err, method


def airy(z):
    value, err, method = airy_values([z])
    tag = (AiryMethod.SERIES, AiryMethod.ASYMPTOTIC_NEG, AiryMethod.ASYMPTOTIC_POS)[method[0]]
    return AiryEval(float(z), float(value[0]), tag, float(err[0]))


def Ai(z):
    """Plain array-valued Airy function."""
    z = np.asarray(z, dtype=float)
    return airy_values(z.ravel())[0].reshape(z.shape)[()]


def airy_envelope_negative(x):
    """Leading oscillatory form of Ai(-x) for large x."""
    x = np.asarray(x, dtype=float)
    return np.cos(2.0 / 3.0 * x ** 1.5 - np.pi / 4) / (np.sqrt(np.pi) * x ** 0.25)


def cubic_phase_integral(t, c):
    """int exp(2 pi i t (4 pi^2 s^3 + c s)) ds."""
    scale = (24.0 * np.pi ** 3 * t) ** (-1.0 / 3.0)
    return complex(2.0 * np.pi * scale * Ai(2.0 * np.pi * t * c * scale))


def airy_propagator(t, a, eta):
    """Fourier transform of zeta_I -> exp(-2 i t (a zeta_I + zeta_I^3)) evaluated at -eta."""
    arg = (2.0 * t) ** (2.0 / 3.0) * 3.0 ** (-1.0 / 3.0) * (a - np.pi * np.asarray(eta) / t)
    return 2.0 * np.pi / (6.0 * t) ** (1.0 / 3.0) * Ai(arg) + 0j


def stationary_phase_leading(amplitude_at_point, second_deriv, t):
    """Leading term of int g(s) exp(i t c s^2) ds, with c = ``second_deriv``.

    Equals g(0) exp(i pi sgn(c) / 4) sqrt(pi / (t |c|)).
    """
    if second_deriv == 0:
        raise DegenerateStationaryPoint("zero curvature at the stationary point")
    if t <= 0:
        raise ValueError("t must be positive")
    c = float(second_deriv)
    return amplitude_at_point * np.exp(0.25j * np.pi * np.sign(c)) * np.sqrt(np.pi / (t * abs(c)))


# -- brute-force oracle ----------------------------------------------------

_GL_CACHE = {}


def gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def cosine_taper(s, half_width, fraction=0.3):
    """1 on |s| <= (1 - fraction) X, cos^2 roll-off to 0 at |s| = X."""
    s = np.abs(np.asarray(s, dtype=float))
    inner = (1.0 - fraction) * half_width
    w = np.ones_like(s)
    roll = (s > inner) & (s < half_width)
    w[roll] = np.cos(0.5 * np.pi * (s[roll] - inner) / (half_width - inner)) ** 2
    w[s >= half_width] = 0.0
    return w


def panel_quadrature(integrand, lo, hi, rate, order=20, radians_per_panel=6.0):
    """Gauss-Legendre panels whose width keeps ``rate`` * width below the given phase budget.

    ``rate`` bounds |d phase / ds| and may be a callable of the panel midpoint.
    """
    x, w = gauss_legendre(order)
    edges = [lo]
    s = lo
    while s < hi:
        r = rate(s) if callable(rate) else rate
        step = radians_per_panel / max(r, 1e-12)
        if callable(rate):
            step = min(step, radians_per_panel / max(rate(min(s + step, hi)), 1e-12))
        s = min(s + step, hi)
        edges.append(s)
    edges = np.asarray(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return np.sum(weights * integrand(nodes))


def windowed_integral(integrand, rate, half_width, fraction=0.3, order=20):
    """int integrand(s) * taper(s) ds over [-X, X]."""
    return panel_quadrature(
        lambda s: integrand(s) * cosine_taper(s, half_width, fraction), -half_width, half_width, rate, order
    )


def converged_windowed_integral(integrand, rate, half_width, tol=1e-9, max_doublings=6, fraction=0.3):
    """Double the truncation radius until successive values agree to ``tol`` (relative)."""
    prev = windowed_integral(integrand, rate, half_width, fraction)
    for _ in range(max_doublings):
        half_width *= 2.0
        cur = windowed_integral(integrand, rate, half_width, fraction)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur, abs(cur - prev)
        prev = cur
    return prev, abs(cur - prev)
