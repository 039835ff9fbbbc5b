"""Moving-cone coordinates, the leading-order long-time formula, and decay fits.

For ``x = (x1, x2, -t)`` with ``t > 0`` put ``t1 = x1 / t``, ``t2 = x2 / t`` and
``a = t1 + t2^2 / 3``.  In the primed variable ``zeta' = zeta - t2 / 3`` the
phase of the linear field is ``2 pi t S0(a; zeta')``; for ``a = -3 r^2`` its
stationary points are ``+-i r`` and

    u(x) ~ (2i / 3t) e^{i Phi} s_c(t2/3 + i r) - (2i / 3t) e^{-i Phi} s_c(t2/3 - i r),
    Phi = 2 pi t S0(a; i r) = 4 t r^3.

For ``a > 0`` the stationary points are real, where s_c is not defined, and
the field decays faster than 1/t.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import curve_fit

from . import chirp_quadrature
from .coordinates import grad_S0, phase_S0
from .errors import (DegeneratePhase, InsufficientData, InvalidCone, OutsideAsymptoticRegime,
                     ResolutionInsufficient)
from .oscillatory import gauss_legendre
from .scattering import ScatteringGrid


class Regime(Enum):
    NEG = "NEG"
    POS = "POS"
    NEAR_ZERO = "NEAR_ZERO"


@dataclass(frozen=True)
class ConeFrame:
    t1: float
    t2: float
    t: float
    a: float
    r: float
    regime: Regime
    threshold: float

    def position(self):
        return np.array([self.t1 * self.t, self.t2 * self.t, -self.t])


def cone_frame(x, threshold=1.0) -> ConeFrame:
    x1, x2, x3 = (float(v) for v in x)
    if not x3 < 0:
        raise InvalidCone(f"cone coordinates need x3 < 0, got {x3}")
    t = -x3
    t1, t2 = x1 / t, x2 / t
    a = t1 + t2 ** 2 / 3.0
    if a < -threshold:
        regime = Regime.NEG
    elif a > threshold:
        regime = Regime.POS
    else:
        regime = Regime.NEAR_ZERO
    return ConeFrame(t1, t2, t, a, float(np.sqrt(abs(a) / 3.0)), regime, float(threshold))


def ray_point(a, t2, t):
    """Position on the cone with parameters (a, t2) at time t."""
    t1 = a - t2 ** 2 / 3.0
    return np.array([t1 * t, t2 * t, -t], dtype=float)


def stationary_points(a):
    if a == 0:
        raise DegeneratePhase("a = 0: the stationary points coalesce at the origin")
    r = np.sqrt(abs(a) / 3.0)
    if a < 0:
        return [1j * r, -1j * r]
    return [complex(r), complex(-r)]


def leading_phase(frame: ConeFrame):
    """2 pi t S0(a; i r), computed from the phase function itself."""
    return 2 * np.pi * frame.t * float(phase_S0(frame.a, 1j * frame.r))


def leading_order(S: ScatteringGrid, x, threshold=1.0, method=None) -> complex:
    frame = cone_frame(x, threshold)
    if frame.regime is Regime.NEAR_ZERO:
        raise OutsideAsymptoticRegime(f"|a| = {abs(frame.a):.3g} is below the threshold {threshold}")
    if frame.regime is Regime.POS or S.is_zero():
        return 0j
    phi = leading_phase(frame)
    centre = frame.t2 / 3.0
    up = S.evaluate(centre + 1j * frame.r, method)
    down = S.evaluate(centre - 1j * frame.r, method)
    pref = 2j / (3.0 * frame.t)
    return complex(pref * np.exp(1j * phi) * up - pref * np.exp(-1j * phi) * down)


@dataclass
class FieldEstimate:
    value: complex
    error: float


def u1_direct(S: ScatteringGrid, x, resolution=1) -> FieldEstimate:
    """u1 at x with a refinement-difference error estimate.

    ``resolution`` scales the panel density of the outer integral (the inner one
    is exact); the error is the change when it is doubled.
    """
    x = np.asarray(x, dtype=float)
    if x[2] > -1:
        raise InvalidCone("u1_direct is meant for t >= 1")
    if S.is_zero():
        return FieldEstimate(0j, 0.0)
    coarse = chirp_quadrature.linear_field(S, x, refine=resolution)
    fine = chirp_quadrature.linear_field(S, x, refine=2 * resolution)
    err = abs(fine - coarse)
    floor = 1e-13 * float(np.max(np.abs(S.transform)))
    if err > 0.1 * max(abs(fine), floor):
        raise ResolutionInsufficient(f"refinement changed u1 by {err:.3g} (value {abs(fine):.3g})")
    return FieldEstimate(fine, err)


# -- cutoffs ---------------------------------------------------------------

def _blend(sigma):
    """e^{-1/(1-s)} / (e^{-1/(1-s)} + e^{-1/s}): 1 at s = 0, 0 at s = 1, C-infinity."""
    s = np.clip(np.asarray(sigma, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1 - s, 1.0)), 0.0)
        b = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        out = a / (a + b)
    return out


def psi(s):
    """Plateau 1 on |s| <= 1/2, zero for |s| >= 1, smooth in between."""
    s = np.abs(np.asarray(s, dtype=float))
    out = np.where(s <= 0.5, 1.0, _blend(2.0 * (s - 0.5)))
    out = np.where(s >= 1.0, 0.0, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class CutoffSpec:
    """Two bumps psi(k (s - w0) / r) + psi(k (s + w0) / r); ``sharpness`` is k."""

    sharpness: float = 16.0
    enabled: bool = True

    def bump(self, s, r, w0):
        if not self.enabled:
            return np.zeros_like(np.asarray(s, dtype=float))
        k = self.sharpness
        if w0 == 0:
            return psi(k * np.asarray(s) / r)
        return psi(k * (np.asarray(s) - w0) / r) + psi(k * (np.asarray(s) + w0) / r)

    def chi(self, zeta_prime, r):
        z = np.asarray(zeta_prime, dtype=complex)
        return self.bump(z.imag, r, r) * self.bump(z.real, r, 0.0)


def u1_split(S: ScatteringGrid, x, cutoff=CutoffSpec(), order=96, resolution=1):
    """(u11, u12): u1 localised near the stationary points by chi and the remainder.

    u11 is a tensor Gauss-Legendre integral in zeta' over the two small squares
    carrying chi; u12 is u1 minus u11.
    """
    frame = cone_frame(x)
    if frame.regime is Regime.NEAR_ZERO:
        raise OutsideAsymptoticRegime(f"|a| = {abs(frame.a):.3g} is below the threshold")
    total = u1_direct(S, x, resolution).value
    if not cutoff.enabled or S.is_zero():
        return 0j, total
    r = frame.r
    half = r / cutoff.sharpness
    gx, gw = gauss_legendre(order)
    zr = half * gx
    wr = half * gw
    u11 = 0j
    centres = [(0.0, r), (0.0, -r)] if frame.regime is Regime.NEG else [(r, 0.0), (-r, 0.0)]
    for cr, ci in centres:
        ZR, ZI = np.meshgrid(cr + zr, ci + zr, indexing="ij")
        W = np.outer(wr, wr)
        zp = ZR + 1j * ZI
        weight = cutoff.chi(zp, r)
        zeta = zp + frame.t2 / 3.0
        xi1 = -zeta.imag / np.pi
        xi2 = -2 * zeta.real * zeta.imag / np.pi
        ok = (weight > 0) & (xi1 != 0)
        w = np.zeros_like(zp)
        w[ok] = S.evaluate_w(xi1[ok], xi2[ok])
        ph = x[0] * xi1 + x[1] * xi2 + frame.t * (np.pi ** 2 * xi1 ** 3 - 0.75 * xi2 ** 2 / np.where(ok, xi1, 1.0))
        jac = 2 * np.abs(xi1) / np.pi
        u11 += np.sum(np.where(ok, W * weight * w * np.exp(2j * np.pi * ph) * jac, 0.0))
    return complex(u11), complex(total - u11)


# -- fits ------------------------------------------------------------------

@dataclass
class DecayFit:
    samples: list
    slope: float
    intercept: float
    residual: float
    dropped: list = field(default_factory=list)

    def predict(self, t):
        return np.exp(self.intercept) * np.asarray(t, dtype=float) ** self.slope


def decay_fit(samples) -> DecayFit:
    """Least-squares slope of log|value| against log t."""
    kept, dropped = [], []
    for t, v in samples:
        (kept if abs(v) > 0 else dropped).append((float(t), abs(v)))
    if dropped:
        warnings.warn(f"decay_fit: dropped {len(dropped)} zero samples", RuntimeWarning, stacklevel=2)
    if len(kept) < 4:
        raise InsufficientData(f"{len(kept)} usable samples, need 4")
    ts = np.array([k[0] for k in kept])
    if ts.max() / ts.min() < 4:
        raise InsufficientData("samples must span a factor of 4 in t")
    lt = np.log(ts)
    lv = np.log([k[1] for k in kept])
    A = np.vstack([lt, np.ones_like(lt)]).T
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - lv) ** 2)))
    return DecayFit(kept, float(coef[0]), float(coef[1]), res, dropped)


@dataclass
class OscillationFit:
    frequency: float
    amplitude: float
    phase: float
    residual: float


def fit_oscillation(ts, values, bracket=(0.1, 40.0), scan=4000) -> OscillationFit:
    """Fit values ~ A cos(omega t + phi) by a frequency scan then nonlinear least squares."""
    ts = np.asarray(ts, dtype=float)
    y = np.asarray(values, dtype=float)
    best = (np.inf, None)
    for om in np.linspace(bracket[0], bracket[1], scan):
        M = np.vstack([np.cos(om * ts), np.sin(om * ts)]).T
        c, *_ = np.linalg.lstsq(M, y, rcond=None)
        r = float(np.sum((M @ c - y) ** 2))
        if r < best[0]:
            best = (r, om, c)
    _, om, c = best
    amp0 = float(np.hypot(*c))
    ph0 = float(np.arctan2(-c[1], c[0]))

    def model(t, A, w, p):
        return A * np.cos(w * t + p)

    popt, _ = curve_fit(model, ts, y, p0=[amp0, om, ph0], maxfev=20000)
    resid = float(np.sqrt(np.mean((model(ts, *popt) - y) ** 2)) / max(abs(popt[0]), 1e-300))
    A, w, p = popt
    if A < 0:
        A, p = -A, p + np.pi
    return OscillationFit(float(w), float(A), float(p), resid)


def gradient_floor(a, zeta_prime, cutoff=CutoffSpec()):
    """min over samples off the cutoff support of |grad S0| / (|a| + |zeta'|^2)."""
    r = np.sqrt(abs(a) / 3.0)
    z = np.asarray(zeta_prime, dtype=complex)
    sel = cutoff.chi(z, r) < 1
    g1, g2 = grad_S0(a, z[sel])
    ratio = np.hypot(g1, g2) / (abs(a) + np.abs(z[sel]) ** 2)
    return float(ratio.min()) if ratio.size else np.inf
