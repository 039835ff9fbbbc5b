"""Reduced-resolution health checks run by ``kpii selftest``."""

from __future__ import annotations

import os
import tempfile
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import oscillatory
from .coordinates import xi_from_zeta, zeta_from_xi
from .direct import evolve, linear_evolve
from .forward import InitialData, build_scattering_grid
from .io import load_grid, load_scattering, save_grid, save_scattering
from .lattice import Lattice2D
from .reconstruct import reconstruct_u


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    skipped: bool = False


def _coordinates():
    rng = np.random.default_rng(0)
    xi1 = rng.uniform(0.05, 2, 200) * rng.choice([-1, 1], 200)
    xi2 = rng.uniform(-2, 2, 200)
    b1, b2 = xi_from_zeta(zeta_from_xi(xi1, xi2))
    err = float(max(np.abs(b1 - xi1).max(), np.abs(b2 - xi2).max()))
    return err < 1e-13, f"xi -> zeta -> xi error {err:.2g}"


def _airy_value():
    err = abs(oscillatory.Ai(0.0) - 0.355028053887817239)
    return err < 1e-12, f"|Ai(0) - 0.3550280538878172| = {err:.2g}"


def _airy_continuity():
    """Both sides of the series/asymptotic switch must agree with the extended-precision series."""
    zs = oscillatory.Z_SWITCH
    worst = 0.0
    for z in (zs, -zs):
        for side in (-1e-9, 1e-9):
            v = oscillatory.Ai(z + side)
            ref = float(oscillatory._airy_series(np.array([z + side]))[0][0])
            worst = max(worst, abs(v - ref) / abs(ref))
    return worst < 1e-7, f"relative jump at |z| = {zs:g}: {worst:.2g}"


def _small_problem():
    phys = Lattice2D.square(16.0, 32)
    u0 = InitialData.gaussian(phys, 0.0025, 2.0)
    grid = build_scattering_grid(u0, Lattice2D.square(2.5, 16))
    return u0, grid


def _reality(grid):
    v = grid.reality_violation()
    return v < 1e-8, f"max |s_c(l) - conj s_c(conj l)| = {v:.2g}"


def _round_trip(u0, grid):
    pts = [(0.0, 0.0), (1.0, -0.5), (-1.5, 1.0)]
    x1, x2 = u0.lattice.mesh()
    worst = 0.0
    for p in pts:
        val = reconstruct_u(grid, np.array([p[0], p[1], 0.0])).total.real
        exact = 0.0025 * np.exp(-np.pi * (p[0] ** 2 + p[1] ** 2) / 4.0)
        worst = max(worst, abs(val - exact) / 0.0025)
    return worst < 0.05, f"relative round-trip error {worst:.2g}"


def _direct():
    lat = Lattice2D(64.0, 32.0, 128, 64)
    u0 = InitialData.gaussian_dxx(lat, 0.01, 2.0)
    lin = evolve(u0, -1.0, 0.05, nonlinear=False).field.samples.real
    exact = linear_evolve(u0, -1.0).samples.real
    lerr = float(np.abs(lin - exact).max())
    drift = evolve(u0, -1.0, 0.05).diagnostics["l2_drift"]
    return lerr < 1e-10 and drift < 1e-6, f"linear step error {lerr:.2g}, L2 drift {drift:.2g}"


def _io(grid):
    try:
        tmp = tempfile.mkdtemp(prefix="kpii-selftest-")
        probe = os.path.join(tmp, "probe")
        open(probe, "wb").close()
        os.remove(probe)
    except OSError as exc:
        warnings.warn(f"I/O checks skipped: {exc}", RuntimeWarning, stacklevel=2)
        return None, "skipped (no writable temporary directory)"
    path = os.path.join(tmp, "s.kpsc")
    save_scattering(path, grid)
    back = load_scattering(path)
    gpath = os.path.join(tmp, "u.kpgrid")
    lat = Lattice2D.square(4.0, 8)
    from .lattice import ComplexField2D
    f = ComplexField2D(lat, np.arange(64).reshape(8, 8) * (1 + 1j))
    save_grid(gpath, f)
    ok = np.array_equal(back.transform, grid.transform) and np.array_equal(load_grid(gpath).samples, f.samples)
    for p in (path, gpath):
        os.remove(p)
    os.rmdir(tmp)
    return ok, "lossless round trip" if ok else "round trip changed the data"


def selftest(verbose=False):
    """Run every check; returns a list of CheckResult."""
    results = []

    def run(name, fn, *args):
        t0 = time.perf_counter()
        try:
            ok, detail = fn(*args)
        except Exception as exc:  # a crash is a failed check, not a crashed selftest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        r = CheckResult(name, bool(ok), detail, time.perf_counter() - t0, skipped=ok is None)
        if r.skipped:
            r.passed = True
        results.append(r)
        return r

    run("coordinates", _coordinates)
    run("airy_value", _airy_value)
    run("airy_continuity", _airy_continuity)
    u0, grid = _small_problem()
    run("scattering_reality", _reality, grid)
    run("round_trip", _round_trip, u0, grid)
    run("direct_solver", _direct)
    run("io", _io, grid)
    return results
