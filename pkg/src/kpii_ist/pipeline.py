"""End-to-end experiments: forward transform, direct evolution, reconstruction,
leading-order asymptotics and their comparison along a ray of the cone.

Every stage writes through a single owner (the calling thread) and visits
points in a fixed order, so identical configurations give byte-identical
files whatever the thread count.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import DecayFit, decay_fit, leading_order, ray_point
from .config import ExperimentConfig
from .direct import EvolutionState, evolve
from .errors import KPIIError
from .forward import InitialData, build_scattering_grid
from .io import load_grid, save_grid, save_scattering
from .lattice import Lattice2D
from .reconstruct import reconstruct_u
from .scattering import ScatteringGrid

log = logging.getLogger(__name__)


# -- inputs ----------------------------------------------------------------

def make_datum(cfg: ExperimentConfig, lattice: Lattice2D) -> InitialData:
    """The configured initial datum sampled on ``lattice``."""
    if cfg.profile == "zero":
        return InitialData.zero(lattice)
    if cfg.profile == "file":
        fld = load_grid(cfg.datum_path).to_physical()
        if fld.lattice != lattice:
            raise KPIIError(f"datum file lattice {fld.lattice} differs from the requested {lattice}")
        return InitialData.from_samples(lattice, fld.samples, description=f"file {cfg.datum_path}")
    maker = {"gaussian": InitialData.gaussian, "gaussian_dx": InitialData.gaussian_dx,
             "gaussian_dxx": InitialData.gaussian_dxx}[cfg.profile]
    return maker(lattice, cfg.amplitude, cfg.width)


def physical_lattice(cfg):
    return Lattice2D.square(cfg.physical_length, cfg.physical_count)


def spectral_lattice(cfg):
    return Lattice2D.square(cfg.spectral_length, cfg.spectral_count)


def direct_lattice(cfg):
    def count(length):
        n = int(round(length / cfg.direct_spacing))
        return n + (n % 2)
    return Lattice2D(cfg.direct_length_1, cfg.direct_length_2, count(cfg.direct_length_1), count(cfg.direct_length_2))


def ray_positions(cfg):
    """[(t, t2, x)] in time-major order."""
    return [(t, t2, ray_point(cfg.a, t2, t)) for t in cfg.times for t2 in cfg.t2]


def _ordered_map(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- stages ----------------------------------------------------------------

def run_forward(cfg: ExperimentConfig, out_dir=None) -> ScatteringGrid:
    u0 = make_datum(cfg, physical_lattice(cfg))
    grid = build_scattering_grid(u0, spectral_lattice(cfg), tol=cfg.neumann_tol)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        save_scattering(os.path.join(out_dir, "scattering.kpsc"), grid)
    log.info("forward: reality violation %.3g, sup|s_c| %.3g",
             grid.meta.get("reality_violation", 0.0), grid.meta.get("sup_norm", 0.0))
    return grid


def run_evolve(cfg: ExperimentConfig, out_dir=None):
    """Direct solutions at every configured time, evolved segment by segment."""
    lat = direct_lattice(cfg)
    state_data = make_datum(cfg, lat)
    states = {}
    now = 0.0
    for t in cfg.times:
        st = evolve(state_data, -(t - now), cfg.dt, sponge=cfg.sponge)
        st = EvolutionState(st.field, -t, st.step, st.steps, st.diagnostics)
        states[t] = st
        state_data = InitialData.from_samples(lat, st.field.samples.real, description=f"state at t={t}")
        now = t
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            save_grid(os.path.join(out_dir, f"direct_t{t:g}.kpgrid"), st.field)
    return states


def run_reconstruct(cfg: ExperimentConfig, grid: ScatteringGrid | None = None, threads=1):
    grid = grid if grid is not None else run_forward(cfg)
    box = (cfg.second_order_box, cfg.second_order_box)
    return _ordered_map(lambda p: reconstruct_u(grid, p[2], box=box), ray_positions(cfg), threads)


def run_asymptote(cfg: ExperimentConfig, grid: ScatteringGrid | None = None):
    grid = grid if grid is not None else run_forward(cfg)
    return [leading_order(grid, x, cfg.regime_threshold) for _, _, x in ray_positions(cfg)]


# -- comparison ------------------------------------------------------------

@dataclass
class ComparisonRow:
    t: float
    t2: float
    x: tuple
    u_direct: float | None = None
    u_reconstructed: float | None = None
    u_leading: float | None = None
    failure: str = ""

    @property
    def residual_reconstructed(self):
        if self.u_direct is None or self.u_reconstructed is None:
            return None
        return abs(self.u_direct - self.u_reconstructed)

    @property
    def residual_leading(self):
        if self.u_direct is None or self.u_leading is None:
            return None
        return abs(self.u_direct - self.u_leading)


@dataclass
class ComparisonReport:
    rows: list
    fits: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    COLUMNS = ("t", "t2", "x1", "x2", "x3", "u_direct", "u_reconstructed", "u_leading",
               "residual_reconstructed", "residual_leading", "failure")

    def ray_norm(self, t, which="reconstructed"):
        """max over the ray points at time t of the chosen residual."""
        vals = [getattr(r, f"residual_{which}") for r in self.rows if r.t == t]
        if not vals or any(v is None for v in vals):
            return None
        return max(vals)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("# " + " ".join(f"{k}={v}" for k, v in sorted(self.meta.items())) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.COLUMNS)
            for r in self.rows:
                w.writerow([_fmt(r.t), _fmt(r.t2), *(_fmt(c) for c in r.x), _fmt(r.u_direct),
                            _fmt(r.u_reconstructed), _fmt(r.u_leading), _fmt(r.residual_reconstructed),
                            _fmt(r.residual_leading), r.failure])

    def write_plot_data(self, out_dir):
        """One whitespace-separated file per ray point: t and the residuals, linear and log10."""
        paths = []
        for t2 in sorted({r.t2 for r in self.rows}):
            rows = [r for r in self.rows if r.t2 == t2]
            path = os.path.join(out_dir, f"residuals_t2_{t2:+g}.dat")
            with open(path, "w") as fh:
                fh.write("# t residual_leading residual_reconstructed log10_t log10_residual_leading\n")
                for r in rows:
                    rl, rr = r.residual_leading, r.residual_reconstructed
                    logs = (f"{np.log10(r.t):.17g} {np.log10(rl):.17g}" if rl else "nan nan")
                    fh.write(f"{_fmt(r.t)} {_fmt(rl)} {_fmt(rr)} {logs}\n")
            paths.append(path)
        return paths


def _fmt(v):
    if v is None:
        return "nan"
    return f"{float(v):.17g}"


def _fit_or_none(samples):
    try:
        return decay_fit(samples)
    except KPIIError as exc:
        log.info("decay fit skipped: %s", exc)
        return None


def run_compare(cfg: ExperimentConfig, out_dir=None, threads=1, grid=None, states=None) -> ComparisonReport:
    """Direct, reconstructed and leading-order values at every ray point.

    Any stage failure is recorded in the row's ``failure`` column and the run
    continues.
    """
    rows = [ComparisonRow(t, t2, tuple(float(c) for c in x)) for t, t2, x in ray_positions(cfg)]
    try:
        grid = grid if grid is not None else run_forward(cfg, out_dir)
    except KPIIError as exc:
        grid = None
        for r in rows:
            r.failure = f"forward:{type(exc).__name__}"
    try:
        states = states if states is not None else run_evolve(cfg)
    except KPIIError as exc:
        states = None
        for r in rows:
            r.failure = (r.failure + " " if r.failure else "") + f"direct:{type(exc).__name__}"
    if states is not None:
        for r in rows:
            r.u_direct = states[r.t].value_at(r.x[0], r.x[1])
    if grid is not None:
        box = (cfg.second_order_box, cfg.second_order_box)

        def ist(r):
            try:
                rec = reconstruct_u(grid, np.array(r.x), box=box)
                return float(rec.total.real), None
            except KPIIError as exc:
                return None, f"reconstruct:{type(exc).__name__}"

        def lead(r):
            try:
                return float(leading_order(grid, np.array(r.x), cfg.regime_threshold).real), None
            except KPIIError as exc:
                return None, f"leading:{type(exc).__name__}"

        for r, (val, err) in zip(rows, _ordered_map(ist, rows, threads)):
            r.u_reconstructed = val
            if err:
                r.failure = (r.failure + " " if r.failure else "") + err
        for r in rows:
            r.u_leading, err = lead(r)
            if err:
                r.failure = (r.failure + " " if r.failure else "") + err
    fits = {}
    for t2 in cfg.t2:
        samples = [(r.t, r.residual_leading) for r in rows if r.t2 == t2 and r.residual_leading is not None]
        fits[t2] = _fit_or_none(samples) if len(samples) == len(cfg.times) else None
    meta = {"config": cfg.digest(), "version": __version__, "physical": f"{cfg.physical_count}@{cfg.physical_length:g}",
            "spectral": f"{cfg.spectral_count}@{cfg.spectral_length:g}", "direct": "x".join(map(str, direct_lattice(cfg).shape)),
            "dt": f"{cfg.dt:g}", "a": f"{cfg.a:g}"}
    report = ComparisonReport(rows, fits, meta)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        report.write_csv(os.path.join(out_dir, "report.csv"))
        report.write_plot_data(out_dir)
    return report


def fit_summary(fit: DecayFit | None):
    return "n/a" if fit is None else f"slope {fit.slope:.3f}"
