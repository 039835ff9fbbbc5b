"""Command line entry point ``kpii``.

Exit codes: 0 ok, 1 selftest failure, 2 configuration error, 3 numerical
failure, 4 I/O error.  Every failure prints one line to stderr of the form

    kpii: error code=<n> kind=<ExceptionName> message="<text>"
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__, pipeline
from .config import ExperimentConfig, load_config, resolve_threads
from .errors import ConfigError, KPIIError
from .kernels import BACKEND

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4


def _error_line(code, exc):
    msg = str(exc).replace('"', "'").replace("\n", " ")
    return f'kpii: error code={code} kind={type(exc).__name__} message="{msg}"'


def _parser():
    p = argparse.ArgumentParser(prog="kpii", description="KP-II inverse scattering laboratory")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("forward", "compute and store scattering data"),
                       ("evolve", "run the direct solver to every configured time"),
                       ("reconstruct", "reconstruct u at the ray points"),
                       ("asymptote", "leading-order values at the ray points"),
                       ("compare", "direct vs reconstructed vs leading order"),
                       ("selftest", "reduced-resolution health checks")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", metavar="PATH")
        s.add_argument("--out", metavar="DIR", default=".")
        s.add_argument("--threads", metavar="N", type=int)
        s.add_argument("--verbose", action="store_true")
    return p


def _write_columns(path, header, rows):
    with open(path, "w") as fh:
        fh.write("# " + header + "\n")
        for r in rows:
            fh.write(" ".join(f"{float(v):.17g}" for v in r) + "\n")


def _run(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    threads = resolve_threads(args.threads, cfg)
    out = args.out
    if args.command != "selftest":
        os.makedirs(out, exist_ok=True)

    if args.command == "forward":
        grid = pipeline.run_forward(cfg, out)
        print(json.dumps({"reality_violation": grid.meta["reality_violation"],
                          "sup_norm": grid.meta["sup_norm"], "file": os.path.join(out, "scattering.kpsc")}))
    elif args.command == "evolve":
        states = pipeline.run_evolve(cfg, out)
        for t, st in states.items():
            print(json.dumps({"t": t, "steps": st.steps, "boundary_fraction": st.diagnostics["boundary_fraction"]}))
    elif args.command == "reconstruct":
        vals = pipeline.run_reconstruct(cfg, threads=threads)
        rows = [(t, t2, *x, v.u1.real, v.u20.real, v.u21.real, v.total.real)
                for (t, t2, x), v in zip(pipeline.ray_positions(cfg), vals)]
        _write_columns(os.path.join(out, "reconstruct.dat"), "t t2 x1 x2 x3 u1 u20 u21 u", rows)
    elif args.command == "asymptote":
        vals = pipeline.run_asymptote(cfg)
        rows = [(t, t2, *x, np.real(v)) for (t, t2, x), v in zip(pipeline.ray_positions(cfg), vals)]
        _write_columns(os.path.join(out, "asymptote.dat"), "t t2 x1 x2 x3 u_leading", rows)
    elif args.command == "compare":
        report = pipeline.run_compare(cfg, out, threads=threads)
        for t2, fit in report.fits.items():
            print(f"t2={t2:g}: {pipeline.fit_summary(fit)}")
        if any(r.failure for r in report.rows):
            print(f"{sum(bool(r.failure) for r in report.rows)} rows carry failure tags", file=sys.stderr)
    elif args.command == "selftest":
        from .selftest import selftest
        results = selftest()
        for r in results:
            status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
            print(f"{status} {r.name}: {r.detail} ({r.seconds:.2f} s)")
        if not all(r.passed for r in results):
            return EXIT_SELFTEST
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(_error_line(EXIT_CONFIG, exc), file=sys.stderr)
        return EXIT_CONFIG
    except KPIIError as exc:
        code = exc.exit_code
        print(_error_line(code, exc), file=sys.stderr)
        return code
    except OSError as exc:
        print(_error_line(EXIT_IO, exc), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
