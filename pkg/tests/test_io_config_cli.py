import os
import struct
import subprocess
import sys
import warnings

import numpy as np
import pytest

from kpii_ist import cli, config, io, oscillatory
from kpii_ist.config import ExperimentConfig, LargeAmplitudeWarning, parse_config, resolve_threads
from kpii_ist.errors import ConfigError, FormatError
from kpii_ist.lattice import ComplexField2D, Lattice2D, Space
from kpii_ist.selftest import selftest


@pytest.fixture
def field():
    lat = Lattice2D(4.0, 2.0, 8, 4)
    rng = np.random.default_rng(3)
    return ComplexField2D(lat, rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4)), Space.SPECTRAL)


# -- binary formats ----------------------------------------------------------

def test_grid_round_trip(tmp_path, field):
    p = tmp_path / "f.kpgrid"
    io.save_grid(p, field)
    back = io.load_grid(p, expect_shape=(8, 4))
    assert back.lattice == field.lattice and back.space is Space.SPECTRAL
    assert np.array_equal(back.samples, field.samples)
    assert not os.path.exists(f"{p}.partial")


def test_grid_header_is_little_endian(tmp_path, field):
    p = tmp_path / "f.kpgrid"
    io.save_grid(p, field)
    blob = p.read_bytes()
    magic, version, n1, n2, l1, l2, tag = struct.unpack_from("<8sIIIddB", blob)
    assert (magic, version, n1, n2, l1, l2, tag) == (b"KPGRID1\0", 1, 8, 4, 4.0, 2.0, 1)
    assert len(blob) == struct.calcsize("<8sIIIddB") + 8 * 4 * 16
    first = np.frombuffer(blob, dtype="<c16", count=1, offset=struct.calcsize("<8sIIIddB"))[0]
    assert first == field.samples[0, 0]


def test_grid_format_errors(tmp_path, field):
    p = tmp_path / "f.kpgrid"
    io.save_grid(p, field)
    blob = p.read_bytes()
    cases = {
        "truncated": blob[:-5],
        "short header": blob[:10],
        "magic": b"XXXXXXXX" + blob[8:],
        "trailing": blob + b"\0",
        "version": blob[:8] + struct.pack("<I", 9) + blob[12:],
    }
    for name, bad in cases.items():
        q = tmp_path / f"{name}.kpgrid"
        q.write_bytes(bad)
        with pytest.raises(FormatError):
            io.load_grid(q)
    with pytest.raises(FormatError):
        io.load_grid(p, expect_shape=(4, 4))


def test_scattering_round_trip(tmp_path, desk_grid):
    p = tmp_path / "s.kpsc"
    io.save_scattering(p, desk_grid)
    back = io.load_scattering(p)
    assert np.array_equal(back.transform, desk_grid.transform)
    assert np.array_equal(back.smooth_part, desk_grid.smooth_part)
    assert back.evaluate(0.3 - 0.5j) == desk_grid.evaluate(0.3 - 0.5j)
    (tmp_path / "t.kpsc").write_bytes(p.read_bytes()[:-3])
    with pytest.raises(FormatError):
        io.load_scattering(tmp_path / "t.kpsc")
    with pytest.raises(FormatError):
        io.load_grid(p)  # wrong magic for the reader


# -- configuration -------------------------------------------------------------

def test_defaults_and_parse():
    assert parse_config("") == ExperimentConfig()
    cfg = parse_config("[ray]\na = -2\ntimes = 5, 10 20\n[run]\nthreads = 3\n")
    assert cfg.a == -2 and cfg.times == (5.0, 10.0, 20.0) and cfg.threads == 3
    assert cfg.digest() == parse_config("[ray]\na = -2\ntimes = 5 10 20\n").digest()
    assert cfg.digest() != ExperimentConfig().digest()


@pytest.mark.parametrize("text", [
    "[nope]\nx = 1\n",
    "[ray]\nspeed = 3\n",
    "[ray]\ntimes = 10, 5\n",
    "[ray]\ntimes = -1\n",
    "[datum]\nprofile = square\n",
    "[datum]\nprofile = file\n",
    "[physical]\ncount = 63\n",
    "[direct]\ndt = zero\n",
    "[direct]\ndt = 0\n",
    "not an ini file",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_large_amplitude_warns():
    with pytest.warns(LargeAmplitudeWarning):
        parse_config("[datum]\namplitude = 0.2\n")


def test_thread_precedence(monkeypatch):
    cfg = parse_config("[run]\nthreads = 2\n")
    monkeypatch.delenv("KPII_THREADS", raising=False)
    assert resolve_threads(None, cfg) == 2
    monkeypatch.setenv("KPII_THREADS", "5")
    assert resolve_threads(None, cfg) == 5
    assert resolve_threads(7, cfg) == 7
    monkeypatch.setenv("KPII_THREADS", "many")
    with pytest.raises(ConfigError):
        resolve_threads(None, cfg)


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigError):
        config.load_config(tmp_path / "missing.ini")


# -- command line ---------------------------------------------------------------

def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[ray]\nspeed = 1\n")
    assert cli.main(["forward", "--config", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert err.startswith("kpii: error code=2 kind=ConfigError message=")


def test_cli_io_error_exit_code(tmp_path, capsys):
    cfgp = tmp_path / "c.ini"
    cfgp.write_text(f"[datum]\nprofile = file\npath = {tmp_path / 'missing.kpgrid'}\n")
    assert cli.main(["forward", "--config", str(cfgp), "--out", str(tmp_path)]) == 4
    assert "code=4" in capsys.readouterr().err


def test_cli_numeric_error_exit_code(tmp_path, capsys):
    cfgp = tmp_path / "c.ini"
    cfgp.write_text("[datum]\namplitude = 40\n[physical]\ncount = 16\n[spectral]\ncount = 8\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LargeAmplitudeWarning)
        code = cli.main(["forward", "--config", str(cfgp), "--out", str(tmp_path)])
    assert code == 3
    assert "kind=NoContraction" in capsys.readouterr().err


def test_cli_forward_writes_file(tmp_path, capsys):
    cfgp = tmp_path / "c.ini"
    cfgp.write_text("[physical]\ncount = 32\n[spectral]\ncount = 16\n")
    assert cli.main(["forward", "--config", str(cfgp), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "scattering.kpsc").exists()
    assert "reality_violation" in capsys.readouterr().out


def test_cli_version_runs_as_module():
    out = subprocess.run([sys.executable, "-m", "kpii_ist.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "kpii" in out.stdout


# -- selftest --------------------------------------------------------------------

def test_selftest_passes():
    results = selftest()
    assert all(r.passed for r in results), [(r.name, r.detail) for r in results if not r.passed]
    assert {r.name for r in results} >= {"airy_continuity", "io", "round_trip", "direct_solver"}


def test_selftest_detects_corrupted_airy_switch(monkeypatch):
    monkeypatch.setattr(oscillatory, "Z_SWITCH", 1.5)
    results = {r.name: r for r in selftest()}
    assert not results["airy_continuity"].passed


def test_selftest_skips_io_without_write_access(monkeypatch):
    import tempfile

    def refuse(*a, **k):
        raise PermissionError("read-only file system")

    monkeypatch.setattr(tempfile, "mkdtemp", refuse)
    with pytest.warns(RuntimeWarning):
        results = {r.name: r for r in selftest()}
    assert results["io"].skipped and results["io"].passed


def test_cli_selftest_exit_codes(monkeypatch, capsys):
    assert cli.main(["selftest"]) == 0
    monkeypatch.setattr(oscillatory, "Z_SWITCH", 1.5)
    assert cli.main(["selftest"]) == 1
    assert "FAIL airy_continuity" in capsys.readouterr().out
