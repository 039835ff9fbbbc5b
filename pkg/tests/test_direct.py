import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kpii_ist.direct import (
    SpectralBox, dispersion_symbol, evolve, linear_evolve, nonlinear_term, phi_functions, zero_mass,
)
from kpii_ist.errors import CFLViolation
from kpii_ist.forward import InitialData
from kpii_ist.lattice import ComplexField2D, Lattice2D, Space


@pytest.fixture(scope="module")
def box_lattice():
    return Lattice2D(64.0, 32.0, 128, 64)


@pytest.fixture(scope="module")
def datum(box_lattice):
    return InitialData.gaussian_dxx(box_lattice, 0.01, 2.0)


def test_dispersion_symbol():
    assert dispersion_symbol(1.0, 0.0) == pytest.approx(-2j * np.pi ** 3)
    assert dispersion_symbol(0.5, 1.0) == pytest.approx(1j * (-2 * np.pi ** 3 / 8 + 3 * np.pi))
    with pytest.raises(ValueError):
        dispersion_symbol(0.0, 1.0)


@given(st.floats(0.01, 3), st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_dispersion_is_odd_and_imaginary(xi1, xi2):
    a, b = dispersion_symbol(xi1, xi2), dispersion_symbol(-xi1, -xi2)
    assert a.real == 0 and b == pytest.approx(-a, rel=1e-14, abs=1e-12)


def test_nonlinear_term_of_constant(box_lattice):
    u = ComplexField2D(box_lattice, np.full(box_lattice.shape, 0.3 + 0j), Space.PHYSICAL)
    assert np.abs(nonlinear_term(u).samples).max() < 1e-15


def test_phi_functions_match_closed_forms():
    z = np.array([-3.0 + 0.5j, 0.7j, 2.0 - 1j, -40j])
    p1, p2, p3 = phi_functions(z)
    assert np.allclose(p1, (np.exp(z) - 1) / z, rtol=1e-12)
    assert np.allclose(p2, (np.exp(z) - 1 - z) / z ** 2, rtol=1e-10)
    assert np.allclose(p3, (np.exp(z) - 1 - z - z ** 2 / 2) / z ** 3, rtol=1e-8)
    q1, q2, q3 = phi_functions(np.array([0j]))
    assert np.allclose([q1[0], q2[0], q3[0]], [1, 0.5, 1 / 6], rtol=1e-12)


def test_zero_data(box_lattice):
    st_ = evolve(InitialData.zero(box_lattice), -2.0, 0.1)
    assert np.all(st_.field.samples == 0)
    assert np.all(linear_evolve(InitialData.zero(box_lattice), -2.0).samples == 0)


@pytest.mark.parametrize("scheme", ["hochbruck-ostermann", "cox-matthews"])
def test_linear_step_is_exact(datum, scheme):
    a = evolve(datum, -1.5, 0.05, nonlinear=False, scheme=scheme).field.samples.real
    b = linear_evolve(datum, -1.5).samples.real
    assert np.abs(a - b).max() < 1e-10


def test_linear_evolve_is_unitary(datum):
    before = np.sum(datum.samples ** 2)
    after = np.sum(linear_evolve(datum, -7.0).samples.real ** 2)
    assert after == pytest.approx(before, rel=1e-12)


def test_single_mode_rotates(box_lattice):
    k1, k2 = 3, 2
    x1, x2 = box_lattice.mesh()
    xi1, xi2 = k1 / box_lattice.length_1, k2 / box_lattice.length_2
    u0 = InitialData.from_samples(box_lattice, np.cos(2 * np.pi * (xi1 * x1 + xi2 * x2)))
    out = linear_evolve(u0, -0.8).samples.real
    W = (dispersion_symbol(xi1, xi2) / 1j).real
    assert np.allclose(out, np.cos(2 * np.pi * (xi1 * x1 + xi2 * x2) + W * -0.8), atol=1e-12)


def test_value_at_interpolates():
    # spacing 0.25 puts the Gaussian spectrum at Nyquist below 1e-20
    datum = InitialData.gaussian_dxx(Lattice2D(32.0, 16.0, 128, 64), 0.01, 2.0)
    st_ = evolve(datum, -0.0, 0.1, nonlinear=False)
    x1, x2 = datum.lattice.mesh()
    assert st_.value_at(x1[70, 40], x2[70, 40]) == pytest.approx(datum.samples[70, 40], abs=1e-15)
    exact = 0.01 * (1 - 2 * np.pi * 0.3 ** 2 / 4) * np.exp(-np.pi * (0.3 ** 2 + 0.1 ** 2) / 4)
    assert st_.value_at(0.3, 0.1) == pytest.approx(exact, abs=1e-12)


def test_l2_drift_and_time_reversal(datum):
    fwd = evolve(datum, -2.0, 0.05)
    assert fwd.diagnostics["l2_drift"] < 1e-6
    back = evolve(InitialData.from_samples(datum.lattice, fwd.field.samples.real), 2.0, 0.05)
    assert np.abs(back.field.samples.real - datum.samples).max() < 1e-8 * 0.01


def test_checkpoints_are_kept(datum):
    st_ = evolve(datum, -1.0, 0.1, checkpoints=(-0.5,))
    assert set(st_.diagnostics["states"]) == {-0.5}


def test_cfl_violation(box_lattice):
    big = InitialData.gaussian_dxx(box_lattice, 5.0, 2.0)
    with pytest.raises(CFLViolation):
        evolve(big, -1.0, 0.5)


def test_sponge_absorbs_and_flags(datum):
    free = evolve(datum, -4.0, 0.05)
    damped = evolve(datum, -4.0, 0.05, sponge=8.0)
    norm = lambda s: np.sum(s.field.samples.real ** 2)  # noqa: E731
    assert norm(damped) < norm(free)
    assert isinstance(damped.diagnostics["contained"], bool)
    assert 0 <= damped.diagnostics["boundary_fraction"] <= 1


def test_zero_mass_removes_line_means(box_lattice):
    u0 = InitialData.gaussian(box_lattice, 0.01, 2.0)
    fixed, removed = zero_mass(u0)
    assert removed > 0
    assert np.abs(fixed.samples.mean(axis=0)).max() < 1e-17


def test_step_halving_order(box_lattice):
    u0 = InitialData.gaussian_dx(Lattice2D(32.0, 16.0, 64, 32), 0.05, 2.0)
    ref = evolve(u0, -0.5, 0.0025).field.samples.real
    errs = [np.abs(evolve(u0, -0.5, dt).field.samples.real - ref).max() for dt in (0.025, 0.0125)]
    assert errs[0] / errs[1] > 8  # at least third order on this coarse box; the 16x check is in the acceptance suite


def test_spectral_box_layout(box_lattice):
    box = SpectralBox(box_lattice)
    assert box.xi1.shape == (128, 33)
    assert np.all(box.rate[box.zero_row] == 0)
    assert not box.dealias[64].any()
