import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kpii_ist.errors import RealAxisUndefined
from kpii_ist.forward import InitialData, build_scattering_grid
from kpii_ist.lattice import Lattice2D
from kpii_ist.representation import (
    amplitude_F, build_mfrak0, ct1_crosscheck, ct1_representation, unit_kernel,
)


@pytest.fixture(scope="module")
def small():
    lat = Lattice2D.square(16.0, 64)
    u0 = InitialData.gaussian(lat, 0.0025, 2.0)
    return u0, build_scattering_grid(u0, Lattice2D.square(2.5, 32)), build_mfrak0(u0)


def test_mfrak0_zero_and_small(desk_lattice, small):
    k = build_mfrak0(InitialData.zero(desk_lattice))
    assert np.all(k.mfrak0.samples == 1)
    u0, _, kern = small
    assert 0 < kern.deviation < 10 * u0.epsilon0


def test_mfrak0_deviation_scales_linearly(small):
    u0, _, kern = small
    double = build_mfrak0(u0.scaled(2.0)).deviation
    assert double / kern.deviation == pytest.approx(2.0, rel=0.02)


def test_amplitude_F_examples():
    lam = 0.2 + 0.8j
    b = lam.imag / (2 * np.pi)
    # X = x2' + 3 t lR > 0: support |xi''| < b
    assert amplitude_F(1.0, lam, 1.0, 2 * b) == 0
    assert amplitude_F(1.0, lam, 1.0, b) == 0  # theta(0) = 0 exactly at the root
    assert amplitude_F(1.0, lam, 1e-12, 0.999999 * b) == pytest.approx(-np.pi, rel=1e-6)
    assert amplitude_F(1.0, lam, -1e-12 - 0.6, 1.000001 * b) == pytest.approx(np.pi, rel=1e-6)


@given(st.floats(0.1, 10), st.complex_numbers(max_magnitude=3).filter(lambda z: abs(z.imag) > 1e-3),
       st.floats(-20, 20), st.floats(-2, 2))
@settings(max_examples=200, deadline=None)
def test_amplitude_F_bounded(t, lam, x2p, s):
    assert abs(amplitude_F(t, lam, x2p, s)) <= np.pi


def test_representation_zero_datum(desk_lattice, small):
    zero = InitialData.zero(desk_lattice)
    _, S, _ = small
    x = np.array([-3.0, 0.0, -1.0])
    assert ct1_representation(zero, unit_kernel(zero), x, 0.3 + 0.4j) == 0
    zgrid = build_scattering_grid(zero, Lattice2D.square(2.5, 32))
    disc, rep, direct = ct1_crosscheck(zgrid, zero, x, 0.3 + 0.4j, kernel=unit_kernel(zero))
    assert (disc, rep, direct) == (0.0, 0, 0)
    with pytest.raises(RealAxisUndefined):
        ct1_representation(zero, unit_kernel(zero), x, 0.3)


def test_representation_defect_shrinks_as_t_goes_to_zero(small):
    # the residue evaluation of the xi2 integral becomes exact as t -> 0
    u0, S, kern = small
    disc = [ct1_crosscheck(S, u0, np.array([-0.5, 0.0, -t]), 0.3 + 0.4j, kernel=kern)[0] for t in (1e-2, 1e-3)]
    assert disc[1] < 0.5 * disc[0]
    assert disc[1] < 1e-2
