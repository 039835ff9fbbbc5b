import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kpii_ist.asymptotics import (
    CutoffSpec, Regime, cone_frame, decay_fit, fit_oscillation, gradient_floor, leading_order, psi, ray_point,
    stationary_points, u1_direct, u1_split,
)
from kpii_ist.coordinates import grad_S0
from kpii_ist.errors import (DegeneratePhase, InsufficientData, InvalidCone, OutsideAsymptoticRegime)
from kpii_ist.forward import InitialData, build_scattering_grid
from kpii_ist.lattice import Lattice2D


@pytest.fixture(scope="module")
def zero_grid(desk_lattice, spectral_lattice):
    return build_scattering_grid(InitialData.zero(desk_lattice), spectral_lattice)


def test_cone_frame_examples():
    f = cone_frame((-3.0, 0.0, -1.0))
    assert (f.t, f.t1, f.t2, f.a, f.r, f.regime) == (1.0, -3.0, 0.0, -3.0, 1.0, Regime.NEG)
    f = cone_frame((3.0, 0.0, -1.0))
    assert f.a == 3.0 and f.r == 1.0 and f.regime is Regime.POS
    assert cone_frame((0.5, 0.0, -1.0)).regime is Regime.NEAR_ZERO
    with pytest.raises(InvalidCone):
        cone_frame((1.0, 0.0, 0.0))


@given(st.floats(-6, 6).filter(lambda a: abs(a) > 1e-3), st.floats(-2, 2), st.floats(0.5, 100))
@settings(max_examples=80, deadline=None)
def test_ray_point_inverts_cone_frame(a, t2, t):
    f = cone_frame(ray_point(a, t2, t), threshold=0.0)
    assert f.a == pytest.approx(a, abs=1e-9 * (1 + abs(a)))
    assert f.t2 == pytest.approx(t2, abs=1e-12)
    assert f.t == pytest.approx(t)


def test_stationary_points():
    assert stationary_points(-3.0) == [1j, -1j]
    assert stationary_points(3.0) == [1.0, -1.0]
    with pytest.raises(DegeneratePhase):
        stationary_points(0.0)


@given(st.floats(-8, 8).filter(lambda a: abs(a) > 1e-2))
@settings(max_examples=60, deadline=None)
def test_stationary_points_zero_gradient(a):
    for z in stationary_points(a):
        g1, g2 = grad_S0(a, z)
        assert abs(g1) < 1e-12 * (1 + abs(a)) and abs(g2) < 1e-12 * (1 + abs(a))


def test_leading_order_trivial_cases(zero_grid, desk_grid):
    assert leading_order(zero_grid, ray_point(-3, 0, 10)) == 0
    assert leading_order(desk_grid, ray_point(3, 0, 10)) == 0
    with pytest.raises(OutsideAsymptoticRegime):
        leading_order(desk_grid, ray_point(0.2, 0, 10))


def test_leading_order_is_real_and_scales_like_one_over_t(desk_grid):
    # 4 t r^3 = 2 pi k at t = pi k / 2: same phase, so the value halves exactly when t doubles
    v1 = leading_order(desk_grid, ray_point(-3, 0, 10 * np.pi))
    v2 = leading_order(desk_grid, ray_point(-3, 0, 20 * np.pi))
    assert abs(v1.imag) < 1e-12 * abs(v1)
    assert v2 / v1 == pytest.approx(0.5, rel=1e-9)


def test_u1_direct_zero_and_cone(zero_grid, desk_grid):
    assert u1_direct(zero_grid, ray_point(-3, 0, 10)).value == 0
    with pytest.raises(InvalidCone):
        u1_direct(desk_grid, (0.0, 0.0, -0.5))


def test_u1_direct_halves_when_t_doubles(desk_grid):
    a = u1_direct(desk_grid, ray_point(-3, 0, 10 * np.pi))
    b = u1_direct(desk_grid, ray_point(-3, 0, 20 * np.pi))
    assert abs(b.value) / abs(a.value) == pytest.approx(0.5, rel=0.15)
    assert a.error < 1e-3 * abs(a.value)


def test_u1_split_partition(desk_grid):
    x = ray_point(-3, 0, 10)
    u11, u12 = u1_split(desk_grid, x, CutoffSpec(enabled=False))
    assert u11 == 0 and u12 == u1_direct(desk_grid, x).value
    u11, u12 = u1_split(desk_grid, x)
    assert u11 + u12 == pytest.approx(u1_direct(desk_grid, x).value, rel=1e-12)
    assert u11 != 0


def test_psi_plateau_and_support():
    s = np.linspace(-2, 2, 4001)
    v = psi(s)
    assert np.all(v[np.abs(s) <= 0.5] == 1) and np.all(v[np.abs(s) >= 1] == 0)
    assert np.all(np.diff(v[s >= 0]) <= 0)


def test_gradient_floor_positive():
    rng = np.random.default_rng(1)
    z = rng.uniform(-3, 3, 2000) + 1j * rng.uniform(-3, 3, 2000)
    assert gradient_floor(-3.0, z) > 0


def test_decay_fit_examples():
    ts = [10, 20, 40, 80]
    assert decay_fit([(t, 3.0 / t) for t in ts]).slope == pytest.approx(-1.0, abs=1e-6)
    assert decay_fit([(t, 3.0 * t ** (-4 / 3)) for t in ts]).slope == pytest.approx(-4 / 3, abs=1e-9)
    assert decay_fit([(t, 2.0) for t in ts]).slope == pytest.approx(0.0, abs=1e-12)


def test_decay_fit_guards():
    with pytest.raises(InsufficientData):
        decay_fit([(10, 1.0), (20, 0.5), (40, 0.25)])
    with pytest.raises(InsufficientData):
        decay_fit([(10, 1.0), (12, 0.5), (14, 0.25), (16, 0.1)])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        with pytest.raises(InsufficientData):
            decay_fit([(10, 1.0), (20, 0.0), (40, 0.25), (80, 0.1)])
    assert caught


@given(st.floats(-3, 3), st.floats(0.1, 10))
@settings(max_examples=40, deadline=None)
def test_decay_fit_recovers_power(p, c):
    assert decay_fit([(t, c * t ** p) for t in (5, 10, 20, 40, 80)]).slope == pytest.approx(p, abs=1e-9)


def test_fit_oscillation_synthetic():
    ts = np.linspace(10, 12, 200)
    fit = fit_oscillation(ts, 0.7 * np.cos(4.0 * ts + 0.3))
    assert fit.frequency == pytest.approx(4.0, rel=1e-8)
    assert fit.amplitude == pytest.approx(0.7, rel=1e-8)
