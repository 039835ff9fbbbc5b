import numpy as np
import pytest

from kpii_ist.chirp_quadrature import cauchy_t1, linear_field, with_error
from kpii_ist.coordinates import zeta_from_xi
from kpii_ist.errors import RealAxisUndefined
from kpii_ist.forward import InitialData, build_scattering_grid
from kpii_ist.inverse import apply_C, apply_T, dx1_m, neumann_m, plane_wave, reconstruct_lattice
from kpii_ist.lattice import Lattice2D
from kpii_ist.perturbative import second_order_terms
from kpii_ist.reconstruct import reconstruct_u


@pytest.fixture(scope="module")
def zero_grid(desk_lattice, spectral_lattice):
    return build_scattering_grid(InitialData.zero(desk_lattice), spectral_lattice)


@pytest.fixture(scope="module")
def disk():
    lat = Lattice2D.square(8.0, 256)
    xi1, xi2 = lat.mesh()
    return lat, (np.abs(zeta_from_xi(xi1, xi2)) < 1.0).astype(float)


def test_apply_T_examples(desk_grid, zero_grid):
    ones = np.ones(desk_grid.xi_lattice.shape)
    assert np.allclose(apply_T(desk_grid, ones, np.zeros(3)), desk_grid.scattering_samples(), atol=0, rtol=1e-15)
    assert np.all(apply_T(zero_grid, ones, np.array([1.0, 2.0, -3.0])) == 0)


def test_apply_T_conjugation_reflects_both_axes(desk_grid, rng):
    phi = rng.normal(size=desk_grid.xi_lattice.shape)
    a = apply_T(desk_grid, phi, np.zeros(3))
    b = apply_T(desk_grid, phi[::-1, ::-1], np.zeros(3), conj_flip=False)
    assert np.array_equal(a, b)


def test_plane_wave_unimodular(desk_grid):
    assert np.allclose(np.abs(plane_wave(desk_grid, np.array([3.0, -1.0, -20.0]))), 1.0, atol=1e-14)


def test_apply_C_disk(disk):
    lat, phi = disk
    assert abs(apply_C(phi, 0.0, lat)) < 1e-12
    assert abs(apply_C(np.zeros(lat.shape), 2 + 1j, lat)) == 0
    for lam in (2 + 1j, -1.5 - 0.5j, 0.3 + 1.6j):
        assert apply_C(phi, lam, lat) == pytest.approx(1 / lam, rel=2e-2)


def test_apply_C_disk_converges(disk):
    errs = []
    for n in (64, 128, 256):
        lat = Lattice2D.square(8.0, n)
        xi1, xi2 = lat.mesh()
        phi = (np.abs(zeta_from_xi(xi1, xi2)) < 1.0).astype(float)
        errs.append(abs(apply_C(phi, 2 + 1j, lat) - 1 / (2 + 1j)))
    assert errs[2] < errs[0]


def test_zero_data_inverse(zero_grid):
    batch = neumann_m(zero_grid, np.zeros(3))
    assert np.all(batch.values == 1) and batch.order == 0
    assert np.all(dx1_m(zero_grid, np.zeros(3))[0] == 0)
    v = reconstruct_u(zero_grid, np.array([1.0, 0.0, -10.0]))
    assert (v.u1, v.u20, v.u21) == (0, 0, 0)


def test_round_trip_at_x3_zero(desk_datum, desk_grid):
    pts = np.array([[0.0, 0.0, 0.0], [1.0, -0.5, 0.0], [-1.5, 1.0, 0.0], [0.3, 2.2, 0.0]])
    vals = reconstruct_lattice(desk_grid, pts)
    exact = 0.0025 * np.exp(-np.pi * (pts[:, 0] ** 2 + pts[:, 1] ** 2) / 4.0)
    got = np.array([v.total.real for v in vals])
    assert np.max(np.abs(got - exact)) / 0.0025 < 0.05
    assert max(v.imaginary_residue for v in vals) < 1e-12


def test_reconstruct_method_dispatch(desk_grid):
    assert reconstruct_u(desk_grid, np.zeros(3)).meta["method"] == "lattice"
    assert reconstruct_u(desk_grid, np.array([-30.0, 0.0, -10.0]), box=(16.0, 16.0)).meta["method"] == "quadrature"
    with pytest.raises(ValueError):
        reconstruct_u(desk_grid, np.zeros(3), method="magic")


def test_second_order_routes_agree_at_x3_zero(desk_grid):
    # both routes are first order in their resolution; at t = 0 they approach one value
    box = [second_order_terms(desk_grid, np.zeros(3), box=(L, L)).u20.real for L in (32.0, 48.0, 64.0)]
    assert abs(box[2] - box[1]) < abs(box[1] - box[0])
    lat = reconstruct_lattice(desk_grid, np.zeros((1, 3)))[0].u20.real
    assert abs(lat - box[2]) < 0.45 * abs(box[2])


def test_quadrature_u1_matches_lattice_where_resolved(desk_grid):
    x = np.array([0.5, 0.3, -0.05])
    lat = reconstruct_lattice(desk_grid, x[None])[0].u1
    quad, err = with_error(linear_field, desk_grid, x)
    # the lattice sum is the less accurate of the two; 4% is its truncation level here
    assert abs(quad - lat) < 0.04 * abs(quad)
    assert err < 1e-8 * abs(quad)


# (1 / 2 pi i) iint w / (xi2 - s) d xi at x = 0, lam = 0.37 - 0.61i, by nested scipy quad on the
# interpolated transform of the desk grid refined to 64 x 64 (frozen)
CT1_ORACLE = 8.641821818017885e-05 + 1.926828319817667e-04j


def test_cauchy_t1_against_oracle(desk_datum, desk_grid):
    lam = 0.37 - 0.61j
    assert abs(cauchy_t1(desk_grid, np.zeros(3), lam) - CT1_ORACLE) < 5e-4 * abs(CT1_ORACLE)
    # the lattice Cauchy sum approaches the same value, at first order in the spacing
    errs = []
    for grid in (desk_grid, build_scattering_grid(desk_datum, Lattice2D.square(2.5, 64))):
        phi = apply_T(grid, np.ones(grid.xi_lattice.shape), np.zeros(3))
        errs.append(abs(apply_C(phi, lam, grid.xi_lattice) - CT1_ORACLE))
    assert errs[1] < 0.5 * errs[0]
    with pytest.raises(RealAxisUndefined):
        cauchy_t1(desk_grid, np.zeros(3), 0.5)


def test_cauchy_t1_decays_like_one_over_lambda(desk_grid):
    x = np.array([-20.0, 0.0, -5.0])
    a = 6 * abs(cauchy_t1(desk_grid, x, 6 - 6j))
    b = 12 * abs(cauchy_t1(desk_grid, x, 12 - 12j))
    assert b == pytest.approx(a, rel=0.1)
