import os
import subprocess
import sys

import numpy as np
import pytest

from kpii_ist import kernels

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")


def chirp_case(seed=0, n=300, k=24):
    rng = np.random.default_rng(seed)
    xi1 = rng.uniform(0.005, 1.2, n) * rng.choice([-1, 1], n)
    coef = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    eta = np.linspace(-1.2, 1.2, k)
    return xi1, coef, eta, eta[1] - eta[0]


@compiled
@pytest.mark.parametrize("pole", [False, True])
@pytest.mark.parametrize("lam", [0.3 + 0.7j, -0.4 - 1.1j])
@pytest.mark.parametrize("t", [0.5, 20.0, 80.0])
def test_chirp_backends_agree(pole, lam, t):
    xi1, coef, eta, rho = chirp_case()
    a = kernels.chirp_pole_sum(xi1, coef, eta, rho, t, -1.3, lam, pole)
    b = kernels.chirp_pole_sum_numpy(xi1, coef, eta, rho, t, -1.3, lam, pole)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


@compiled
def test_box_backends_agree():
    rng = np.random.default_rng(4)
    m = 700
    k1 = rng.uniform(0.01, 1, m) * rng.choice([-1, 1], m)
    k2 = rng.uniform(-1, 1, m)
    amp = (rng.normal(size=m) + 1j * rng.normal(size=m)) / m
    a = kernels.box_second_order(k1, k2, amp, 1e-14)
    b = kernels.box_second_order_numpy(k1, k2, amp, 1e-14)
    assert abs(a[0] - b[0]) <= 1e-12 * abs(b[0]) and abs(a[1] - b[1]) <= 1e-12 * abs(b[1])


def test_chirp_sum_without_pole_is_gaussian_integral():
    # one Gaussian in xi2 of width rho centred at eta: closed form of int exp(-(xi2-eta)^2/2rho^2 + i g xi2 - i B xi2^2)
    xi1 = np.array([0.4])
    rho, eta, t, x2 = 0.3, np.array([0.1]), 2.0, 0.7
    got = kernels.chirp_pole_sum_numpy(xi1, np.ones((1, 1)), eta, rho, t, x2, 0j, False)[0]
    s = np.linspace(-6, 6, 200001)
    f = np.exp(-(s - eta[0]) ** 2 / (2 * rho ** 2) + 2j * np.pi * x2 * s - 1.5j * np.pi * t * s ** 2 / xi1[0])
    ref = np.trapezoid(f, s)
    assert abs(got - ref) < 1e-9 * abs(ref)


def test_backend_override_env():
    env = dict(os.environ, KPII_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "import kpii_ist; print(kpii_ist.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "numpy"
