# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops; see kernels.py for the numpy reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport M_PI, sqrt, fabs
from scipy.special.cython_special cimport wofz

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double cimag(double complex)
    double creal(double complex)

cnp.import_array()


def chirp_pole_sum(double[::1] xi1, double complex[:, ::1] coef, double[::1] eta, double rho,
                   double t, double x2, double complex lam, bint pole):
    """sum_k coef[n,k] * int exp(-(y-eta_k)^2/(2 rho^2) - i B y^2 + i gamma y) / (y - s)^pole dy."""
    cdef Py_ssize_t n = xi1.shape[0], K = eta.shape[0], i, k
    cdef double complex[::1] out = np.zeros(n, dtype=np.complex128)
    cdef double inv2r2 = 0.5 / (rho * rho)
    cdef double gamma = 2.0 * M_PI * x2
    cdef double x, B, sig
    cdef double complex A, sA, s, b, mu, E, Z, val, acc, I = 1j
    cdef double complex spi = sqrt(M_PI)
    for i in range(n):
        x = xi1[i]
        B = 1.5 * M_PI * t / x
        A = inv2r2 + I * B
        sA = csqrt(A)
        s = 2.0 * M_PI * I * x * x + 2.0 * x * lam
        sig = 1.0 if cimag(s) > 0 else -1.0
        acc = 0.0
        for k in range(K):
            if coef[i, k] == 0:
                continue
            b = eta[k] / (rho * rho) + I * gamma
            mu = b / (2.0 * A)
            E = -eta[k] * eta[k] * inv2r2 + b * b / (4.0 * A)
            if not pole:
                val = spi / sA * cexp(E)
            else:
                Z = sig * sA * (s - mu)
                if cimag(Z) >= 0:
                    val = I * M_PI * sig * cexp(E) * wofz(Z)
                else:
                    val = I * M_PI * sig * (2.0 * cexp(E - Z * Z) - cexp(E) * wofz(-Z))
            acc = acc + coef[i, k] * val
        out[i] = acc
    return np.asarray(out)


def box_second_order(double[::1] k1, double[::1] k2, double complex[::1] amp, double floor):
    """Dense bilinear sums for the second-order reconstruction terms.

    For each node i (frequency xi_i) with lambda = zeta(-xi_i):
        C_i = -sum_j amp_j / p_lambda(eta_j),  D_i = -sum_j 2 pi i eta1_j amp_j / p_lambda(eta_j)
    and returns (sum_i amp_i C_i, sum_i amp_i D_i / (2 pi i xi1_i)).
    """
    cdef Py_ssize_t M = k1.shape[0], i, j
    cdef double x1, x2, e1, e2, zr, zi, den, twopi = 2.0 * M_PI
    cdef double complex c_acc, d_acc, term, u20 = 0, u21 = 0, I = 1j
    for i in range(M):
        x1 = k1[i]
        x2 = k2[i]
        c_acc = 0
        d_acc = 0
        for j in range(M):
            e1 = k1[j]
            e2 = k2[j]
            zr = twopi * x1 * e1 * (x1 + e1)
            zi = x1 * e2 - x2 * e1
            den = zr * zr + zi * zi
            if den <= floor:
                continue
            # -1/p = xi1 / (2 pi Z) = xi1 conj(Z) / (2 pi |Z|^2)
            term = amp[j] * x1 * (zr - I * zi) / (twopi * den)
            c_acc = c_acc + term
            d_acc = d_acc + twopi * I * e1 * term
        u20 = u20 + amp[i] * c_acc
        u21 = u21 + amp[i] * d_acc / (twopi * I * x1)
    return complex(u20), complex(u21)
