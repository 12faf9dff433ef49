# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: recursion steps and truncated LePage sums.

Draws come from the same numpy generators, in the order the numpy
fallback in ``_pycore`` consumes them. Uniform-to-exponential transforms
go through numpy's vectorized ``log`` so both backends see the same bits;
only the sequential parts run as C loops.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport pow
from libc.stdint cimport uint64_t
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal

import numpy as np

BACKEND = "cython"

cdef enum:
    RADEMACHER = 0
    GAUSSIAN = 1
    UNIFORM_SYM = 2
    EXPONENTIAL_POS = 3
    POINT_MASS = 4


cdef bitgen_t* _bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef struct SignBits:
    uint64_t word
    int left


cdef inline double _innovation(bitgen_t* bg, int family, double param,
                               SignBits* bits) noexcept nogil:
    cdef double u
    if family == RADEMACHER:
        # one raw 64-bit word feeds 64 signs, least significant bit first
        if bits.left == 0:
            bits.word = bg.next_uint64(bg.state)
            bits.left = 64
        u = 1.0 if (bits.word & 1) else -1.0
        bits.word >>= 1
        bits.left -= 1
        return u
    elif family == GAUSSIAN:
        return random_standard_normal(bg)
    elif family == UNIFORM_SYM:
        u = bg.next_double(bg.state)
        return -param + (2.0 * param) * u
    return param


cdef inline double _powa(double x, double a) noexcept nogil:
    if a == 2.0:
        return x * x
    if a == 1.0:
        return x
    return pow(x, a)


def draw_increments(gen, Py_ssize_t n):
    """``n`` unit-rate exponential increments ``-log(1 - U)``."""
    # 1 - U is exact for U on the 2^-53 grid
    return -np.log(1.0 - gen.random(n))


def draw_innovations(gen, int family, double param, Py_ssize_t n):
    """``n`` innovation draws of the given family code."""
    if family == EXPONENTIAL_POS:
        return -np.log(1.0 - gen.random(n)) / param
    cdef bitgen_t* bg = _bitgen(gen)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t i
    cdef SignBits bits
    bits.left = 0
    with gen.bit_generator.lock, nogil:
        for i in range(n):
            view[i] = _innovation(bg, family, param, &bits)
    return out


def rcar_recursion(const double[::1] increments, const double[::1] eps, double a):
    """Run ``X_k = (G_k/G_{k-1})^a X_{k-1} + eps_k`` with ``X_0 = 1, G_0 = 1``.

    Returns ``(G, X)`` where ``G`` has length n and ``X`` length n + 1.
    """
    cdef Py_ssize_t n = increments.shape[0]
    if eps.shape[0] != n:
        raise ValueError("increments and eps must have equal length")
    G = np.empty(n, dtype=np.float64)
    X = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] g = G
    cdef double[::1] x = X
    cdef double prev = 1.0
    cdef double cur = 0.0
    cdef double xk = 1.0
    cdef Py_ssize_t k
    x[0] = 1.0
    with nogil:
        for k in range(n):
            cur = cur + increments[k]
            xk = _powa(cur / prev, a) * xk + eps[k]
            g[k] = cur
            x[k + 1] = xk
            prev = cur
    return G, X


def rcar_terminal(gen_arrivals, gen_innovations, int family, double param,
                  double a, Py_ssize_t n):
    """Terminal ``X_n / n^a`` of one path."""
    cdef const double[::1] inc = draw_increments(gen_arrivals, n)
    cdef const double[::1] eps = draw_innovations(gen_innovations, family, param, n)
    cdef double prev = 1.0
    cdef double cur = 0.0
    cdef double xk = 1.0
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            cur = cur + inc[k]
            xk = _powa(cur / prev, a) * xk + eps[k]
            prev = cur
    return xk / _powa(<double> n, a)


def lepage_sum(gen_arrivals, gen_innovations, int family, double param,
               double a, Py_ssize_t K):
    """One truncated LePage sum ``sum_{k<=K} eps_k / G_k^a``."""
    cdef const double[::1] inc = draw_increments(gen_arrivals, K)
    cdef const double[::1] eps = draw_innovations(gen_innovations, family, param, K)
    cdef double g = 0.0
    cdef double total = 0.0
    cdef Py_ssize_t k
    with nogil:
        for k in range(K):
            g = g + inc[k]
            total = total + eps[k] / _powa(g, a)
    return total
