"""Pure numpy fallback for the compiled kernels in ``_core.pyx``.

Same signatures, same draws, same arithmetic order. Draws are bit-identical
to the compiled backend; recursion results agree to rounding of ``pow``.
"""

import numpy as np

BACKEND = "python"

RADEMACHER, GAUSSIAN, UNIFORM_SYM, EXPONENTIAL_POS, POINT_MASS = range(5)


def _powa(x, a):
    if a == 2.0:
        return x * x
    if a == 1.0:
        return x
    return np.power(x, a)


_SHIFTS = np.arange(64, dtype=np.uint64)


def draw_increments(gen, n):
    return -np.log(1.0 - gen.random(n))


def rademacher_signs(gen, n):
    """Signs from raw 64-bit words, least significant bit first."""
    words = gen.bit_generator.random_raw(-(-n // 64))
    bits = (words[:, None] >> _SHIFTS) & np.uint64(1)
    return np.where(bits.ravel()[:n] == 1, 1.0, -1.0)


def draw_innovations(gen, family, param, n):
    if family == RADEMACHER:
        return rademacher_signs(gen, n)
    if family == GAUSSIAN:
        return gen.standard_normal(n)
    if family == UNIFORM_SYM:
        return -param + (2.0 * param) * gen.random(n)
    if family == EXPONENTIAL_POS:
        return -np.log(1.0 - gen.random(n)) / param
    return np.full(n, float(param))


def rcar_recursion(increments, eps, a):
    increments = np.ascontiguousarray(increments, dtype=np.float64)
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    n = increments.shape[0]
    if eps.shape[0] != n:
        raise ValueError("increments and eps must have equal length")
    G = np.cumsum(increments)
    prev = np.empty(n)
    prev[0] = 1.0
    prev[1:] = G[:-1]
    coef = _powa(G / prev, a)
    X = np.empty(n + 1)
    X[0] = xk = 1.0
    # sequential by nature; plain floats are faster than numpy scalars here
    for k, (c, e) in enumerate(zip(coef.tolist(), eps.tolist()), start=1):
        xk = c * xk + e
        X[k] = xk
    return G, X


def rcar_terminal(gen_arrivals, gen_innovations, family, param, a, n):
    inc = draw_increments(gen_arrivals, n)
    eps = draw_innovations(gen_innovations, family, param, n)
    _, X = rcar_recursion(inc, eps, a)
    return float(X[-1] / _powa(float(n), a))


def lepage_sum(gen_arrivals, gen_innovations, family, param, a, K):
    G = np.cumsum(draw_increments(gen_arrivals, K))
    eps = draw_innovations(gen_innovations, family, param, K)
    # sequential summation to mirror the compiled loop
    return float(np.add.accumulate(eps / _powa(G, a))[-1])
