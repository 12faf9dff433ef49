"""Stable laws: characteristic function, sampler, CDF, density, quantiles.

Parameterization
----------------
``S(alpha, beta, sigma, mu)`` has characteristic function

    phi(t) = exp(i mu t - sigma^alpha |t|^alpha (1 - i beta sign(t) tan(pi alpha / 2)))

for ``alpha != 1`` and ``exp(i mu t - sigma |t|)`` for the symmetric
``alpha = 1`` law.  This is the form in which a LePage series
``sum eps_k G_k^(-1/alpha)`` lands with scale
``sigma^alpha = E|eps|^alpha / c_alpha`` and, for ``alpha != 1``, is
strictly stable when ``mu = 0``.  It coincides with scipy's ``S1``
parameterization of ``levy_stable``.  Nolan's ``S0`` form differs by the
shift ``mu0 = mu + beta sigma tan(pi alpha / 2)``.

Supported parameter sets are ``beta = 0`` with any ``alpha`` in (0, 2],
and the Levy law ``alpha = 1/2, beta = 1``.

Numerical CDF and density
-------------------------
Closed forms cover ``alpha = 2`` (normal with variance ``2 sigma^2``),
the Cauchy law, and the Levy law.  Other symmetric laws are inverted
from the characteristic function with the Gil-Pelaez formula; for speed
the CDF is read from a cubic spline over ``asinh(z)`` that is filled by
exact inversions once per ``alpha`` and cached.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, optimize, special

from .errors import InvalidArgumentError, NumericToleranceError

# Levy scale c (density sqrt(c/2pi) x^-1.5 exp(-c/2x)) per unit stable sigma.
# Calibrated against Gil-Pelaez inversion; see tests/test_stable.py.
LEVY_SCALE_PER_SIGMA = 1.0

CDF_TOL = 1e-6
PDF_TOL = 1e-8
_GP_EPSABS = 1e-11

# spline table over w = asinh(z), z >= 0, for symmetric laws
_TABLE_STEP = 0.02
_TABLE_ZMAX = 1e6


@dataclass(frozen=True)
class StableParams:
    alpha: float
    beta: float = 0.0
    sigma: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        sigma, mu = float(self.sigma), float(self.mu)
        if not 0.0 < alpha <= 2.0:
            raise InvalidArgumentError(f"alpha must lie in (0, 2], got {alpha}")
        if not -1.0 <= beta <= 1.0:
            raise InvalidArgumentError(f"beta must lie in [-1, 1], got {beta}")
        if not (sigma > 0.0 and math.isfinite(sigma)):
            raise InvalidArgumentError(f"sigma must be positive and finite, got {sigma}")
        if not math.isfinite(mu):
            raise InvalidArgumentError(f"mu must be finite, got {mu}")
        if alpha == 2.0:
            beta = 0.0
        if not (beta == 0.0 or (alpha == 0.5 and beta == 1.0)):
            raise InvalidArgumentError(
                f"unsupported stable parameters alpha={alpha}, beta={beta}: "
                "only beta=0, or alpha=1/2 with beta=1 (Levy)")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mu", mu)

    @property
    def is_levy(self) -> bool:
        return self.beta == 1.0

    def standardize(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sigma": self.sigma, "mu": self.mu}

    @classmethod
    def from_dict(cls, d) -> "StableParams":
        return cls(d["alpha"], d.get("beta", 0.0), d.get("sigma", 1.0), d.get("mu", 0.0))


def _skew_factor(alpha: float, beta: float) -> float:
    # exactly zero when beta == 0, so the alpha -> 1 pole never enters
    if beta == 0.0:
        return 0.0
    return beta * math.tan(math.pi * alpha / 2.0)


def char_fn(p: StableParams, t):
    """Characteristic function evaluated at ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    if p.alpha == 1.0:
        expo = -p.sigma * at
        phase = p.mu * t
    else:
        scaled = (p.sigma * at) ** p.alpha
        expo = -scaled
        phase = p.mu * t + _skew_factor(p.alpha, p.beta) * np.sign(t) * scaled
    out = np.exp(expo) * np.exp(1j * phase)
    return out[()] if out.ndim == 0 else out


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    arrivals = getattr(rng, "arrivals", None)
    if arrivals is not None:
        return arrivals
    return np.random.default_rng(rng)


def sample_cms(p: StableParams, rng, size=None):
    """Chambers-Mallows-Stuck variates.

    Draws ``size`` uniforms, then ``size`` unit exponentials, from ``rng``
    (a Generator, a :class:`~rcarstable.streams.Stream`, or a seed) and
    returns ``sigma * X + mu`` with ``X`` standard.
    """
    gen = _as_generator(rng)
    n = 1 if size is None else size
    V = np.pi * (gen.random(n) - 0.5)
    W = gen.standard_exponential(n)
    a = p.alpha
    if a == 1.0:
        X = np.tan(V)
    else:
        zeta = _skew_factor(a, p.beta)
        B = math.atan(zeta) / a
        S = (1.0 + zeta * zeta) ** (1.0 / (2.0 * a))
        aVB = a * (V + B)
        X = (S * np.sin(aVB) / np.cos(V) ** (1.0 / a)
             * (np.cos(V - aVB) / W) ** ((1.0 - a) / a))
    out = p.sigma * X + p.mu
    return float(out[0]) if size is None else out


def cms_batch(p: StableParams, n: int, seed: int, block: int = 4096) -> np.ndarray:
    """``n`` variates built from fixed-size blocks with derived streams.

    Block ``j`` uses the stream for ``(seed, "cms", j)``, so output does not
    depend on how blocks are distributed over workers.
    """
    from .streams import block_generator

    out = np.empty(n)
    for j, start in enumerate(range(0, n, block)):
        stop = min(n, start + block)
        out[start:stop] = sample_cms(p, block_generator(seed, "cms", j), block)[: stop - start]
    return out


# ---------------------------------------------------------------- quadrature

def _quad(f, lo, hi, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(f, lo, hi, full_output=1, **kw)
    return res[0], res[1]


def _gil_pelaez_integral(alpha: float, beta: float, z: float):
    """Integral of Im(exp(-isz) psi(s)) / s over (0, inf) for the standard law.

    Returns ``(value, abserr)``.  For ``|z| <= 1`` the integral is taken in
    ``s``; beyond that in ``u = s|z|`` so every oscillatory tail has unit
    frequency and is handled by QUADPACK's Fourier routine (QAWF), whose
    cycle sums are accelerated by the epsilon algorithm.
    """
    k = _skew_factor(alpha, beta)
    if z == 0.0 and k == 0.0:
        return 0.0, 0.0
    sgn = 1.0 if z > 0 else -1.0
    if abs(z) <= 1.0:
        scale, freq, split = 1.0, abs(z), 1.0
    else:
        scale, freq, split = 1.0 / abs(z), 1.0, math.pi

    def damp(u):
        return math.exp(-((u * scale) ** alpha))

    def inner(u):
        su = u * scale
        return damp(u) * math.sin(k * su ** alpha - su * z) / u

    total, err = _quad(inner, 0.0, split, limit=400, epsabs=_GP_EPSABS, epsrel=1e-12)
    lim = dict(limlst=200, limit=400, epsabs=_GP_EPSABS)
    if k != 0.0:
        def f_cos(u):
            return damp(u) * math.sin(k * (u * scale) ** alpha) / u
        if freq == 0.0:
            v, e = _quad(f_cos, split, np.inf, limit=400, epsabs=_GP_EPSABS)
        else:
            v, e = _quad(f_cos, split, np.inf, weight="cos", wvar=freq, **lim)
        total += v
        err += e
    if freq != 0.0:
        def f_sin(u):
            return damp(u) * math.cos(k * (u * scale) ** alpha) / u
        v, e = _quad(f_sin, split, np.inf, weight="sin", wvar=freq, **lim)
        total -= sgn * v
        err += e
    return total, err


def gil_pelaez_cdf(p: StableParams, x: float, tol: float = CDF_TOL) -> float:
    """CDF at ``x`` by direct inversion of :func:`char_fn`.

    ``F(x) = 1/2 - (1/pi) * int_0^inf Im(exp(-itx) phi(t)) / t dt``.
    Raises :class:`NumericToleranceError` when the quadrature error
    estimate exceeds ``tol``.
    """
    z = float((x - p.mu) / p.sigma)
    val, err = _gil_pelaez_integral(p.alpha, p.beta, z)
    if not (math.isfinite(val) and err / math.pi <= tol):
        raise NumericToleranceError(
            f"Gil-Pelaez inversion missed tolerance {tol:g} at x={x!r}",
            {"x": x, "z": z, "params": p.to_dict(), "abserr": err / math.pi, "value": val})
    return min(1.0, max(0.0, 0.5 - val / math.pi))


def _tail_series(alpha: float, z: float, order: int):
    """Power series in ``z^-alpha`` for the standard symmetric law, ``z > 0``.

    ``order=0`` gives the density, ``order=1`` the survival function:

        (1/pi) sum_k (-1)^(k+1) Gamma(alpha k + 1 - order) / k! sin(pi alpha k / 2) z^-(alpha k + order')

    with ``order' = 1`` for the density and ``0`` for the survival function.
    Convergent for ``alpha < 1`` and asymptotic for ``alpha > 1``; summed
    while the term bounds (sine factor dropped) keep shrinking.  Returns
    ``(value, bound on the last term)``, a proxy for the truncation error.
    """
    total, last = 0.0, math.inf
    lz = math.log(z)
    for k in range(1, 400):
        g = alpha * k + 1.0 - order
        bound = math.exp(math.lgamma(g) - math.lgamma(k + 1.0) - g * lz) / math.pi
        if bound > last:
            break
        last = bound
        term = bound * math.sin(math.pi * alpha * k / 2.0)
        total += term if k % 2 else -term
        if bound < 1e-17 * abs(total):
            break
    return total, last


def _symmetric_density(alpha: float, z: float):
    """(1/pi) int_0^inf cos(sz) exp(-s^alpha) ds with its error estimate."""
    az = abs(z)
    if az <= 1.0:
        head = _quad(lambda s: math.cos(s * az) * math.exp(-(s ** alpha)),
                     0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
        if az < 0.05:
            # barely oscillating: a plain adaptive rule beats the Fourier one
            tail = _quad(lambda s: math.cos(s * az) * math.exp(-(s ** alpha)), 1.0, np.inf,
                         limit=400, epsabs=1e-13)
        else:
            tail = _quad(lambda s: math.exp(-(s ** alpha)), 1.0, np.inf,
                         weight="cos", wvar=az, limlst=200, limit=400, epsabs=1e-13)
        return (head[0] + tail[0]) / math.pi, (head[1] + tail[1]) / math.pi
    inv = 1.0 / az
    head = _quad(lambda u: math.cos(u) * math.exp(-((u * inv) ** alpha)),
                 0.0, math.pi, limit=400, epsabs=1e-13, epsrel=1e-12)
    tail = _quad(lambda u: math.exp(-((u * inv) ** alpha)), math.pi, np.inf,
                 weight="cos", wvar=1.0, limlst=200, limit=400, epsabs=1e-13)
    return inv * (head[0] + tail[0]) / math.pi, inv * (head[1] + tail[1]) / math.pi


def _density_standard(alpha: float, z: float, tol: float):
    """Tail series where it is accurate enough, inversion otherwise."""
    if abs(z) >= 2.0:
        v, bound = _tail_series(alpha, abs(z), 0)
        if bound < 0.1 * tol:
            return v, bound
    return _symmetric_density(alpha, z)


# ---------------------------------------------------------------- closed forms

def _levy_scale(p: StableParams) -> float:
    return LEVY_SCALE_PER_SIGMA * p.sigma


def levy_cdf(x, mu: float, c: float):
    x = np.asarray(x, dtype=float)
    d = x - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(d > 0, special.erfc(np.sqrt(c / (2.0 * np.where(d > 0, d, 1.0)))), 0.0)
    return out


def levy_pdf(x, mu: float, c: float):
    x = np.asarray(x, dtype=float)
    d = x - mu
    safe = np.where(d > 0, d, 1.0)
    out = np.sqrt(c / (2.0 * np.pi)) * safe ** -1.5 * np.exp(-c / (2.0 * safe))
    return np.where(d > 0, out, 0.0)


def _table_knots() -> np.ndarray:
    # uniform in asinh(z), refined geometrically below z = 0.1 where small
    # alpha makes the distribution function bend on very short scales
    fine = np.arcsinh(np.geomspace(1e-8, 0.1, 181))
    coarse = np.arange(fine[-1] + _TABLE_STEP, math.asinh(_TABLE_ZMAX) + _TABLE_STEP, _TABLE_STEP)
    return np.concatenate(([0.0], fine, coarse))


@functools.lru_cache(maxsize=32)
def _symmetric_table(alpha: float):
    w = _table_knots()
    unit = StableParams(alpha)
    F = np.array([gil_pelaez_cdf(unit, math.sinh(wi), tol=1e-9) for wi in w])
    return interpolate.CubicSpline(w, F, bc_type=("natural", "not-a-knot"))


def _symmetric_cdf_standard(alpha: float, z: np.ndarray) -> np.ndarray:
    az = np.abs(z)
    out = np.empty_like(az)
    inside = az <= _TABLE_ZMAX
    if inside.any():
        out[inside] = _symmetric_table(alpha)(np.arcsinh(az[inside]))
    unit = StableParams(alpha)
    for i in np.flatnonzero(~inside):
        sf, bound = _tail_series(alpha, float(az[i]), 1)
        out[i] = 1.0 - sf if bound < 0.1 * CDF_TOL else gil_pelaez_cdf(unit, float(az[i]))
    out = np.clip(out, 0.5, 1.0)
    return np.where(z < 0, 1.0 - out, out)


def cdf(p: StableParams, x):
    """Distribution function, absolute error at most ``CDF_TOL``."""
    x = np.asarray(x, dtype=float)
    if p.is_levy:
        out = levy_cdf(x, p.mu, _levy_scale(p))
    else:
        z = p.standardize(x)
        if p.alpha == 2.0:
            out = special.ndtr(z / math.sqrt(2.0))
        elif p.alpha == 1.0:
            out = 0.5 + np.arctan(z) / np.pi
        else:
            out = _symmetric_cdf_standard(p.alpha, np.atleast_1d(z)).reshape(z.shape)
    return out[()] if np.ndim(out) == 0 else out


def pdf(p: StableParams, x, tol: float = PDF_TOL):
    """Density, absolute error at most ``tol``."""
    x = np.asarray(x, dtype=float)
    if p.is_levy:
        out = levy_pdf(x, p.mu, _levy_scale(p))
    else:
        z = p.standardize(x)
        if p.alpha == 2.0:
            out = np.exp(-z * z / 4.0) / (2.0 * math.sqrt(math.pi)) / p.sigma
        elif p.alpha == 1.0:
            out = 1.0 / (np.pi * (1.0 + z * z)) / p.sigma
        else:
            flat = np.atleast_1d(z).ravel()
            vals = np.empty_like(flat)
            for i, zi in enumerate(flat):
                v, err = _density_standard(p.alpha, float(zi), tol)
                if not (math.isfinite(v) and err <= tol):
                    raise NumericToleranceError(
                        f"density inversion missed tolerance {tol:g}",
                        {"z": float(zi), "params": p.to_dict(), "abserr": err})
                vals[i] = max(v, 0.0)
            out = (vals / p.sigma).reshape(z.shape)
    return out[()] if np.ndim(out) == 0 else out


def quantile(p: StableParams, q, tol: float = 1e-8):
    """Inverse CDF by bracketing and Brent's method."""
    qs = np.asarray(q, dtype=float)
    if np.any(~((qs > 0.0) & (qs < 1.0))):
        raise InvalidArgumentError("quantile levels must lie strictly inside (0, 1)")
    out = np.array([_quantile_one(p, float(qi), tol) for qi in qs.ravel()]).reshape(qs.shape)
    return out[()] if out.ndim == 0 else out


def _quantile_one(p: StableParams, q: float, tol: float) -> float:
    if p.beta == 0.0 and q == 0.5:
        return p.mu

    def g(x):
        return float(cdf(p, x)) - q

    if p.is_levy:
        lo, hi = p.mu, p.mu + p.sigma
    else:
        lo, hi = p.mu - p.sigma, p.mu + p.sigma
    step = p.sigma
    while g(hi) < 0.0:
        lo, hi, step = hi, hi + 2.0 * step, 2.0 * step
    step = p.sigma
    while not p.is_levy and g(lo) > 0.0:
        lo, hi, step = lo - 2.0 * step, lo, 2.0 * step
    if lo == hi:
        return lo
    x = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(g(x)) > tol:
        raise NumericToleranceError(
            f"quantile root missed tolerance at q={q}", {"q": q, "x": x, "gap": g(x)})
    return x


def tabulate(p: StableParams, grid) -> np.ndarray:
    """Rows ``(x, pdf, cdf)`` over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    return np.column_stack([grid, pdf(p, grid), cdf(p, grid)])
