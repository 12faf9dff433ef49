"""Estimating stable parameters from samples and testing goodness of fit."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from . import stable
from .errors import DegenerateEcfError, InvalidArgumentError
from .stable import StableParams

ECF_GRID = np.round(np.arange(1, 11) * 0.1, 12)
KS_CRIT_1PCT = 1.628
ALPHA_CEILING = 2.2


@dataclass
class EcfFit:
    alpha_hat: float
    sigma_hat: float
    t_grid: list
    r2: float
    n: int
    boundary: bool = False
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GofReport:
    ks_stat: float
    ks_critical_1pct: float
    n: int
    passed: bool
    ad_stat: float | None = None
    n_other: int | None = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _abs_ecf(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    ty = np.outer(t, y)
    return np.hypot(np.cos(ty).mean(axis=1), np.sin(ty).mean(axis=1))


def ecf_fit_symmetric(samples, location: float = 0.0, grid=ECF_GRID) -> EcfFit:
    """Fit ``alpha`` and ``sigma`` from the modulus of the empirical c.f.

    Centered samples are divided by their median absolute value ``m`` and
    ``log(-log|phi_hat(t)|)`` is regressed on ``log t`` over ``grid``: the
    slope estimates ``alpha`` and the intercept ``alpha log(sigma / m)``.
    The modulus ignores skewness, so the scale estimate is valid for
    skewed laws too.
    """
    x = np.asarray(samples, dtype=float) - location
    n = x.size
    if n < 1000:
        raise InvalidArgumentError(f"ECF fit needs at least 1000 samples, got {n}")
    m = float(np.median(np.abs(x)))
    if not m > 0.0:
        raise DegenerateEcfError("centered samples are (mostly) zero; |phi_hat| = 1 everywhere")
    y = x / m
    t = np.asarray(grid, dtype=float)
    phi = _abs_ecf(y, t)
    bad = (phi >= 1.0) | (phi <= 0.0)
    if bad.any():
        # too close to 1 means t too small; too close to 0 means t too large
        t = t * (2.0 if (phi >= 1.0).any() else 0.5)
        phi = _abs_ecf(y, t)
        if ((phi >= 1.0) | (phi <= 0.0)).any():
            raise DegenerateEcfError(
                f"|phi_hat| left (0, 1) on the rescaled grid: {phi.tolist()}")
    L = np.log(t)
    Y = np.log(-np.log(phi))
    slope, intercept = np.polyfit(L, Y, 1)
    resid = Y - (slope * L + intercept)
    ss = float(((Y - Y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss if ss > 0 else 1.0
    alpha_hat = float(slope)
    boundary = alpha_hat > 2.0
    alpha_hat = min(max(alpha_hat, 1e-6), ALPHA_CEILING)
    sigma_hat = m * math.exp(intercept / alpha_hat)
    return EcfFit(alpha_hat, sigma_hat, (t / m).tolist(), r2, n, boundary)


def ecf_scale_fixed_alpha(samples, location: float, alpha: float, grid=ECF_GRID) -> float:
    """Scale from the ECF modulus with ``alpha`` held fixed."""
    x = np.asarray(samples, dtype=float) - location
    m = float(np.median(np.abs(x)))
    if not m > 0.0:
        raise DegenerateEcfError("centered samples are (mostly) zero")
    t = np.asarray(grid, dtype=float)
    phi = _abs_ecf(x / m, t)
    if ((phi >= 1.0) | (phi <= 0.0)).any():
        raise DegenerateEcfError("|phi_hat| left (0, 1)")
    return m * float(np.exp(np.mean(np.log(-np.log(phi)) / alpha - np.log(t))))


def levy_scale_from_median(samples, location: float) -> float:
    """Stable scale of a Levy law (alpha 1/2, beta 1) matched at the median.

    The Levy median sits at ``mu + c / (2 erfcinv(1/2)^2)``.
    """
    med = float(np.median(np.asarray(samples, dtype=float))) - location
    if not med > 0.0:
        raise InvalidArgumentError("Levy fit needs a median above the location")
    c = 2.0 * med * float(special.erfcinv(0.5)) ** 2
    return c / stable.LEVY_SCALE_PER_SIGMA


def hill_estimator(samples, k: int | None = None, location: float = 0.0) -> float:
    """Hill tail index from the ``k`` largest ``|samples - location|``.

    ``k`` defaults to ``n^(2/3)``.
    """
    mags = np.abs(np.asarray(samples, dtype=float) - location)
    n = mags.size
    if k is None:
        k = int(n ** (2.0 / 3.0))
    k = int(k)
    if k < 10 or k >= n / 2:
        raise InvalidArgumentError(f"need 10 <= k < n/2, got k={k}, n={n}")
    top = -np.partition(-mags, k)[: k + 1]
    top.sort()
    top = top[::-1]
    if top[k] <= 0.0:
        raise InvalidArgumentError("non-positive magnitudes among the top order statistics")
    h = float(np.mean(np.log(top[:k])) - math.log(top[k]))
    return 1.0 / h


def _anderson_darling(F: np.ndarray) -> float:
    n = F.size
    F = np.clip(F, 1e-300, 1.0 - 1e-16)
    i = np.arange(1, n + 1)
    return float(-n - np.mean((2 * i - 1) * (np.log(F) + np.log1p(-F[::-1]))))


def ks_one_sample(samples, p, with_ad: bool = True) -> GofReport:
    """KS distance to ``p`` (a :class:`StableParams` or any CDF callable)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 100:
        raise InvalidArgumentError(f"KS test needs at least 100 samples, got {n}")
    F = np.asarray(stable.cdf(p, x) if isinstance(p, StableParams) else p(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
    crit = KS_CRIT_1PCT / math.sqrt(n)
    ad = _anderson_darling(F) if with_ad else None
    return GofReport(d, crit, n, d < crit, ad)


def ks_two_sample(a_samples, b_samples) -> GofReport:
    a = np.sort(np.asarray(a_samples, dtype=float))
    b = np.sort(np.asarray(b_samples, dtype=float))
    na, nb = a.size, b.size
    if na == 0 or nb == 0:
        raise InvalidArgumentError("two-sample KS needs non-empty inputs")
    if na < 100 or nb < 100:
        raise InvalidArgumentError(f"two-sample KS needs >= 100 per sample, got {na} and {nb}")
    pts = np.concatenate([a, b])
    d = float(np.max(np.abs(np.searchsorted(a, pts, side="right") / na
                            - np.searchsorted(b, pts, side="right") / nb)))
    crit = KS_CRIT_1PCT * math.sqrt((na + nb) / (na * nb))
    return GofReport(d, crit, na, d < crit, None, nb)
