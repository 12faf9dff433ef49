"""LePage-series limit and the stable law it predicts.

After normalization the process converges to ``1 + Z`` where

    Z = sum_{k>=1} eps_k / G_k^a

is a LePage series.  For symmetric innovations with ``E|eps|^alpha < inf``
and ``alpha = 1/a``, ``Z`` is symmetric alpha-stable with scale

    sigma = (E|eps|^alpha / c_alpha)^a,
    c_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)),  c_1 = 2/pi.

Skewed innovations still give a stable limit but its parameters are only
fitted from data here; :func:`predict_limit_law` refuses them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidArgumentError, SymmetryHypothesisError, TruncationError
from .export import write_column, write_json
from .innovations import InnovationSpec
from .parallel import run_chunked
from .process import check_exponent
from .stable import StableParams
from .streams import as_stream, derive

MIN_TRUNCATION = 100
DEFAULT_TRUNCATION = 10_000


def c_alpha(alpha: float) -> float:
    """Normalizing constant linking ``E|eps|^alpha`` to the stable scale.

    Equal to ``1 / int_0^inf x^-alpha sin(x) dx``; continuous at
    ``alpha = 1`` where it takes the value ``2/pi``.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 2), got {alpha}")
    # with d = 1 - alpha: cos(pi alpha / 2) = sin(pi d / 2), which keeps
    # full relative accuracy as d -> 0 where the quotient tends to 2/pi
    d = 1.0 - alpha
    if d == 0.0:
        return 2.0 / math.pi
    return d / (math.gamma(1.0 + d) * math.sin(math.pi * d / 2.0))


def fractional_abs_moment(innov: InnovationSpec, p: float) -> float:
    """Closed-form ``E|eps|^p`` for ``p`` in (0, 2)."""
    p = float(p)
    if not 0.0 < p < 2.0:
        raise InvalidArgumentError(f"moment order must lie in (0, 2), got {p}")
    fam, h = innov.family, innov.param
    if fam == "rademacher":
        return 1.0
    if fam == "uniform_sym":
        return h ** p / (p + 1.0)
    if fam == "gaussian_std":
        return 2.0 ** (p / 2.0) * math.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)
    if fam == "exponential_pos":
        return math.gamma(1.0 + p) / h ** p
    if fam == "point_mass":
        return abs(h) ** p
    raise InvalidArgumentError(f"no moment available for {fam}")


def fractional_abs_moment_mc(innov: InnovationSpec, p: float, n: int = 10**6,
                             seed: int = 0) -> tuple[float, float]:
    """Monte Carlo ``E|eps|^p`` with its standard error."""
    if n < 2:
        raise InvalidArgumentError("need at least two samples")
    gen = derive(seed, "aux", 0).innovations
    x = np.abs(kernels.draw_innovations(gen, innov.code, innov.param, n)) ** p
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n))


@dataclass(frozen=True)
class LimitPrediction:
    """Stable law predicted for ``lim X_n / n^a`` under symmetric innovations."""

    alpha: float
    beta: float
    sigma: float
    mu: float
    c_alpha: float
    frac_moment: float

    @property
    def params(self) -> StableParams:
        return StableParams(self.alpha, self.beta, self.sigma, self.mu)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sigma": self.sigma, "mu": self.mu,
                "c_alpha": self.c_alpha, "frac_moment": self.frac_moment}


def predict_limit_law(a: float, innov: InnovationSpec) -> LimitPrediction:
    a = check_exponent(a)
    if not innov.symmetric:
        raise SymmetryHypothesisError(
            f"{innov.label()} innovations are not symmetric; "
            "the limit scale is only available by fitting")
    if innov.degenerate:
        raise InvalidArgumentError("zero innovations give a point-mass limit, not a stable law")
    alpha = 1.0 / a
    c = c_alpha(alpha)
    m = fractional_abs_moment(innov, alpha)
    return LimitPrediction(alpha, 0.0, (m / c) ** a, 1.0, c, m)


def required_truncation(a: float, tol: float) -> int:
    """Smallest ``K`` with ``K^-(a - 1/2) <= tol``.

    The series tail past ``K`` has variance of order
    ``E eps^2 * K^(1 - 2a)``, so its typical size is ``K^-(a - 1/2)``.  This
    needs ``E eps^2 < inf`` and is a heuristic, not a bound.
    """
    a = check_exponent(a)
    if not tol > 0:
        raise InvalidArgumentError("tolerance must be positive")
    expo = -math.log(tol) / (a - 0.5)
    if expo > 60:  # beyond any feasible depth
        return 2**63 - 1
    return max(1, math.ceil(math.exp(expo) - 1e-9))


def default_truncation(a: float, tol: float = 1e-2) -> int:
    return max(DEFAULT_TRUNCATION, required_truncation(a, tol))


@dataclass(frozen=True)
class LePageConfig:
    a: float
    K: int = DEFAULT_TRUNCATION
    innov: InnovationSpec = field(default_factory=lambda: InnovationSpec("rademacher"))
    tol: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", check_exponent(self.a))
        if int(self.K) != self.K or self.K < MIN_TRUNCATION:
            raise InvalidArgumentError(f"truncation K must be an integer >= {MIN_TRUNCATION}")
        object.__setattr__(self, "K", int(self.K))
        if self.tol is not None:
            need = required_truncation(self.a, self.tol)
            if self.K < need:
                raise TruncationError(
                    f"K={self.K} is below the {need} terms needed for tolerance {self.tol:g} "
                    f"at a={self.a}")

    @property
    def alpha(self) -> float:
        return 1.0 / self.a

    def to_dict(self) -> dict:
        return {"a": self.a, "alpha": self.alpha, "K": self.K,
                "innov": self.innov.to_dict(), "tol": self.tol}


def sample_lepage(cfg: LePageConfig, rng) -> float:
    """One truncated series ``sum_{k<=K} eps_k / G_k^a`` on fresh arrivals."""
    stream = as_stream(rng)
    return kernels.lepage_sum(stream.arrivals, stream.innovations,
                              cfg.innov.code, cfg.innov.param, cfg.a, cfg.K)


def sample_limit(cfg: LePageConfig, rng) -> float:
    """One draw of the full limit ``1 + Z``."""
    return 1.0 + sample_lepage(cfg, rng)


def lepage_range(cfg: LePageConfig, seed: int, start: int, stop: int,
                 shift: float = 0.0) -> np.ndarray:
    """Draws ``start..stop-1``; draw ``i`` uses stream ``(seed, "lepage", i)``."""
    out = np.empty(stop - start)
    for j, i in enumerate(range(start, stop)):
        out[j] = shift + sample_lepage(cfg, derive(seed, "lepage", i))
    return out


def lepage_batch(cfg: LePageConfig, n_draws: int, seed: int, shift: float = 0.0,
                 workers: int = 1) -> np.ndarray:
    return run_chunked(lepage_range, n_draws, workers, cfg, seed, shift=shift)


def write_lepage_batch(path, samples, cfg: LePageConfig, seed: int, shift: float = 0.0):
    """Write one value per line plus a JSON sidecar ``<path>.json``."""
    path = write_column(path, "value", samples)
    meta = {"config": cfg.to_dict(), "seed": seed, "n_draws": len(samples), "shift": shift,
            "samples_file": path.name}
    try:
        meta["prediction"] = predict_limit_law(cfg.a, cfg.innov).to_dict()
    except (SymmetryHypothesisError, InvalidArgumentError):
        meta["prediction"] = None
    write_json(path.with_suffix(path.suffix + ".json"), meta)
    return path

