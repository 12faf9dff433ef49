"""Poisson arrivals and the random-coefficient recursion.

The process is

    X_0 = 1,    X_k = (G_k / G_{k-1})^a X_{k-1} + eps_k,    k >= 1,

with ``G_k`` the arrival times of a unit-rate Poisson process and i.i.d.
innovations ``eps_k``.  We take ``G_0 = 1``: it is the only choice under
which the unrolled sum ends in ``G_n^a X_0``, which gives

    X_n / n^a = (G_n / n)^a (1 + sum_{k<=n} eps_k / G_k^a).

:func:`simulate_recursive` runs the first form step by step and
:func:`simulate_closed_form` evaluates the second; fed the same
:class:`~rcarstable.streams.Stream` they see identical draws.  Each
stream holds two generators.  The exponential increment of step ``k`` is
the ``k``-th value of ``stream.arrivals`` and ``eps_k`` the ``k``-th
innovation from ``stream.innovations``.  Keeping the two sequences on
separate generators lets both backends draw in blocks without changing
which number lands where.

A Poisson process of intensity ``lam`` is the unit process with time
rescaled by ``1/lam``; the normalized limit does not depend on it, so only
``lam = 1`` is provided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError
from .export import write_csv, write_json
from .innovations import InnovationSpec
from .streams import Stream, as_stream

MIN_EXPONENT = 0.5 + 1e-12


def check_exponent(a: float) -> float:
    a = float(a)
    if not a > MIN_EXPONENT or not np.isfinite(a):
        raise InvalidArgumentError(f"exponent a must exceed 1/2, got {a}")
    return a


def _check_steps(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"step count must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True, eq=False)
class ArrivalSequence:
    """Arrival times ``G_1 < ... < G_n`` and the increments that built them."""

    times: np.ndarray
    increments: np.ndarray

    @property
    def n(self) -> int:
        return int(self.times.shape[0])

    @classmethod
    def from_increments(cls, increments) -> "ArrivalSequence":
        inc = np.ascontiguousarray(increments, dtype=float)
        if inc.ndim != 1 or inc.size == 0:
            raise InvalidArgumentError("need a non-empty 1-d array of increments")
        if np.any(inc <= 0):
            raise InvalidArgumentError("arrival increments must be positive")
        return cls(np.cumsum(inc), inc)


@dataclass(frozen=True, eq=False)
class ProcessPath:
    """One realization: ``raw`` holds ``X_0..X_n``, ``normalized`` ``X_k/k^a`` for ``k >= 1``."""

    a: float
    arrivals: ArrivalSequence
    raw: np.ndarray
    normalized: np.ndarray
    innovations: np.ndarray

    @property
    def n(self) -> int:
        return self.arrivals.n

    @property
    def terminal(self) -> float:
        return float(self.normalized[-1])

    def rows(self):
        k = np.arange(1, self.n + 1)
        return zip(k, self.arrivals.times, self.raw[1:], self.normalized)

    def to_csv(self, path):
        return write_csv(path, ["k", "G_k", "X_k", "X_k_over_k_pow_a"], self.rows())

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "n": self.n,
            "G0": 1.0,
            "X0": float(self.raw[0]),
            "G": self.arrivals.times,
            "X": self.raw[1:],
            "normalized": self.normalized,
        }

    def to_json(self, path):
        return write_json(path, self.to_dict())


def sample_arrivals(n: int, rng) -> ArrivalSequence:
    """Cumulative sums of ``n`` unit exponentials ``-log(U)``, ``U = 1 - random()``."""
    n = _check_steps(n)
    stream = as_stream(rng)
    return ArrivalSequence.from_increments(kernels.draw_increments(stream.arrivals, n))


def _draws(n: int, innov: InnovationSpec, stream: Stream):
    arrivals = sample_arrivals(n, stream)
    eps = kernels.draw_innovations(stream.innovations, innov.code, innov.param, n)
    return arrivals, eps


def _powa(x, a):
    if a == 2.0:
        return x * x
    if a == 1.0:
        return x
    return np.power(x, a)


def simulate_recursive(a: float, n: int, innov: InnovationSpec, rng) -> ProcessPath:
    """Step the recursion forward ``n`` times from ``X_0 = 1``."""
    a = check_exponent(a)
    n = _check_steps(n)
    arrivals, eps = _draws(n, innov, as_stream(rng))
    _, X = kernels.rcar_recursion(arrivals.increments, eps, a)
    k = np.arange(1, n + 1, dtype=float)
    return ProcessPath(a, arrivals, X, X[1:] / _powa(k, a), eps)


def simulate_closed_form(a: float, n: int, innov: InnovationSpec, rng) -> ProcessPath:
    """Evaluate ``(G_k/k)^a (1 + sum_{j<=k} eps_j / G_j^a)`` for every ``k``."""
    a = check_exponent(a)
    n = _check_steps(n)
    arrivals, eps = _draws(n, innov, as_stream(rng))
    G = arrivals.times
    k = np.arange(1, n + 1, dtype=float)
    normalized = _powa(G / k, a) * (1.0 + np.cumsum(eps / _powa(G, a)))
    raw = np.concatenate(([1.0], normalized * _powa(k, a)))
    return ProcessPath(a, arrivals, raw, normalized, eps)


def terminal_value(a: float, n: int, innov: InnovationSpec, rng) -> float:
    """``X_n / n^a`` by the recursion, without storing the path."""
    a = check_exponent(a)
    n = _check_steps(n)
    stream = as_stream(rng)
    return kernels.rcar_terminal(stream.arrivals, stream.innovations,
                                 innov.code, innov.param, a, n)


@dataclass(frozen=True)
class LlnSummary:
    mean: float
    stderr: float
    n: int
    n_paths: int

    @property
    def z_score(self) -> float:
        return (self.mean - 1.0) / self.stderr if self.stderr > 0 else float("inf")

    def within(self, k_stderr: float = 3.0) -> bool:
        return abs(self.mean - 1.0) <= k_stderr * self.stderr


def lln_diagnostic(paths, a: float) -> LlnSummary:
    """Mean and standard error of ``(G_n / n)^a`` across arrival sequences.

    The values concentrate at 1 with spread about ``a / sqrt(n)`` per path.
    """
    paths = list(paths)
    if not paths:
        raise InvalidArgumentError("lln_diagnostic needs at least one arrival sequence")
    n = paths[0].n
    if any(p.n != n for p in paths):
        raise InvalidArgumentError("all arrival sequences must share the same length")
    if n < 100:
        raise InvalidArgumentError(f"arrival sequences need n >= 100, got {n}")
    vals = np.array([(p.times[-1] / n) ** a for p in paths])
    m = len(vals)
    stderr = float(vals.std(ddof=1) / np.sqrt(m)) if m > 1 else float("nan")
    return LlnSummary(float(vals.mean()), stderr, n, m)
