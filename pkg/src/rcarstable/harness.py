"""Reproducible experiments: convergence check, risk trajectories, plot tables.

A run is fully determined by its :class:`ExperimentConfig`.  Terminal
values, LePage draws and stable variates each come from streams derived
from ``(seed, purpose, index)``, so sample files are byte-identical for
any worker count.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import inference, kernels, stable
from .errors import (DegenerateEcfError, InvalidArgumentError, NumericToleranceError,
                     SymmetryHypothesisError)
from .export import config_hash, write_csv, write_column, write_json
from .innovations import InnovationSpec
from .lepage import LePageConfig, LimitPrediction, lepage_batch, predict_limit_law
from .parallel import run_chunked
from .process import check_exponent, simulate_recursive, terminal_value
from .stable import StableParams
from .streams import derive

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

# The charge scenario fixes a = 2 only; rademacher signs are our choice of
# symmetric innovation (E|eps|^alpha = 1, so sigma = pi/2 exactly).
PRESETS = {
    "charge": {"a": 2.0, "innov": InnovationSpec("rademacher")},
    "mass": {"a": 2.0, "innov": InnovationSpec("exponential_pos", 1.0)},
    "risk": {"a": 1.0, "innov": InnovationSpec("gaussian_std")},
}

RISK_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

# fields that change where or how fast a run happens but not its numbers
_NON_RESULT_FIELDS = ("output_dir", "workers", "export_paths")


@dataclass(frozen=True)
class ExperimentConfig:
    a: float
    innov: InnovationSpec
    seed: int
    n_steps: int = 5000
    n_paths: int = 20000
    lepage_K: int = 10000
    n_lepage: int | None = None
    n_cms: int | None = None
    hill_k: int | None = None
    scenario: str | None = None
    output_dir: str | None = None
    workers: int = 1
    export_paths: bool = False

    def __post_init__(self):
        check_exponent(self.a)
        object.__setattr__(self, "a", float(self.a))
        if isinstance(self.innov, (str, dict)):
            object.__setattr__(self, "innov", InnovationSpec.from_dict(self.innov))
        if self.seed is None:
            raise InvalidArgumentError("an explicit seed is required")
        for name in ("n_steps", "n_paths", "lepage_K"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.scenario is not None:
            if self.scenario not in PRESETS:
                raise InvalidArgumentError(
                    f"unknown scenario {self.scenario!r}; choose from {sorted(PRESETS)}")
            preset = PRESETS[self.scenario]
            if self.a != preset["a"] or self.innov != preset["innov"]:
                raise InvalidArgumentError(
                    f"scenario {self.scenario!r} fixes a={preset['a']} and "
                    f"innovations {preset['innov'].label()}")

    @classmethod
    def from_preset(cls, scenario: str, **overrides) -> "ExperimentConfig":
        if scenario not in PRESETS:
            raise InvalidArgumentError(f"unknown scenario {scenario!r}")
        return cls(**{**PRESETS[scenario], "scenario": scenario, **overrides})

    @property
    def lepage_draws(self) -> int:
        return self.n_lepage if self.n_lepage is not None else self.n_paths

    @property
    def cms_draws(self) -> int:
        return self.n_cms if self.n_cms is not None else self.n_paths

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["innov"] = self.innov.to_dict()
        return d

    def result_dict(self) -> dict:
        d = self.to_dict()
        for name in _NON_RESULT_FIELDS:
            d.pop(name)
        return d

    @property
    def config_hash(self) -> str:
        return config_hash(self.result_dict())

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def load_config_file(path) -> dict:
    """Read a JSON or TOML config into a plain dict."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        return tomllib.loads(text)
    if path.suffix.lower() == ".json":
        return json.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return tomllib.loads(text)


def build_config(data: dict) -> ExperimentConfig:
    data = dict(data)
    scenario = data.get("scenario")
    if scenario is not None:
        for key, value in PRESETS.get(scenario, {}).items():
            data.setdefault(key, value)
    if "innov" in data and not isinstance(data["innov"], InnovationSpec):
        data["innov"] = InnovationSpec.from_dict(data["innov"])
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = set(data) - known
    if extra:
        raise InvalidArgumentError(f"unknown config keys: {sorted(extra)}")
    return ExperimentConfig(**data)


# ------------------------------------------------------------------ workers

def terminal_range(a, n_steps, innov, seed, start, stop) -> np.ndarray:
    """Terminal ``X_n/n^a`` for paths ``start..stop-1``."""
    return np.array([terminal_value(a, n_steps, innov, derive(seed, "process", i))
                     for i in range(start, stop)])


def simulate_terminals(cfg: ExperimentConfig) -> np.ndarray:
    return run_chunked(terminal_range, cfg.n_paths, cfg.workers,
                       cfg.a, cfg.n_steps, cfg.innov, cfg.seed)


def write_paths(path, cfg: ExperimentConfig):
    """Full normalized paths, regenerated from the same per-path streams.

    One row per (path, step): ``n_paths * n_steps`` rows.
    """
    def rows():
        for i in range(cfg.n_paths):
            p = simulate_recursive(cfg.a, cfg.n_steps, cfg.innov, derive(cfg.seed, "process", i))
            for k, g, x, xn in p.rows():
                yield (i, k, g, x, xn)

    return write_csv(path, ["path", "k", "G_k", "X_k", "X_k_over_k_pow_a"], rows())


# ------------------------------------------------------------------ report

@dataclass
class ConvergenceReport:
    config: dict
    config_hash: str
    backend: str
    prediction: dict | None
    ecf: dict | None
    ecf_error: str | None
    hill: float | None
    ks_vs_prediction: dict | None
    ks_vs_lepage: dict | None
    ks_vs_cms: dict | None
    cms_params: dict | None
    files: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def verdicts(self) -> dict:
        out = {}
        for name in ("ks_vs_prediction", "ks_vs_lepage", "ks_vs_cms"):
            rep = getattr(self, name)
            if rep is not None:
                out[name] = bool(rep["passed"])
        return out

    @property
    def all_passed(self) -> bool:
        return all(self.verdicts.values()) and not self.errors

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "samples"}
        d["verdicts"] = self.verdicts
        d["all_passed"] = self.all_passed
        return d


def _fit_levy(samples) -> StableParams:
    return StableParams(0.5, 1.0, inference.levy_scale_from_median(samples, 1.0), 1.0)


def run_convergence(cfg: ExperimentConfig, write: bool = True) -> ConvergenceReport:
    """Simulate terminal ``X_n/n^a`` values and test them against the limit law.

    Produces, when applicable: the predicted stable law; an ECF fit and a
    Hill index of the samples minus 1; one-sample KS against the predicted
    law; two-sample KS against shifted LePage draws; and two-sample KS
    against stable variates from the predicted law (symmetric innovations)
    or from a Levy law with scale matched at the median (non-negative
    innovations with ``a = 2``).
    """
    t0 = time.perf_counter()
    seed = cfg.seed
    out_dir = Path(cfg.output_dir) if cfg.output_dir else None
    errors = {}
    files = {}

    samples = simulate_terminals(cfg)
    logger.info("simulated %d terminal values", samples.size)

    prediction: LimitPrediction | None = None
    try:
        prediction = predict_limit_law(cfg.a, cfg.innov)
    except (SymmetryHypothesisError, InvalidArgumentError) as exc:
        logger.info("no a-priori limit law: %s", exc)

    ecf = ecf_error = None
    if cfg.innov.degenerate:
        ecf_error = "degenerate-ecf: zero innovations, the limit is the point mass at 1"
    else:
        try:
            fit = inference.ecf_fit_symmetric(samples, location=1.0)
            fit.provenance = {"seed": seed, "purpose": "process", "samples": "samples.csv"}
            ecf = fit.to_dict()
        except DegenerateEcfError as exc:
            ecf_error = f"degenerate-ecf: {exc}"
        except InvalidArgumentError as exc:
            ecf_error = str(exc)

    hill = None
    try:
        hill = inference.hill_estimator(samples, cfg.hill_k, location=1.0)
    except InvalidArgumentError as exc:
        errors["hill"] = str(exc)

    provenance_process = {"seed": seed, "purpose": "process", "file": "samples.csv"}

    ks_pred = None
    if prediction is not None:
        try:
            rep = inference.ks_one_sample(samples, prediction.params)
            rep.provenance = {"samples": provenance_process, "model": prediction.to_dict()}
            ks_pred = rep.to_dict()
        except NumericToleranceError as exc:
            errors["ks_vs_prediction"] = f"{exc} {exc.diagnostics}"

    lep_cfg = LePageConfig(cfg.a, cfg.lepage_K, cfg.innov)
    lep = lepage_batch(lep_cfg, cfg.lepage_draws, seed, shift=1.0, workers=cfg.workers)
    rep = inference.ks_two_sample(samples, lep)
    rep.provenance = {"samples": provenance_process,
                      "other": {"seed": seed, "purpose": "lepage", "file": "lepage.csv",
                                "K": cfg.lepage_K, "shift": 1.0}}
    ks_lep = rep.to_dict()

    cms_params = None
    if prediction is not None:
        cms_params = prediction.params
    elif cfg.innov.nonnegative and not cfg.innov.degenerate and cfg.a == 2.0:
        cms_params = _fit_levy(samples)
    ks_cms = None
    cms = None
    if cms_params is not None:
        cms = stable.cms_batch(cms_params, cfg.cms_draws, seed)
        rep = inference.ks_two_sample(samples, cms)
        rep.provenance = {"samples": provenance_process,
                          "other": {"seed": seed, "purpose": "cms", "file": "cms.csv",
                                    "params": cms_params.to_dict()}}
        ks_cms = rep.to_dict()

    if write and out_dir is not None:
        files["samples"] = str(write_column(out_dir / "samples.csv", "x_n_over_n_pow_a", samples))
        files["lepage"] = str(write_column(out_dir / "lepage.csv", "value", lep))
        if cms is not None:
            files["cms"] = str(write_column(out_dir / "cms.csv", "value", cms))
        if cfg.export_paths:
            files["paths"] = str(write_paths(out_dir / "paths.csv", cfg))

    report = ConvergenceReport(
        config=cfg.to_dict(),
        config_hash=cfg.config_hash,
        backend=kernels.BACKEND,
        prediction=prediction.to_dict() if prediction else None,
        ecf=ecf,
        ecf_error=ecf_error,
        hill=hill,
        ks_vs_prediction=ks_pred,
        ks_vs_lepage=ks_lep,
        ks_vs_cms=ks_cms,
        cms_params=cms_params.to_dict() if cms_params else None,
        files=files,
        errors=errors,
        samples=samples,
    )
    report.runtime_seconds = time.perf_counter() - t0
    if write and out_dir is not None:
        write_json(out_dir / "report.json", report.to_dict())
    return report


# ------------------------------------------------------------------ risk

@dataclass
class RiskReport:
    horizon: int
    n_paths: int
    times: np.ndarray       # (n_paths, horizon) arrival times G_k
    surplus: np.ndarray     # (n_paths, horizon) X_k
    quantiles: np.ndarray   # (horizon, len(RISK_QUANTILES))

    def trajectory_rows(self):
        for i in range(self.n_paths):
            for k in range(self.horizon):
                yield (i, k + 1, self.times[i, k], self.surplus[i, k])

    def summary_rows(self):
        for k in range(self.horizon):
            yield (k + 1, *self.quantiles[k])


def run_risk(cfg: ExperimentConfig, horizon: int, write: bool = True) -> RiskReport:
    """Surplus trajectories ``(G_k, X_k)`` and per-step quantiles."""
    if cfg.scenario not in (None, "risk"):
        raise InvalidArgumentError(f"risk trajectories need the risk scenario, got {cfg.scenario!r}")
    horizon = int(horizon)
    if horizon < 1:
        raise InvalidArgumentError("horizon must be positive")
    times = np.empty((cfg.n_paths, horizon))
    surplus = np.empty((cfg.n_paths, horizon))
    for i in range(cfg.n_paths):
        path = simulate_recursive(cfg.a, horizon, cfg.innov, derive(cfg.seed, "process", i))
        times[i] = path.arrivals.times
        surplus[i] = path.raw[1:]
    q = np.quantile(surplus, RISK_QUANTILES, axis=0).T
    report = RiskReport(horizon, cfg.n_paths, times, surplus, q)
    if write and cfg.output_dir:
        out = Path(cfg.output_dir)
        write_csv(out / "trajectories.csv", ["path", "k", "G_k", "X_k"], report.trajectory_rows())
        write_csv(out / "summary.csv", ["k"] + [f"q{int(round(p * 100)):02d}" for p in RISK_QUANTILES],
                  report.summary_rows())
        write_json(out / "risk.json", {"config": cfg.to_dict(), "config_hash": cfg.config_hash,
                                       "horizon": horizon, "quantiles": list(RISK_QUANTILES)})
    return report


# ------------------------------------------------------------------ plot data

MAX_HIST_BINS = 10_000


def _fd_bins(x: np.ndarray, lo: float, hi: float) -> int:
    """Freedman-Diaconis bin count, computed without materializing edges."""
    q25, q75 = np.quantile(x, [0.25, 0.75])
    width = 2.0 * (q75 - q25) / x.size ** (1.0 / 3.0)
    if not width > 0.0 or hi <= lo:
        return 1
    return int(min(math.ceil((hi - lo) / width), 2**62))


def _histogram(x: np.ndarray):
    lo, hi = float(x.min()), float(x.max())
    header = ["left", "right", "count"]
    nb = _fd_bins(x, lo, hi)
    if nb <= MAX_HIST_BINS:
        counts, edges = np.histogram(x, bins=nb, range=(lo, hi) if hi > lo else None)
        return header, list(zip(edges[:-1], edges[1:], counts))
    # heavy tails: bin the central 99% and count the rest separately
    lo_c, hi_c = (float(v) for v in np.quantile(x, [0.005, 0.995]))
    core = x[(x >= lo_c) & (x <= hi_c)]
    nb = max(1, min(_fd_bins(core, lo_c, hi_c), MAX_HIST_BINS))
    counts, edges = np.histogram(core, bins=nb, range=(lo_c, hi_c))
    rows = [(lo, lo_c, int((x < lo_c).sum()))]
    rows.extend(zip(edges[:-1], edges[1:], counts))
    rows.append((hi_c, hi, int((x > hi_c).sum())))
    return header, rows


def _qq(x: np.ndarray, params: StableParams, max_points: int = 1000):
    xs = np.sort(x)
    n = xs.size
    idx = np.arange(n) if n <= max_points else np.unique(
        np.linspace(0, n - 1, max_points).round().astype(int))
    probs = (idx + 0.5) / n
    model = stable.quantile(params, probs)
    return ["prob", "model_quantile", "sample_quantile"], list(zip(probs, model, xs[idx]))


def _ecdf_overlay(x: np.ndarray, params: StableParams):
    xs = np.sort(x)
    n = xs.size
    i = np.arange(1, n + 1)
    F = np.asarray(stable.cdf(params, xs), dtype=float)
    hi, lo = i / n, (i - 1) / n
    gap = np.maximum(hi - F, F - lo)
    return ["x", "ecdf_upper", "ecdf_lower", "model_cdf", "gap"], list(zip(xs, hi, lo, F, gap))


def emit_plot_data(samples, kind: str, params: StableParams | None = None, path=None):
    """Plot-ready table; returns ``(header, rows)`` and writes CSV if ``path``.

    ``histogram`` uses Freedman-Diaconis bins, falling back to the central
    99% plus two overflow rows when that would exceed ``MAX_HIST_BINS``.
    ``qq`` and ``ecdf-overlay`` compare against ``params``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidArgumentError("plot data needs at least one sample")
    if kind == "histogram":
        header, rows = _histogram(x)
    elif kind in ("qq", "ecdf-overlay"):
        if params is None:
            raise InvalidArgumentError(f"{kind} needs model parameters")
        header, rows = (_qq if kind == "qq" else _ecdf_overlay)(x, params)
    else:
        raise InvalidArgumentError(f"unknown plot kind {kind!r}")
    if path is not None:
        write_csv(path, header, rows)
    return header, rows


def exit_code(report: ConvergenceReport) -> int:
    return 0 if report.all_passed else 2


__all__ = [
    "ExperimentConfig", "ConvergenceReport", "RiskReport", "PRESETS", "build_config",
    "load_config_file", "run_convergence", "run_risk", "emit_plot_data", "exit_code",
]
