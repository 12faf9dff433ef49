import json
import math

import numpy as np
import pytest
from scipy import stats

from rcarstable import harness, inference, stable
from rcarstable.errors import InvalidArgumentError
from rcarstable.harness import (PRESETS, ExperimentConfig, build_config, emit_plot_data,
                                exit_code, load_config_file, run_convergence, run_risk)
from rcarstable.innovations import InnovationSpec
from rcarstable.process import sample_arrivals
from rcarstable.stable import StableParams
from rcarstable.streams import derive

SMALL = dict(n_steps=400, n_paths=1500, lepage_K=500)


def test_presets_fix_model():
    assert PRESETS["charge"]["a"] == 2.0 and PRESETS["charge"]["innov"].family == "rademacher"
    assert PRESETS["mass"]["innov"] == InnovationSpec("exponential_pos", 1.0)
    assert PRESETS["risk"]["a"] == 1.0 and PRESETS["risk"]["innov"].family == "gaussian_std"
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(a=1.0, innov=InnovationSpec("rademacher"), seed=1, scenario="charge")
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig.from_preset("nope", seed=1)
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig.from_preset("charge", seed=None)


def test_config_hash_is_stable_and_ignores_placement():
    a = ExperimentConfig.from_preset("charge", seed=5)
    b = ExperimentConfig.from_preset("charge", seed=5, workers=4, output_dir="/tmp/x")
    assert a.config_hash == b.config_hash
    assert a.config_hash == "".join(a.config_hash)  # plain hex digest
    assert len(a.config_hash) == 64
    assert a.config_hash != ExperimentConfig.from_preset("charge", seed=6).config_hash


def test_config_files(tmp_path):
    (tmp_path / "c.toml").write_text('scenario = "mass"\nseed = 3\nn_paths = 10\n')
    (tmp_path / "c.json").write_text(json.dumps(
        {"a": 1.5, "innov": "uniform_sym:2", "seed": 3, "n_paths": 10}))
    t = build_config(load_config_file(tmp_path / "c.toml"))
    assert t.a == 2.0 and t.innov.family == "exponential_pos" and t.n_paths == 10
    j = build_config(load_config_file(tmp_path / "c.json"))
    assert j.innov == InnovationSpec("uniform_sym", 2.0)
    with pytest.raises(InvalidArgumentError):
        build_config({"a": 2.0, "innov": "rademacher", "seed": 1, "bogus": 1})


@pytest.fixture(scope="module")
def charge_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("charge")
    cfg = ExperimentConfig.from_preset("charge", seed=20261019, output_dir=str(out), **SMALL)
    return cfg, run_convergence(cfg)


def test_charge_report_contents(charge_report):
    cfg, rep = charge_report
    assert rep.prediction["alpha"] == 0.5 and rep.prediction["mu"] == 1.0
    assert rep.prediction["sigma"] == pytest.approx(math.pi / 2)
    assert rep.ks_vs_prediction is not None and rep.ks_vs_cms is not None
    assert rep.all_passed and exit_code(rep) == 0
    for name in ("ks_vs_prediction", "ks_vs_lepage", "ks_vs_cms"):
        assert getattr(rep, name)["provenance"]["samples"]["seed"] == cfg.seed
    assert rep.ecf["provenance"]["seed"] == cfg.seed


def test_charge_report_files(charge_report):
    cfg, rep = charge_report
    d = json.loads(open(rep.files["samples"].replace("samples.csv", "report.json")).read())
    assert d["config_hash"] == cfg.config_hash
    assert set(d["verdicts"]) == {"ks_vs_prediction", "ks_vs_lepage", "ks_vs_cms"}
    lines = open(rep.files["samples"]).read().splitlines()
    assert len(lines) == cfg.n_paths + 1
    np.testing.assert_array_equal(np.array(lines[1:], dtype=float), rep.samples)


def test_samples_are_terminal_values(charge_report):
    from rcarstable.process import simulate_closed_form
    cfg, rep = charge_report
    p = simulate_closed_form(cfg.a, cfg.n_steps, cfg.innov, derive(cfg.seed, "process", 17))
    assert rep.samples[17] == pytest.approx(p.terminal, rel=1e-9)


def test_mass_preset_has_no_prediction(tmp_path):
    cfg = ExperimentConfig.from_preset("mass", seed=8, output_dir=str(tmp_path), **SMALL)
    rep = run_convergence(cfg)
    assert rep.prediction is None and rep.ks_vs_prediction is None
    assert rep.ks_vs_lepage is not None
    assert rep.cms_params["beta"] == 1.0 and rep.cms_params["alpha"] == 0.5
    assert np.all(rep.samples > 1.0)
    assert abs(rep.hill - 0.5) < 0.15


def test_point_mass_zero_is_degenerate(tmp_path):
    cfg = ExperimentConfig(a=2.0, innov=InnovationSpec("point_mass", 0.0), seed=3,
                           n_steps=200, n_paths=1200, lepage_K=200, output_dir=str(tmp_path))
    rep = run_convergence(cfg)
    expect = [(sample_arrivals(200, derive(3, "process", i)).times[-1] / 200) ** 2
              for i in range(cfg.n_paths)]
    np.testing.assert_allclose(rep.samples, expect, rtol=1e-12)
    assert rep.ecf is None and rep.ecf_error.startswith("degenerate-ecf")
    assert rep.prediction is None
    json.loads((tmp_path / "report.json").read_text())


def test_run_convergence_rejects_bad_exponent():
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(a=0.5, innov=InnovationSpec("rademacher"), seed=1)


def test_worker_count_does_not_change_results(tmp_path):
    reps = []
    for w in (1, 2):
        cfg = ExperimentConfig.from_preset("charge", seed=77, n_steps=100, n_paths=1100,
                                           lepage_K=100, workers=w, output_dir=str(tmp_path / str(w)))
        reps.append(run_convergence(cfg))
    for name in ("samples.csv", "lepage.csv", "cms.csv"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()
    a, b = (json.loads((tmp_path / w / "report.json").read_text()) for w in "12")
    for d in (a, b):
        d.pop("runtime_seconds"), d.pop("files"), d["config"].pop("workers")
        d["config"].pop("output_dir")
    assert a == b


def test_path_export(tmp_path):
    cfg = ExperimentConfig.from_preset("charge", seed=2, n_steps=50, n_paths=300, lepage_K=100,
                                       output_dir=str(tmp_path), export_paths=True)
    rep = run_convergence(cfg)
    lines = (tmp_path / "paths.csv").read_text().splitlines()
    assert lines[0] == "path,k,G_k,X_k,X_k_over_k_pow_a"
    assert len(lines) == 1 + 300 * 50
    last_of_path0 = lines[50].split(",")
    assert float(last_of_path0[4]) == pytest.approx(rep.samples[0], rel=1e-12)


def test_risk_point_mass_tracks_arrivals():
    cfg = ExperimentConfig(a=1.0, innov=InnovationSpec("point_mass", 0.0), seed=4, n_paths=1)
    rep = run_risk(cfg, 50, write=False)
    np.testing.assert_allclose(rep.surplus[0], rep.times[0], rtol=1e-12)


def test_risk_schema_and_growth(tmp_path):
    cfg = ExperimentConfig.from_preset("risk", seed=5, n_paths=100, output_dir=str(tmp_path))
    rep = run_risk(cfg, 60)
    rows = (tmp_path / "trajectories.csv").read_text().splitlines()
    assert rows[0] == "path,k,G_k,X_k" and len(rows) - 1 == 100 * 60
    med = rep.quantiles[:, 2]
    assert np.all(np.isfinite(med))
    # the median trends upward past k = 10; single steps can dip by noise
    k = np.arange(11, 61)
    assert np.polyfit(k, med[10:], 1)[0] > 0.5
    assert np.all(med[19:] > med[9])
    assert stats.spearmanr(k, med[10:])[0] > 0.95
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "k,q05,q25,q50,q75,q95" and len(summary) == 61
    with pytest.raises(InvalidArgumentError):
        run_risk(ExperimentConfig.from_preset("charge", seed=1), 5, write=False)


def test_plot_histogram():
    header, rows = emit_plot_data(np.full(50, 3.0), "histogram")
    assert sum(1 for r in rows if r[2] > 0) == 1
    x = stable.cms_batch(StableParams(0.5), 20000, 1)
    header, rows = emit_plot_data(x, "histogram")
    assert header == ["left", "right", "count"]
    assert sum(r[2] for r in rows) == x.size
    assert len(rows) <= harness.MAX_HIST_BINS + 2
    y = np.random.default_rng(0).standard_normal(5000)
    _, rows = emit_plot_data(y, "histogram")
    counts, edges = np.histogram(y, bins="fd")
    assert [r[2] for r in rows] == counts.tolist()


def test_plot_qq_on_quantile_transform():
    p = StableParams(1.5, 0.0, 1.0, 1.0)
    n = 400
    x = stable.quantile(p, (np.arange(n) + 0.5) / n)
    _, rows = emit_plot_data(x, "qq", p)
    rows = np.array(rows)
    np.testing.assert_allclose(rows[:, 1], rows[:, 2], atol=1e-6)


def test_plot_overlay_gap_equals_ks(tmp_path):
    p = StableParams(1.0, 0.0, 1.0, 0.0)
    x = stable.cms_batch(p, 3000, 9)
    header, rows = emit_plot_data(x, "ecdf-overlay", p, path=tmp_path / "o.csv")
    gap = max(r[-1] for r in rows)
    assert gap == pytest.approx(inference.ks_one_sample(x, p).ks_stat, abs=1e-9)
    assert (tmp_path / "o.csv").read_text().splitlines()[0] == ",".join(header)


def test_plot_errors():
    with pytest.raises(InvalidArgumentError):
        emit_plot_data([], "histogram")
    with pytest.raises(InvalidArgumentError):
        emit_plot_data([1.0, 2.0], "qq")
    with pytest.raises(InvalidArgumentError):
        emit_plot_data([1.0, 2.0], "violin")
