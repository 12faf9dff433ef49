"""Command line interface.

Exit status: 0 when everything ran and every statistical gate passed,
2 when a gate failed, 1 on any runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness, inference, stable
from .errors import RcarError
from .export import fmt, read_column, write_csv, write_json
from .innovations import InnovationSpec
from .lepage import LePageConfig, default_truncation, lepage_batch, write_lepage_batch
from .process import simulate_closed_form, simulate_recursive
from .stable import StableParams
from .streams import derive

EXIT_OK, EXIT_ERROR = 0, 1


def _innov(text):
    try:
        return InnovationSpec.parse(text)
    except RcarError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_stable_args(p):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)


def _stable_params(args) -> StableParams:
    return StableParams(args.alpha, args.beta, args.sigma, args.mu)


def _print_csv(header, rows):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def cmd_simulate(args):
    sim = simulate_recursive if args.method == "recursive" else simulate_closed_form
    path = sim(args.a, args.n, args.innov, derive(args.seed, "process", args.path_index))
    if args.format == "json":
        if args.out:
            path.to_json(args.out)
        else:
            print(json.dumps(path.to_dict(), default=lambda v: v.tolist()))
    elif args.out:
        path.to_csv(args.out)
    else:
        _print_csv(["k", "G_k", "X_k", "X_k_over_k_pow_a"], path.rows())
    return EXIT_OK


def cmd_lepage(args):
    K = args.K if args.K is not None else default_truncation(args.a)
    cfg = LePageConfig(args.a, K, args.innov, args.tol)
    shift = 1.0 if args.limit else 0.0
    samples = lepage_batch(cfg, args.draws, args.seed, shift=shift, workers=args.workers)
    write_lepage_batch(args.out, samples, cfg, args.seed, shift)
    return EXIT_OK


def cmd_stable(args):
    p = _stable_params(args)
    if args.action == "sample":
        x = stable.cms_batch(p, args.n, args.seed)
        if args.out:
            write_csv(args.out, ["value"], ([v] for v in x))
        else:
            _print_csv(["value"], ([v] for v in x))
    elif args.action in ("cdf", "pdf"):
        xs = np.array(args.x, dtype=float)
        f = stable.cdf if args.action == "cdf" else stable.pdf
        _print_csv(["x", args.action], zip(xs, np.atleast_1d(f(p, xs))))
    elif args.action == "quantile":
        qs = np.array(args.x, dtype=float)
        _print_csv(["q", "x"], zip(qs, np.atleast_1d(stable.quantile(p, qs))))
    else:
        grid = np.linspace(args.start, args.stop, args.num)
        rows = stable.tabulate(p, grid)
        if args.out:
            write_csv(args.out, ["x", "pdf", "cdf"], rows)
        else:
            _print_csv(["x", "pdf", "cdf"], rows)
    return EXIT_OK


def cmd_estimate(args):
    x = read_column(args.input, args.column)
    out = {"input": str(args.input), "n": int(x.size), "location": args.location}
    try:
        out["ecf"] = inference.ecf_fit_symmetric(x, args.location).to_dict()
    except RcarError as exc:
        out["ecf"] = None
        out["ecf_error"] = str(exc)
    out["hill"] = inference.hill_estimator(x, args.hill_k, location=args.location)
    if args.out:
        write_json(args.out, out)
    else:
        print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def _experiment_config(args) -> harness.ExperimentConfig:
    data = harness.load_config_file(args.config) if args.config else {}
    overrides = {
        "scenario": args.scenario,
        "a": args.a,
        "innov": args.innov,
        "n_steps": getattr(args, "n_steps", None),
        "n_paths": args.n_paths,
        "lepage_K": getattr(args, "lepage_k", None),
        "n_lepage": getattr(args, "n_lepage", None),
        "n_cms": getattr(args, "n_cms", None),
        "hill_k": getattr(args, "hill_k", None),
        "output_dir": args.output_dir,
        "workers": getattr(args, "workers", None),
        "seed": args.seed,
    }
    for k, v in overrides.items():
        if v is not None:
            data[k] = v
    if getattr(args, "export_paths", False):
        data["export_paths"] = True
    if data.get("scenario") is None and "a" not in data:
        raise RcarError("give --scenario, --a/--innov, or a config file")
    if data.get("scenario") is None:
        data.setdefault("innov", InnovationSpec("rademacher"))
    return harness.build_config(data)


def cmd_converge(args):
    cfg = _experiment_config(args)
    if cfg.output_dir is None:
        cfg = cfg.replace(output_dir=str(Path("runs") / cfg.config_hash[:12]))
    report = harness.run_convergence(cfg)
    summary = {"output_dir": cfg.output_dir, "verdicts": report.verdicts,
               "all_passed": report.all_passed, "prediction": report.prediction,
               "hill": report.hill,
               "ecf": None if report.ecf is None else
               {k: report.ecf[k] for k in ("alpha_hat", "sigma_hat")},
               "errors": report.errors}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return harness.exit_code(report)


def cmd_risk(args):
    if args.scenario is None and args.a is None and not args.config:
        args.scenario = "risk"
    cfg = _experiment_config(args)
    if cfg.output_dir is None:
        cfg = cfg.replace(output_dir=str(Path("runs") / ("risk-" + cfg.config_hash[:12])))
    rep = harness.run_risk(cfg, args.horizon)
    print(json.dumps({"output_dir": cfg.output_dir, "rows": rep.n_paths * rep.horizon,
                      "final_median": float(rep.quantiles[-1, 2])}, indent=2))
    return EXIT_OK


def cmd_plotdata(args):
    x = read_column(args.input, args.column)
    params = None
    if args.report:
        rep = json.loads(Path(args.report).read_text())
        model = rep.get("prediction") or rep.get("cms_params")
        if model is None:
            raise RcarError("report carries no model law")
        params = StableParams.from_dict(model)
    elif args.alpha is not None:
        params = StableParams(args.alpha, args.beta, args.sigma, args.mu)
    header, rows = harness.emit_plot_data(x, args.kind, params, path=args.out)
    if not args.out:
        _print_csv(header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcarstable",
        description="Random-coefficient autoregression with Poisson arrival ratios "
                    "and its stable limit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one process path")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--innov", type=_innov, default=InnovationSpec("rademacher"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--path-index", type=int, default=0)
    p.add_argument("--method", choices=("recursive", "closed-form"), default="recursive")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lepage", help="batch of truncated LePage series draws")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--innov", type=_innov, default=InnovationSpec("rademacher"))
    p.add_argument("--K", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--limit", action="store_true", help="add the unit location (1 + Z)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lepage)

    p = sub.add_parser("stable", help="stable law utilities")
    ssub = p.add_subparsers(dest="action", required=True)
    q = ssub.add_parser("sample")
    _add_stable_args(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--out")
    for name in ("cdf", "pdf", "quantile"):
        q = ssub.add_parser(name)
        _add_stable_args(q)
        q.add_argument("x", type=float, nargs="+")
    q = ssub.add_parser("tabulate")
    _add_stable_args(q)
    q.add_argument("--start", type=float, required=True)
    q.add_argument("--stop", type=float, required=True)
    q.add_argument("--num", type=int, default=201)
    q.add_argument("--out")
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("estimate", help="ECF and Hill estimates from a sample CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--location", type=float, default=0.0)
    p.add_argument("--hill-k", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    for name, func in (("converge", cmd_converge), ("risk", cmd_risk)):
        p = sub.add_parser(name, help="convergence experiment" if name == "converge"
                           else "surplus trajectories")
        p.add_argument("--config", help="TOML or JSON file; flags override it")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--scenario", choices=sorted(harness.PRESETS))
        p.add_argument("--a", type=float)
        p.add_argument("--innov", type=_innov)
        p.add_argument("--n-paths", type=int)
        p.add_argument("--output-dir")
        if name == "converge":
            p.add_argument("--n-steps", type=int)
            p.add_argument("--lepage-k", type=int)
            p.add_argument("--n-lepage", type=int)
            p.add_argument("--n-cms", type=int)
            p.add_argument("--hill-k", type=int)
            p.add_argument("--workers", type=int)
            p.add_argument("--export-paths", action="store_true")
        else:
            p.add_argument("--horizon", type=int, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("plotdata", help="histogram / QQ / ECDF-overlay tables")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--kind", choices=("histogram", "qq", "ecdf-overlay"), required=True)
    p.add_argument("--report", help="take the model law from a converge report.json")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK
    except (RcarError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
