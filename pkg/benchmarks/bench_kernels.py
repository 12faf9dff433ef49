"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 7] [--json out.json]

Times each hot kernel on both backends with identical inputs and checks
that the outputs agree.  Stream construction is excluded from the timings.
"""

import argparse
import json
import platform
import timeit

import numpy as np

from rcarstable import kernels
from rcarstable.streams import Stream

CASES = [
    # name, callable(backend, stream) -> value, per-call work label
    ("draw_increments n=1e5",
     lambda m, s: m.draw_increments(s.arrivals, 100_000), "1e5 draws"),
    ("draw_innovations rademacher n=1e5",
     lambda m, s: m.draw_innovations(s.innovations, 0, 0.0, 100_000), "1e5 draws"),
    ("draw_innovations gaussian n=1e5",
     lambda m, s: m.draw_innovations(s.innovations, 1, 0.0, 100_000), "1e5 draws"),
    ("rcar_terminal a=2 n=5000 rademacher",
     lambda m, s: m.rcar_terminal(s.arrivals, s.innovations, 0, 0.0, 2.0, 5000), "one path"),
    ("rcar_terminal a=0.75 n=5000 gaussian",
     lambda m, s: m.rcar_terminal(s.arrivals, s.innovations, 1, 0.0, 0.75, 5000), "one path"),
    ("lepage_sum a=2 K=1e4 rademacher",
     lambda m, s: m.lepage_sum(s.arrivals, s.innovations, 0, 0.0, 2.0, 10_000), "one draw"),
    ("lepage_sum a=2 K=1e4 exponential",
     lambda m, s: m.lepage_sum(s.arrivals, s.innovations, 3, 1.0, 2.0, 10_000), "one draw"),
]


def _time(fn, backend, repeat, number):
    streams = [Stream(7, (i,)) for i in range(repeat * number)]
    it = iter(streams)
    times = timeit.repeat(lambda: fn(backend, next(it)), repeat=repeat, number=number)
    return min(times) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--number", type=int, default=20)
    ap.add_argument("--json")
    args = ap.parse_args(argv)

    found = kernels.backends()
    if "cython" not in found:
        print("compiled backend not built; timing the Python fallback only")
    rows = []
    for name, fn, unit in CASES:
        res = {"case": name, "unit": unit}
        outs = {}
        for bname, mod in found.items():
            res[bname] = _time(fn, mod, args.repeat, args.number)
            outs[bname] = np.asarray(fn(mod, Stream(99)))
        if len(outs) == 2:
            a, b = outs["cython"], outs["python"]
            res["max_rel_diff"] = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
            res["speedup"] = res["python"] / res["cython"]
        rows.append(res)

    print(f"{'case':40s} {'cython':>11s} {'python':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for r in rows:
        c = f"{r['cython'] * 1e6:9.1f}us" if "cython" in r else "-"
        print(f"{r['case']:40s} {c:>11s} {r['python'] * 1e6:9.1f}us "
              f"{r.get('speedup', float('nan')):7.2f}x {r.get('max_rel_diff', float('nan')):13.1e}")
    if args.json:
        meta = {"python": platform.python_version(), "numpy": np.__version__,
                "machine": platform.machine(), "active_backend": kernels.BACKEND}
        with open(args.json, "w") as fh:
            json.dump({"meta": meta, "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
