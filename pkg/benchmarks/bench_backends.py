"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_backends.py [--repeat 3] [--json out.json]

Each case runs once per backend to warm up (JIT compilation for numba), then
``--repeat`` timed runs; the best time is reported. Both backends must
produce identical colorings, which is checked on every case.
"""

import argparse
import json
import time

import numpy as np

from groupwl import catalog, kernels, pebble, wl

CASES = [
    ("wl", "D8xC2", 3, "I"),
    ("wl", "SL(2,3)", 3, "II"),
    ("wl", "C3:D8", 3, "I"),
    ("wl", "D8xC2", 4, "I"),
    ("game", "D8", 3, "II"),
]


def run(kind, name, k, version):
    g = catalog.get(name)
    if kind == "wl":
        return wl.stable_coloring(g, k, version).colors
    return pebble.GameSolver(g, catalog.get("Q8"), k, version).solve()[0]


def best_time(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rows = []
    print(f"{'case':28s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}")
    for kind, name, k, version in CASES:
        times, outs = {}, {}
        for backend in ("numba", "numpy"):
            kernels.set_backend(backend)
            run(kind, name, k, version)
            times[backend], outs[backend] = best_time(lambda: run(kind, name, k, version), args.repeat)
        if not np.array_equal(outs["numba"], outs["numpy"]):
            raise SystemExit(f"backends disagree on {kind} {name} k={k} {version}")
        label = f"{kind} {name} k={k} {version}"
        speed = times["numpy"] / times["numba"]
        print(f"{label:28s} {times['numba']:9.3f} {times['numpy']:9.3f} {speed:7.1f}x")
        rows.append({"case": label, "numba": times["numba"], "numpy": times["numpy"]})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
