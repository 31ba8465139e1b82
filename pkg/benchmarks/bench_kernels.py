"""Compare the compiled elimination kernel with the pure-Python one.

Runs both kernels on the same random integer matrices, checks that the
outputs agree and prints median wall times.  Also times one end-to-end
pipeline (level 11, weight 2, T2 on interior H^1) under each backend in a
subprocess so that ``DUALIS_PURE_PYTHON`` takes effect at import.

    python3 benchmarks/bench_kernels.py [--sizes 50,100,200,400] [--repeat 5]
"""

import argparse
import os
import random
import statistics
import subprocess
import sys
import time

from dualis import _kernels_py

try:
    from dualis import _kernels as compiled
except ImportError:
    compiled = None

PIPELINE = """
import time
t = time.perf_counter()
from dualis import _backend
from dualis.models import build_model
from dualis.hecke import hecke_operator
m = build_model({"family": "modular", "parameters": {"level": 11, "weight": 2}, "hecke_elements": [{"p": 2}]})
hecke_operator(m.complex, m.rep, m.hecke("T2"), 1, "interior")
print(_backend.BACKEND, round(time.perf_counter() - t, 3))
"""


def random_rows(rng, n, m, per_row):
    # coboundary-like: a few entries of small size per row
    rows = []
    for _ in range(n):
        r = [0] * m
        for j in rng.sample(range(m), per_row):
            r[j] = rng.choice([-2, -1, 1, 2])
        rows.append(r)
    return rows


def timed(fn, rows, ncols, repeat):
    times, out = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn([list(r) for r in rows], ncols)
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="50,100,200,400")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-pipeline", action="store_true")
    args = ap.parse_args()
    if compiled is None:
        sys.exit("compiled kernel not built; run pip install --no-build-isolation -e .")
    rng = random.Random(args.seed)
    print(f"{'shape':>10} {'nnz/row':>8} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        m = n + n // 2
        for per_row in (2, 3):
            rows = random_rows(rng, n, m, per_row)
            tp, op = timed(_kernels_py.echelon, rows, m, args.repeat)
            try:
                tc, oc = timed(compiled.echelon, rows, m, args.repeat)
            except OverflowError:
                print(f"{n:>4}x{m:<5} {per_row:>8} {tp:>10.4f} {'overflow':>11} {'-':>8}")
                continue
            if op != oc:
                sys.exit(f"kernels disagree at {n}x{m}")
            print(f"{n:>4}x{m:<5} {per_row:>8} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")
    if not args.no_pipeline:
        for pure in ("0", "1"):
            env = dict(os.environ, DUALIS_PURE_PYTHON=pure)
            out = subprocess.run([sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True)
            print("pipeline", out.stdout.strip())


if __name__ == "__main__":
    main()
