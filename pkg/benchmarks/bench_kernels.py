"""Compare the compiled and pure-Python kernel backends.

Run: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import importlib
import random
import subprocess
import sys
import time
from fractions import Fraction

from superflag.grassmann import VarTable


def random_poly(rng, vt, nterms, maxdeg):
    out = {}
    ne, no = len(vt.even), len(vt.odd)
    for _ in range(nterms):
        exps = [rng.randint(0, maxdeg) for _ in range(ne)]
        m = rng.getrandbits(no)
        out[(vt.pack(exps), m)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    return out


def random_rows(rng, nrows, ncols, density):
    rows = []
    for _ in range(nrows):
        row = {j: rng.randint(-5, 5) for j in range(ncols) if rng.random() < density}
        rows.append({j: c for j, c in row.items() if c})
    return rows


def bench(mod, repeat):
    rng = random.Random(7)
    vt = VarTable(("x", "y", "z"), ("a", "b", "c", "d"))
    a = random_poly(rng, vt, 40, 4)
    b = random_poly(rng, vt, 40, 4)
    g = {k: c for k, c in random_poly(rng, vt, 6, 2).items()}
    g = {(k, 0): c for (k, _), c in g.items()}
    rows = random_rows(rng, 120, 120, 0.08)
    prod = mod.poly_mul(a, b)
    cases = {
        "poly_mul": lambda: mod.poly_mul(a, b),
        "poly_divmod": lambda: mod.poly_divmod(prod, g, vt.guard),
        "eliminate": lambda: mod.eliminate(rows),
    }
    out = {}
    for name, fn in cases.items():
        fn()
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        out[name] = (time.perf_counter() - t0) / repeat
    return out


def end_to_end(pure: bool) -> float:
    code = (
        "import time;from superflag.atlas import FlagType;from superflag.solver import global_fields;"
        "t=time.perf_counter();global_fields(FlagType.pi_symmetric(3,(2,1)),3,stabilize=False);"
        "print(time.perf_counter()-t)"
    )
    env = {"SUPERFLAG_PURE": "1"} if pure else {}
    import os

    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env={**os.environ, **env})
    return float(res.stdout.strip())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--skip-solver", action="store_true")
    args = ap.parse_args()
    py = importlib.import_module("superflag._pykernels")
    try:
        cy = importlib.import_module("superflag._ckernels")
    except ImportError:
        cy = None
        print("compiled kernels not built; only the pure-Python backend is timed")
    py_t = bench(py, args.repeat)
    cy_t = bench(cy, args.repeat) if cy else {}
    print(f"{'kernel':<14}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, t in py_t.items():
        if cy:
            c = cy_t[name]
            print(f"{name:<14}{t * 1e3:>14.2f}{c * 1e3:>14.2f}{t / c:>9.2f}x")
        else:
            print(f"{name:<14}{t * 1e3:>14.2f}{'-':>14}{'-':>10}")
    if not args.skip_solver:
        p = end_to_end(True)
        c = end_to_end(False) if cy else float("nan")
        print(f"{'solver PiF(3;2,1) D=3':<24} python {p:.2f}s  compiled {c:.2f}s")


if __name__ == "__main__":
    main()
