"""Wall time of the two hot kernels on both backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

sl_propagate is timed through pendulum_grid_oracle and enum_bin through
sphere_family_oracle on a single thread. Each pair of runs is also checked
for bit-identical output.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from s2tos import _kernels, oracle
from s2tos.params import alpha_from_rbar


def _best(fn, repeat: int):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_pendulum(backend: str, h: float, repeat: int):
    return _best(lambda: oracle.pendulum_grid_oracle(1.0, h, h, backend=backend), repeat)


def bench_sphere(backend: str, n_si: int, n_sf: int, repeat: int):
    a = alpha_from_rbar(10, 0.5)
    box = oracle.CellBox.square(1.3, 0.02)
    return _best(lambda: oracle.sphere_family_oracle(a, box, n_si, n_sf, threads=1, backend=backend), repeat)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--pendulum-h", type=float, default=0.01)
    p.add_argument("--n-si", type=int, default=200)
    p.add_argument("--n-sf", type=int, default=100)
    p.add_argument("--json", help="write the results here")
    args = p.parse_args(argv)

    backends = ["python"] + (["cython"] if _kernels.compiled_kernels is not None else [])
    cases = {
        "sl_propagate": lambda b: bench_pendulum(b, args.pendulum_h, args.repeat),
        "enum_bin": lambda b: bench_sphere(b, args.n_si, args.n_sf, args.repeat),
    }
    results = {}
    print(f"{'kernel':<14}{'backend':<9}{'seconds':>10}{'speedup':>10}")
    for name, run in cases.items():
        rows = {b: run(b) for b in backends}
        base = rows["python"][0]
        for b, (t, _) in rows.items():
            print(f"{name:<14}{b:<9}{t:>10.4f}{base / t:>10.1f}")
        same = None
        if len(rows) == 2:
            a, c = rows["python"][1], rows["cython"][1]
            same = bool(np.array_equal(a.per_control, c.per_control))
            print(f"{name:<14}bit-identical: {same}")
        results[name] = {"seconds": {b: t for b, (t, _) in rows.items()}, "identical": same}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
