"""Throughput comparison of the compiled kernels against the numpy
fallback.

Run as a script:

    python3 benchmarks/bench_backends.py [--quick]

Three workloads: full-game sampling, best-response walks on presampled
games, and gradient-dynamics iterations.  Outputs are checked to match
across backends before any number is reported, so a broken kernel can't
post a fast time.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gamedyn._kernels import pyfallback

try:
    from gamedyn._kernels import _core
except ImportError:
    _core = None


def _time(fn, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sampling(mod, games: int, n: int, m: int, lam: float,
                   reps: int) -> float:
    def work():
        for seed in range(games):
            mod.sample_tables(seed, n, m, lam)
    return _time(work, reps) / games


def bench_sbrd(mod, games: int, n: int, m: int, reps: int) -> float:
    tables = [list(pyfallback.sample_tables(seed, n, m, 1.0))
              for seed in range(games)]
    cap = m ** n + 1

    def work():
        for tabs in tables:
            mod.sbrd_path(tabs, m, 0, cap)
    return _time(work, reps) / games


def bench_spgd(mod, n: int, m: int, iters: int, reps: int) -> float:
    tabs = list(pyfallback.sample_tables(99, n, m, 0.95))

    def work():
        z = np.zeros((n, m))
        mod.spgd_loop(tabs, z, 0.5, 0.0, iters, 10 ** 9)
    return _time(work, reps) / iters


def check_agreement(n: int, m: int):
    """Refuse to benchmark backends that disagree."""
    for seed in (0, 1, 2):
        a = pyfallback.sample_tables(seed, n, m, 0.7)
        b = _core.sample_tables(seed, n, m, 0.7)
        for ta, tb in zip(a, b):
            if not np.array_equal(ta, tb):
                raise SystemExit("backends disagree on sampling; aborting")
        ra = pyfallback.sbrd_path(list(a), m, 0, m ** n + 1)
        rb = _core.sbrd_path(list(b), m, 0, m ** n + 1)
        if ra[0] != rb[0] or not np.array_equal(ra[2], rb[2]):
            raise SystemExit("backends disagree on walks; aborting")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true",
                    help="smaller workloads, rougher numbers")
    args = ap.parse_args()

    if _core is None:
        raise SystemExit("compiled extension not built; nothing to compare")
    check_agreement(3, 8)

    reps = 2 if args.quick else 4
    n, m = 3, 50
    games = 20 if args.quick else 60
    iters = 2000 if args.quick else 10000

    rows = []
    for label, mod in (("python", pyfallback), ("cython", _core)):
        samp = bench_sampling(mod, games, n, m, 1.0, reps)
        sb = bench_sbrd(mod, games, 2, 30, reps)
        sp = bench_spgd(mod, 3, 20, iters, reps)
        rows.append((label, samp, sb, sp))

    print(f"workloads: sample n={n} m={m} lam=1; "
          f"sbrd n=2 m=30; spgd n=3 m=20")
    print(f"{'backend':8s} {'sample/game':>14s} {'sbrd/run':>12s} "
          f"{'spgd/iter':>12s}")
    for label, samp, sb, sp in rows:
        print(f"{label:8s} {samp * 1e3:11.3f} ms {sb * 1e6:9.1f} us "
              f"{sp * 1e6:9.2f} us")
    py, cy = rows[0], rows[1]
    print(f"{'speedup':8s} {py[1] / cy[1]:13.1f}x {py[2] / cy[2]:11.1f}x "
          f"{py[3] / cy[3]:11.1f}x")


if __name__ == "__main__":
    main()
