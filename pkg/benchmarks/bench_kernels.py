"""Compiled versus pure-Python kernels on the workloads the library actually runs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row times one kernel call per backend (best of ``--repeat``) and checks
that both backends return the same value.
"""

import argparse
import time

import numpy as np

from diagsolve import _kernels
from diagsolve.forms import adversarial_pq
from diagsolve.local import _form_hists

CASES = [
    ("count_zero_sums s=6 B=12", "count_zero_sums", ((1, -2, 3, -4, 5, -6), 3, [v for v in range(-12, 13) if v])),
    ("count_zero_sums s=8 B=6", "count_zero_sums", ((1, 2, 3, 5, -7, -11, -13, 17), 3, [v for v in range(-6, 7) if v])),
    ("min_norm s=6 B=10 (no solution)", "min_norm", (adversarial_pq(3, 3, 13).coefficients, 3, 10)),
    ("min_norm s=8 B=8", "min_norm", ((3, 7, -12, 5, 9, -31, 44, 2), 3, 8)),
    ("cyclic_convolve 4 x mod 7^3", "cyclic_convolve", (_form_hists(adversarial_pq(3, 2, 7), 343), 343)),
    ("cyclic_convolve 6 x mod 3^6", "cyclic_convolve", (_form_hists(adversarial_pq(3, 3, 7), 729), 729)),
    ("gauss_sum_table q=997 k=3", "gauss_sum_table", (997, 3)),
    ("gauss_sum_table q=2048 k=4", "gauss_sum_table", (2048, 4)),
]


def best_of(fn, args, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b) -> bool:
    if isinstance(a, (int, np.integer)):
        return int(a) == int(b)
    a, b = np.asarray(a), np.asarray(b)
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        return bool(np.allclose(a, b, atol=1e-9))
    return bool(np.array_equal(a, b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = _kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the pure-Python backend is available")
    names = sorted(backends, reverse=True)  # python first, then compiled
    print(f"{'case':<34}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}  agree")
    for label, kernel, kargs in CASES:
        times, outs = {}, {}
        for n in names:
            times[n], outs[n] = best_of(getattr(backends[n], kernel), kargs, args.repeat)
        agree = all(same(outs[names[0]], outs[n]) for n in names)
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{label:<34}" + "".join(f"{times[n]:>11.4f}s" for n in names) + f"{speed:>9.1f}x  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
