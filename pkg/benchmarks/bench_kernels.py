"""Compare the compiled walk kernel with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--runs 2000] [--u 40]

Both backends are fed the same Philox streams, so besides timing this also
checks that they return identical (status, position, steps) triples.
"""
import argparse
import math
import time

from inspectruin import kernels
from inspectruin.laws import Erlang, Exponential, HyperErlang, Lognormal
from inspectruin.levy import BASE_MODEL
from inspectruin.montecarlo import _law_arrays, run_stream


def bench(walk, q, la, u, runs, seed=1):
    out = []
    t0 = time.perf_counter()
    for i in range(runs):
        out.append(walk(run_stream(seed, i), q.sigma2, q.r, q.lam, q.mu, la.cum_p, la.shape,
                        la.rate, la.lognormal, la.ln_m, la.ln_s, u, math.inf, 10 ** 8))
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--u", type=float, default=40.0)
    args = ap.parse_args()
    if kernels.compiled_walk is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    q = BASE_MODEL.twist()
    laws = [Exponential(1.0), Erlang(3, 3.0), HyperErlang((2, 3), (0.6, 0.4), 2.4),
            Lognormal(1.0, 1.0)]
    print(f"{'law':<12}{'python s':>10}{'cython s':>10}{'speedup':>9}  identical")
    for law in laws:
        la = _law_arrays(law)
        tp, rp = bench(kernels.python_walk, q, la, args.u, args.runs)
        tc, rc = bench(kernels.compiled_walk, q, la, args.u, args.runs)
        print(f"{law.family:<12}{tp:>10.3f}{tc:>10.3f}{tp / tc:>9.1f}  {rp == rc}")


if __name__ == "__main__":
    main()
