"""Time the scoring kernels under numba and plain numpy.

    python3 benchmarks/bench_kernels.py [--repeat N] [--size small|large]

Both backends are checked for equal results before anything is timed.
"""

import argparse
import time

import numpy as np

from prodbg import _kernels
from prodbg._kernels import FORMULA_CODE, numpy_impl

SIZES = {"small": (40, 30, 400), "large": (2000, 500, 20000)}


def inputs(n_tests, n_clauses, n_mutants, seed=0):
    rng = np.random.default_rng(seed)
    cov = rng.random((n_tests, n_clauses)) < 0.3
    failed = rng.random(n_tests) < 0.2
    kill = rng.random((n_mutants, n_tests)) < 0.1
    origin = rng.integers(0, n_clauses, n_mutants)
    ranks = np.array([rng.permutation(n_clauses) + 1 for _ in range(200)])
    truth = rng.random((200, n_clauses)) < 0.05
    truth[:, 0] = True
    return cov, failed, kill, origin, ranks, truth


def workload(impl, cov, failed, kill, origin, ranks, truth):
    ep, ef, np_, nf = impl.spectrum_counts(cov, failed)
    out = [impl.formula_scores(ep, ef, np_, nf, code) for code in FORMULA_CODE.values()]
    kf, kp = impl.kill_stats(kill, failed)
    n_failed = int(failed.sum())
    n_clauses = cov.shape[1]
    out.append(impl.metallaxis(kf, kp, origin, n_clauses, n_failed))
    out.append(impl.muse(kf, kp, origin, n_clauses, n_failed, len(failed) - n_failed))
    out.append(impl.min_ranks(ranks, truth))
    return out


def timed(impl, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        workload(impl, *args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--size", choices=sorted(SIZES), default="large")
    opts = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    args = inputs(*SIZES[opts.size])
    t0 = time.perf_counter()
    jit_out = workload(_kernels.numba_impl, *args)  # includes compilation
    compile_s = time.perf_counter() - t0
    for a, b in zip(jit_out, workload(numpy_impl, *args)):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    t_np = timed(numpy_impl, args, opts.repeat)
    t_nb = timed(_kernels.numba_impl, args, opts.repeat)
    n_tests, n_clauses, n_mutants = SIZES[opts.size]
    print(f"size {opts.size}: {n_tests} tests, {n_clauses} clauses, {n_mutants} mutants")
    print(f"numba first call (compile + run): {compile_s:.2f} s")
    print(f"numpy  {t_np * 1000:9.3f} ms")
    print(f"numba  {t_nb * 1000:9.3f} ms   speedup x{t_np / t_nb:.1f}")


if __name__ == "__main__":
    main()
