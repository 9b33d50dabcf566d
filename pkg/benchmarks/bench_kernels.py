"""Benchmark the jitted LSTM kernels against the pure-numpy fallback.

The numpy path is the same source run uninjitted (``.py_func``), which is
exactly what the package falls back to when ECPE_JIT=0 or numba is absent.
Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from emocause.nn import kernels

# (label, timesteps, input dim, hidden) — reference model sizes and the
# reduced sizes the synthetic end-to-end run uses
CONFIGS = [
    ("emotion reference  (T=40,  D=300, H=256)", 40, 300, 256),
    ("cause reference    (T=8,   D=2400, H=1024)", 8, 2400, 1024),
    ("emotion synthetic  (T=12,  D=16,  H=32)", 12, 16, 32),
    ("cause synthetic    (T=6,   D=128, H=64)", 6, 128, 64),
]


def make_instance(rng, steps, dim, hidden):
    return (rng.normal(size=(4 * hidden, dim)) * 0.1,
            rng.normal(size=(4 * hidden, hidden)) * 0.1,
            rng.normal(size=4 * hidden) * 0.1,
            rng.normal(size=(steps, dim)),
            rng.normal(size=(steps, hidden)))


def run_pass(fwd, bwd, w_x, w_h, b, xs, d_out):
    cache = fwd(w_x, w_h, b, xs)
    return cache, bwd(w_x, w_h, xs, *cache, d_out)


def time_pass(fwd, bwd, instance, reps):
    w_x, w_h, b, xs, d_out = instance
    run_pass(fwd, bwd, w_x, w_h, b, xs, d_out)  # warmup / JIT compile
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        run_pass(fwd, bwd, w_x, w_h, b, xs, d_out)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    jit_fwd, jit_bwd = kernels.lstm_forward_seq, kernels.lstm_backward_seq
    if kernels.JIT_ENABLED:
        py_fwd, py_bwd = jit_fwd.py_func, jit_bwd.py_func
        print("numba JIT enabled; comparing against the numpy fallback\n")
    else:
        py_fwd, py_bwd = jit_fwd, jit_bwd
        print("JIT disabled (ECPE_JIT=0 or numba missing); "
              "both columns run the numpy path\n")

    rng = np.random.default_rng(0)
    header = f"{'config':<46} {'numpy':>10} {'jit':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, steps, dim, hidden in CONFIGS:
        instance = make_instance(rng, steps, dim, hidden)
        w_x, w_h, b, xs, d_out = instance

        # both paths must agree before timing means anything
        cache_a, grads_a = run_pass(py_fwd, py_bwd, w_x, w_h, b, xs, d_out)
        cache_b, grads_b = run_pass(jit_fwd, jit_bwd, w_x, w_h, b, xs, d_out)
        for a, b_ in zip(list(cache_a) + list(grads_a),
                         list(cache_b) + list(grads_b)):
            assert np.allclose(a, b_, atol=1e-10), "paths disagree"

        t_py = time_pass(py_fwd, py_bwd, instance, reps=20)
        t_jit = time_pass(jit_fwd, jit_bwd, instance, reps=20)
        print(f"{label:<46} {t_py * 1e3:>8.2f}ms {t_jit * 1e3:>8.2f}ms "
              f"{t_py / t_jit:>7.2f}x")


if __name__ == "__main__":
    main()
