"""Compare the compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from qcpart import _kernels_py, kernels, partition, peg, simulate
from qcpart.decoder import LayeredDecoder
from qcpart.qc import expand, load_base_matrix

DATA = "src/qcpart/data/b0.txt"


def time_fn(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    print(f"active backend: {kernels.BACKEND}")
    b0 = load_base_matrix(DATA)
    h0 = expand(b0)
    scheme = partition.solve_greedy(h0, 6).scheme
    dec = LayeredDecoder(h0, scheme, max_iters=10)
    llr = simulate.gen_frame_llrs(3.2, simulate.default_rate(h0), h0.num_cols, (0, 0, 0))
    args = (dec.layers, dec._row_ptr, dec._cols, llr, 10, 30.0)
    if kernels.BACKEND == "compiled":
        from qcpart import _speedups

        t_c = time_fn(_speedups.spa_decode, *args)
        print(f"spa_decode  compiled: {t_c * 1e3:8.1f} ms/frame")
    t_p = time_fn(_kernels_py.spa_decode, *args, repeat=2)
    print(f"spa_decode  python:   {t_p * 1e3:8.1f} ms/frame")
    if kernels.BACKEND == "compiled":
        print(f"speedup: {t_p / t_c:.1f}x")

    g = peg.TannerGraph(b0.M, b0.N, b0.Z)
    rng = np.random.default_rng(0)
    for n in range(b0.N):
        for _ in range(b0.column_degrees()[n]):
            g.add_ces(int(rng.integers(b0.M * b0.Z)), n * b0.Z)
    vp, vc, cp, cv = g.csr()
    cands = rng.integers(0, b0.M * b0.Z, size=50)

    def run_bfs(mod):
        for c in cands:
            mod.bfs_ces_cycle(vp, vc, cp, cv, b0.Z, 0, int(c))

    if kernels.BACKEND == "compiled":
        from qcpart import _speedups

        t_c = time_fn(run_bfs, _speedups)
        print(f"bfs_ces x50 compiled: {t_c * 1e3:8.1f} ms")
    t_p = time_fn(run_bfs, _kernels_py, repeat=2)
    print(f"bfs_ces x50 python:   {t_p * 1e3:8.1f} ms")
    if kernels.BACKEND == "compiled":
        print(f"speedup: {t_p / t_c:.1f}x")


if __name__ == "__main__":
    main()
