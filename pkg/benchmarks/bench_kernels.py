"""Benchmark: compiled kernels against the pure-numpy fallback.

Times the two series kernels on representative shapes (dense working
series, sparse high-valuation tails) and one end-to-end pipeline stage.

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from tmotive.ffield import ambient_field
from tmotive._kernels import pure

try:
    from tmotive._kernels import _speedups
except ImportError:
    _speedups = None


def mk_series(rng, n, lo, hi):
    e = np.sort(rng.choice(np.arange(lo, hi), size=n, replace=False)).astype(np.int64)
    c = rng.integers(1, 81, size=n).astype(np.int64)
    return e, c


def time_fn(fn, *args, reps=20):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def bench_kernels():
    F = ambient_field(3, 1, 4)
    rng = np.random.default_rng(0)
    tables = (F.log_np, F.exp_np, F.zech_np, F.lane_exp_np, F.order - 1, F.p, F.D)
    shapes = [
        ("dense 1500x1500", mk_series(rng, 1500, -80, 1600),
         mk_series(rng, 1500, -80, 1600), 1600),
        ("dense 300x300", mk_series(rng, 300, -80, 1600),
         mk_series(rng, 300, -80, 1600), 1600),
        ("small 20x20", mk_series(rng, 20, -80, 400),
         mk_series(rng, 20, -80, 400), 1600),
        ("sparse tail", mk_series(rng, 8, 10 ** 6, 10 ** 6 + 50),
         mk_series(rng, 8, 10 ** 6, 10 ** 6 + 50), 4 * 10 ** 6),
    ]
    backends = [("pure", pure)] + ([("compiled", _speedups)] if _speedups else [])
    print(f"{'shape':<16} {'op':<4} " + " ".join(f"{n:>10}" for n, _ in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for label, (e1, c1), (e2, c2), cap in shapes:
        for opname in ("mul", "add"):
            times = []
            for _, mod in backends:
                fn = mod.series_mul if opname == "mul" else mod.series_add_merge
                times.append(time_fn(fn, e1, c1, e2, c2, *tables, cap))
            row = f"{label:<16} {opname:<4} " + " ".join(f"{t*1e3:>8.3f}ms" for t in times)
            if len(times) == 2:
                row += f"   {times[0] / times[1]:>6.1f}x"
            print(row)


def bench_pipeline():
    import os
    import subprocess
    import sys
    print("\nend-to-end lattice map (n=2), subprocess per backend:")
    sys.stdout.flush()
    snippet = (
        "import time; t0=time.time();"
        "from tmotive.ffield import ambient_field;"
        "from tmotive.cinf import t_uniformizer;"
        "from tmotive.anderson import make_tmotive;"
        "from tmotive.latticemap import mu13;"
        "import tmotive;"
        "F=ambient_field(3,1,4); t=t_uniformizer(F,8,200);"
        "A=[[t**3,t**4],[t**5,t**3]];"
        "mu13(make_tmotive(A));"
        "print(f'  {tmotive.KERNEL_BACKEND}: {time.time()-t0:.2f}s')"
    )
    for env_flag in ("", "1"):
        env = dict(os.environ)
        if env_flag:
            env["TMOTIVE_PURE"] = env_flag
        elif _speedups is None:
            continue
        subprocess.run([sys.executable, "-c", snippet], env=env, check=True)


if __name__ == "__main__":
    bench_kernels()
    bench_pipeline()
