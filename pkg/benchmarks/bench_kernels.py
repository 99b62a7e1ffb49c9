"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Also times one end-to-end two-year simulation on each backend.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from oscbound import _kernels_py


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    try:
        from oscbound import _ckernels
    except ImportError:
        raise SystemExit("compiled kernels not built; run `pip install -e . --no-build-isolation`")

    n = args.samples
    rng = np.random.default_rng(0)
    t = np.cumsum(rng.uniform(1.0, 20.0, n))
    y = rng.uniform(-5e-6, 5e-6, n)
    reset = (rng.random(n) < 1e-4).astype(np.uint8)
    reset[0] = 0
    dT = _ckernels.integrate_resets(t, y, reset)
    bound = np.abs(dT) + 1e-3

    cases = {
        "integrate_resets": lambda m: m.integrate_resets(t, y, reset),
        "violation_runs": lambda m: m.violation_runs(t, dT, 1e-3),
        "max_excess": lambda m: m.max_excess(dT, bound),
    }
    print(f"{'kernel':<18}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}   ({n} samples)")
    for name, call in cases.items():
        tp = _best(lambda: call(_kernels_py), args.repeat)
        tc = _best(lambda: call(_ckernels), args.repeat)
        print(f"{name:<18}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")
        assert np.array_equal(np.asarray(call(_kernels_py)), np.asarray(call(_ckernels)))

    # end to end: the same scenario with each kernel set patched in
    from oscbound import catalog, clock_sim, kernels

    cfg = catalog.parse_scenario(
        "scenario.primary = RV-8803-C7\nscenario.accuracy = bound\n"
        "scenario.t_l = 165 s\nscenario.t_r = 2 y\n"
    )
    timings = {}
    for label, mod in (("python", _kernels_py), ("cython", _ckernels)):
        saved = clock_sim.kernels
        clock_sim.kernels = mod
        try:
            timings[label] = _best(lambda: clock_sim.simulate(cfg, 2 * 31_536_000.0), 1)
        finally:
            clock_sim.kernels = saved
    print(
        f"{'simulate 2 y':<18}{timings['python']:>12.4f}{timings['cython']:>12.4f}"
        f"{timings['python'] / timings['cython']:>9.1f}x   (default backend: {kernels.BACKEND})"
    )


if __name__ == "__main__":
    main()
