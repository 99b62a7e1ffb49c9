"""Pure-Python reference kernels. Semantics must match ``_ckernels.pyx``."""

from __future__ import annotations

import numpy as np


def integrate_resets(t, y, reset):
    """Compensated trapezoidal running integral of ``y`` that restarts at ``reset``.

    ``reset[i]`` true means sample ``i`` is the instant right after a phase
    reset: its value is 0 and nothing is carried over from sample ``i - 1``.
    """
    t = np.ascontiguousarray(t, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    reset = np.ascontiguousarray(reset, dtype=np.uint8)
    n = t.shape[0]
    out = np.zeros(n, dtype=np.float64)
    tl = t.tolist()
    yl = y.tolist()
    rl = reset.tolist()
    acc = 0.0
    comp = 0.0
    res = [0.0] * n
    for i in range(1, n):
        if rl[i]:
            acc = 0.0
            comp = 0.0
        else:
            inc = 0.5 * (yl[i] + yl[i - 1]) * (tl[i] - tl[i - 1]) - comp
            s = acc + inc
            comp = (s - acc) - inc
            acc = s
        res[i] = acc
    out[:] = res
    return out


def violation_runs(t, dT, t_l):
    """Closed intervals ``(t_first, t_last)`` of consecutive samples with ``|dT| > t_l``."""
    tl = np.ascontiguousarray(t, dtype=np.float64).tolist()
    dl = np.ascontiguousarray(dT, dtype=np.float64).tolist()
    runs = []
    start = -1
    for i, d in enumerate(dl):
        if abs(d) > t_l:
            if start < 0:
                start = i
        elif start >= 0:
            runs.append((tl[start], tl[i - 1]))
            start = -1
    if start >= 0:
        runs.append((tl[start], tl[len(dl) - 1]))
    return runs


def max_excess(values, bounds):
    """``max(|values| - bounds)``; ``-inf`` for empty input."""
    vl = np.ascontiguousarray(values, dtype=np.float64).tolist()
    bl = np.ascontiguousarray(bounds, dtype=np.float64).tolist()
    worst = float("-inf")
    for v, b in zip(vl, bl):
        e = abs(v) - b
        if e > worst:
            worst = e
    return worst
