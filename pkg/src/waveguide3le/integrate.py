"""Adaptive Dormand-Prince 5(4) stepping for ``dy/dt = R y + w``."""
from __future__ import annotations

import numpy as np

# Dormand & Prince (1980), FSAL pair; propagate the 5th-order solution.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def integrate_linear(R, w, y0, t_eval, rtol=1e-10, atol=1e-13, h0=None, max_steps=10_000_000):
    """Integrate from ``t = 0`` and return the solution at each time in ``t_eval``.

    ``y0`` has shape ``(n,)`` or ``(n, k)``; a 1-D ``w`` is added to every
    column, a 2-D ``w`` column by column.  The local error of
    every accepted step satisfies ``|err| <= atol + rtol |y|`` componentwise.
    """
    R = np.asarray(R, dtype=complex)
    y = np.array(y0, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if y.ndim == 2 and w.ndim == 1:
        w = w[:, None]
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    if np.any(np.diff(t_eval) < 0) or np.any(t_eval < 0):
        raise ValueError("t_eval must be non-negative and ascending")
    out = np.empty((len(t_eval),) + y.shape, dtype=complex)

    def f(v):
        return R @ v + w

    scale_r = np.abs(R).max() if R.size else 1.0
    h = h0 if h0 is not None else 0.01 / max(scale_r, 1e-300)
    t = 0.0
    k1 = f(y)
    steps = 0
    for n, target in enumerate(t_eval):
        while t < target:
            clipped = h > target - t
            h_free = h
            h = min(h, target - t)
            k = [k1]
            for s in range(1, 7):
                ys = y + h * sum(a * kk for a, kk in zip(_A[s], k) if a != 0.0)
                k.append(f(ys))
            y_new = y + h * sum(b * kk for b, kk in zip(_B5, k) if b != 0.0)
            err = h * sum(e * kk for e, kk in zip(_E, k))
            tol = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            ratio = np.max(np.abs(err) / tol)
            if ratio <= 1.0:
                t += h
                y = y_new
                k1 = k[6]
                factor = 5.0 if ratio == 0 else min(5.0, 0.9 * ratio ** -0.2)
            else:
                factor = max(0.2, 0.9 * ratio ** -0.2)
            h *= factor
            if clipped and ratio <= 1.0:
                h = max(h, h_free)
            steps += 1
            if steps > max_steps:
                raise RuntimeError("step limit exceeded")
            if target - t <= 1e-15 * max(1.0, abs(target)):
                t = target
        out[n] = y
    return out
