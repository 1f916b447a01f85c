"""Partial-pivot LU for stacks of small dense complex systems."""
from __future__ import annotations

import numpy as np

from .errors import SingularSystem

PIVOT_RTOL = 1e-14


def lu_factor(a, pivot_rtol=PIVOT_RTOL):
    """Factor ``a`` (shape ``(..., n, n)``) as ``P a = L U``.

    Returns the packed factors (unit lower triangle below the diagonal, ``U``
    on and above it) and the row permutation for every matrix in the stack.
    Raises :class:`SingularSystem` if any pivot is smaller than
    ``pivot_rtol`` times the largest entry of its matrix.
    """
    lu = np.array(a, dtype=complex, copy=True)
    n = lu.shape[-1]
    if lu.shape[-2] != n:
        raise ValueError("lu_factor needs square matrices")
    batch = lu.shape[:-2]
    lu = lu.reshape((-1, n, n))
    m = lu.shape[0]
    perm = np.tile(np.arange(n), (m, 1))
    scale = np.abs(lu).max(axis=(1, 2))
    rows = np.arange(m)
    for k in range(n):
        p = k + np.argmax(np.abs(lu[:, k:, k]), axis=1)
        pivot = lu[rows, p, k]
        bad = np.abs(pivot) <= pivot_rtol * scale
        if np.any(bad):
            raise SingularSystem(
                f"pivot {np.abs(pivot[bad]).min():.3e} in column {k} is below "
                f"{pivot_rtol:g} of the matrix scale"
            )
        swap = p != k
        if np.any(swap):
            idx = rows[swap]
            lu[idx, k], lu[idx, p[swap]] = lu[idx, p[swap]].copy(), lu[idx, k].copy()
            perm[idx, k], perm[idx, p[swap]] = perm[idx, p[swap]], perm[idx, k].copy()
        lu[:, k + 1:, k] /= lu[:, k, k][:, None]
        lu[:, k + 1:, k + 1:] -= lu[:, k + 1:, k][:, :, None] * lu[:, k, k + 1:][:, None, :]
    return lu.reshape(batch + (n, n)), perm.reshape(batch + (n,))


def lu_solve(factors, b):
    """Solve with the output of :func:`lu_factor`.  ``b`` has shape ``(..., n)`` or ``(..., n, k)``."""
    lu, perm = factors
    n = lu.shape[-1]
    b = np.asarray(b, dtype=complex)
    vector = b.ndim == lu.ndim - 1
    if vector:
        b = b[..., None]
    x = np.take_along_axis(b, perm[..., None], axis=-2).copy()
    for k in range(n):
        x[..., k + 1:, :] -= lu[..., k + 1:, k, None] * x[..., k, None, :]
    for k in range(n - 1, -1, -1):
        x[..., k, :] -= np.einsum("...j,...jc->...c", lu[..., k, k + 1:], x[..., k + 1:, :])
        x[..., k, :] /= lu[..., k, k, None]
    return x[..., 0] if vector else x


def solve(a, b, pivot_rtol=PIVOT_RTOL):
    return lu_solve(lu_factor(a, pivot_rtol), b)
