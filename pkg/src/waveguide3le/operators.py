"""Operators on the three emitter levels, in the basis of matrix units ``|i><j|``.

Used to evaluate equal-time products such as ``<mu^+ V_k mu>`` and map them
back onto the eight tracked expectations.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "OperatorExpr",
    "basis",
    "identity",
    "SIGMA",
    "MU",
    "NU",
    "SLOT_OPERATORS",
    "reduce_product",
    "tracked_coefficients",
    "expectation",
]


@dataclass(frozen=True, eq=False)
class OperatorExpr:
    """Linear combination ``sum_ij c[i-1, j-1] |i><j|``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.shape != (3, 3):
            raise ValueError("an emitter operator has a 3x3 coefficient table")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __matmul__(self, other: "OperatorExpr") -> "OperatorExpr":
        return OperatorExpr(self.coefficients @ other.coefficients)

    def __add__(self, other):
        return OperatorExpr(self.coefficients + other.coefficients)

    def __sub__(self, other):
        return OperatorExpr(self.coefficients - other.coefficients)

    def __mul__(self, scalar):
        return OperatorExpr(scalar * self.coefficients)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, OperatorExpr) and np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash(self.coefficients.tobytes())

    @property
    def dag(self) -> "OperatorExpr":
        return OperatorExpr(self.coefficients.conj().T)

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def __repr__(self):
        terms = [
            f"{c:g}|{i + 1}><{j + 1}|"
            for (i, j), c in np.ndenumerate(self.coefficients)
            if c != 0
        ]
        return "OperatorExpr(" + (" + ".join(terms) or "0") + ")"


def basis(i: int, j: int) -> OperatorExpr:
    """Matrix unit ``|i><j|`` with levels numbered 1..3."""
    c = np.zeros((3, 3), dtype=complex)
    c[i - 1, j - 1] = 1.0
    return OperatorExpr(c)


def identity() -> OperatorExpr:
    return OperatorExpr(np.eye(3))


SIGMA = basis(1, 2)
MU = basis(2, 3)
NU = basis(3, 1)

SLOT_OPERATORS = (
    NU.dag,
    SIGMA,
    MU.dag,
    NU @ NU.dag,
    SIGMA @ SIGMA.dag,
    MU,
    SIGMA.dag,
    NU,
)

_OFFDIAG_SLOT = {(0, 2): 0, (0, 1): 1, (2, 1): 2, (1, 2): 5, (1, 0): 6, (2, 0): 7}


def reduce_product(ops) -> OperatorExpr:
    """Exact product of a sequence of operators, left to right."""
    ops = list(ops)
    if not ops:
        return identity()
    return reduce(lambda a, b: a @ b, ops)


def tracked_coefficients(expr: OperatorExpr):
    """Write ``expr`` as ``c * 1 + sum_k a[k] V_k``.

    The level-2 population is replaced by ``1 - P1 - P3``.  Returns ``(c, a)``.
    """
    m = expr.coefficients
    c = m[1, 1]
    a = np.zeros(8, dtype=complex)
    for (i, j), slot in _OFFDIAG_SLOT.items():
        a[slot] = m[i, j]
    a[3] = m[2, 2] - c
    a[4] = m[0, 0] - c
    return c, a


def expectation(expr: OperatorExpr, slots, norm=1.0):
    """``<B expr>`` given the tracked vector ``<B V_k>`` and ``norm = <B>``.

    With ``norm = 1`` and ``slots`` a single-time state this is the ordinary
    expectation value.  ``slots`` may carry trailing batch axes.
    """
    c, a = tracked_coefficients(expr)
    slots = np.asarray(slots)
    return c * norm + np.tensordot(a, slots, axes=(0, 0))
