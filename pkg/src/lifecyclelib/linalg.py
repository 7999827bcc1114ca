#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Dense linear systems
--------------------

The value-determination equations and the stationary-distribution equations
are small, dense, square linear systems.
They are solved with Gaussian elimination with partial (row) pivoting.

.. autoclass:: DenseSystem
.. autofunction:: solve_dense
.. autofunction:: residual
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from lifecyclelib.config import PIVOT_TOLERANCE
from lifecyclelib.errors import ShapeMismatch, SingularMatrix

ArrayLike = Union[npt.NDArray[np.float64], Sequence[Sequence[float]], Sequence[float]]


@dataclass(frozen=True)
class DenseSystem:
    """The linear system ``a · x = b``.

    Attributes:
        a: Square ``n × n`` coefficient matrix.
        b: Right-hand side of length ``n``.
    """

    a: npt.NDArray[np.float64]
    b: npt.NDArray[np.float64]

    @classmethod
    def of(cls, a: ArrayLike, b: ArrayLike) -> DenseSystem:
        """Create a system from array-like data, checking its shape.

        Raises:
            ShapeMismatch: if `a` is not square or `b` does not match.
        """
        matrix = np.array(a, dtype=np.float64)
        rhs = np.array(b, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            error_msg = f"coefficient matrix must be square, got shape {matrix.shape}"
            raise ShapeMismatch(error_msg)
        if rhs.shape != (matrix.shape[0],):
            error_msg = f"right-hand side has shape {rhs.shape}, expected ({matrix.shape[0]},)"
            raise ShapeMismatch(error_msg)
        return cls(matrix, rhs)


def solve_dense(system: DenseSystem, *, tolerance: float = PIVOT_TOLERANCE) -> npt.NDArray[np.float64]:
    """Solve a square linear system by Gaussian elimination with partial pivoting.

    The input system is not modified.

    Args:
        system: The system to solve.
        tolerance: Relative singularity threshold. Elimination fails when the pivot
            of a column has a magnitude of at most `tolerance` times the largest
            magnitude of that column in the original matrix.

    Returns:
        The solution vector ``x``.

    Raises:
        SingularMatrix: if a pivot falls below the threshold.
    """
    checked = DenseSystem.of(system.a, system.b)
    a = checked.a.copy()
    b = checked.b.copy()
    n = len(b)
    column_scale = np.max(np.abs(a), axis=0) if n else np.zeros(0)

    for k in range(n):
        p = int(np.argmax(np.abs(a[k:, k]))) + k
        if abs(a[p, k]) <= tolerance * column_scale[k]:
            error_msg = f"matrix is singular: no usable pivot in column {k}"
            raise SingularMatrix(error_msg, column=k)
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            if a[i, k] != 0.0:
                lam = a[i, k] / a[k, k]
                a[i, k + 1 :] -= lam * a[k, k + 1 :]
                a[i, k] = 0.0
                b[i] -= lam * b[k]

    x = np.zeros(n, dtype=np.float64)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - np.dot(a[k, k + 1 :], x[k + 1 :])) / a[k, k]
    return x


def residual(system: DenseSystem, x: ArrayLike) -> float:
    """The max-norm of ``a · x − b``."""
    difference = np.asarray(system.a, dtype=np.float64) @ np.asarray(x, dtype=np.float64) - system.b
    return float(np.max(np.abs(difference))) if difference.size else 0.0
