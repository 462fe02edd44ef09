"""Gaussian elimination with partial pivoting for small complex systems."""

from __future__ import annotations

import numpy as np

PIVOT_RTOL = 1e-12


class SingularMatrixError(ArithmeticError):
    pass


def solve(a, b, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Solve ``a @ x = b`` for a small dense complex matrix.

    The pivot in each column is the largest-magnitude candidate, lowest row
    index on ties. Raises :class:`SingularMatrixError` if a pivot magnitude
    falls below ``rtol`` times the largest entry of ``a``.
    """
    a = np.array(a, dtype=complex)
    x = np.array(b, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or x.shape != (n,):
        raise ValueError(f"incompatible shapes {a.shape} and {x.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if not np.isfinite(scale):
        raise SingularMatrixError("matrix has non-finite entries")
    tol = rtol * scale
    for col in range(n):
        # np.argmax returns the first maximum, which gives lowest-index ties
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if not abs(a[p, col]) > tol:
            raise SingularMatrixError(f"pivot {col} below tolerance")
        if p != col:
            a[[col, p]] = a[[p, col]]
            x[[col, p]] = x[[p, col]]
        for r in range(col + 1, n):
            f = a[r, col] / a[col, col]
            a[r, col:] -= f * a[col, col:]
            x[r] -= f * x[col]
    for col in range(n - 1, -1, -1):
        x[col] = (x[col] - a[col, col + 1:] @ x[col + 1:]) / a[col, col]
    return x


def det(a) -> complex:
    """Determinant via the same pivoted elimination; zero for singular input."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    d = 1.0 + 0.0j
    for col in range(n):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if a[p, col] == 0:
            return 0j
        if p != col:
            a[[col, p]] = a[[p, col]]
            d = -d
        d *= a[col, col]
        for r in range(col + 1, n):
            a[r, col:] -= (a[r, col] / a[col, col]) * a[col, col:]
    return complex(d)


def hadamard_ratio(a) -> float:
    """``|det a|`` divided by the product of row norms, in ``[0, 1]``."""
    a = np.asarray(a, dtype=complex)
    norms = np.linalg.norm(a, axis=1)
    denom = float(np.prod(norms))
    if denom == 0.0:
        return 0.0
    return min(1.0, abs(det(a)) / denom)
