#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Dense real symmetric linear algebra for density matrices.

Matrices are plain ``numpy`` float64 arrays; :func:`as_symmetric` is the gate that checks
squareness and symmetry. Two eigensolvers are available:

- ``"lapack"``: ``numpy.linalg.eigvalsh`` (Householder tridiagonalization + QL/divide and
  conquer), the default.
- ``"jacobi"``: cyclic Jacobi rotations, see :func:`jacobi_eigen`.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, validator

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
OFFDIAGONAL_THRESHOLD = 1e-12
CLAMP_TOLERANCE = 1e-9
EIGENSOLVERS = ("lapack", "jacobi")

# Type alias: a square, symmetric float64 array (see as_symmetric).
SymMatrix = np.ndarray


class LinalgError(RuntimeError):
    """Base class for custom errors raised by this module."""


class DimensionError(LinalgError):
    """Raised on non-square or non-conformable operands."""


class ConvergenceError(LinalgError):
    """Raised when an eigensolver exhausts its iteration budget."""


class NegativeEigenvalueError(LinalgError):
    """Raised when a density matrix has an eigenvalue below -CLAMP_TOLERANCE."""


class Spectrum(BaseModel):
    """Eigenvalues of a symmetric matrix, in descending order."""

    eigenvalues: Tuple[float, ...]

    class Config:
        """Pydantic config."""

        frozen = True

    @validator("eigenvalues")
    def validate_order(cls, eigenvalues):  # noqa: N805  # pydantic wants 'cls' as first arg
        """Eigenvalues must be sorted descending."""
        if any(a < b for a, b in zip(eigenvalues, eigenvalues[1:])):
            raise ValueError("eigenvalues must be sorted in descending order")
        return eigenvalues

    def as_array(self) -> np.ndarray:
        """Return the eigenvalues as a float64 array."""
        return np.asarray(self.eigenvalues, dtype=np.float64)

    def clamped(self, tolerance: float = CLAMP_TOLERANCE) -> np.ndarray:
        """Return eigenvalues with rounding noise in [-tolerance, 0) set to zero.

        Raises:
            NegativeEigenvalueError: if an eigenvalue lies below ``-tolerance``.
        """
        values = self.as_array()
        smallest = values.min()
        if smallest < -tolerance:
            raise NegativeEigenvalueError(
                f"eigenvalue {smallest:.3e} below -{tolerance:g}: not a density matrix"
            )
        if smallest < -1e-12:
            logger.warning("clamping negative eigenvalue %.3e to zero", smallest)
        return np.where(values < 0.0, 0.0, values)


def as_symmetric(m, atol: float = SYMMETRY_TOLERANCE) -> SymMatrix:
    """Return ``m`` as a float64 array after checking it is square and symmetric.

    Raises:
        DimensionError: if ``m`` is not a non-empty square matrix.
        LinalgError: if ``m`` is not symmetric within ``atol`` or holds NaN or inf.
    """
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise LinalgError("matrix has non-finite entries")
    asymmetry = np.abs(arr - arr.T).max()
    if asymmetry > atol:
        raise LinalgError(f"matrix is not symmetric (max |m - m.T| = {asymmetry:.3e})")
    return arr


def outer(v) -> SymMatrix:
    """Return the outer product ``v v^T``."""
    vec = np.asarray(v, dtype=np.float64).ravel()
    if vec.size == 0:
        raise DimensionError("outer product of an empty vector")
    return np.outer(vec, vec)


def trace(m) -> float:
    """Return the trace of a square matrix."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"trace of a non-square matrix, shape {arr.shape}")
    return float(np.trace(arr))


def matmul(a, b) -> np.ndarray:
    """Return the matrix product ``a @ b``.

    Raises:
        DimensionError: if the inner dimensions do not agree.
    """
    left, right = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[0]:
        raise DimensionError(f"cannot multiply shapes {left.shape} and {right.shape}")
    return left @ right


def purity(m) -> float:
    """Return Tr(m^2): 1 for a pure state, below 1 for a mixed one."""
    return trace(matmul(m, m))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p, q] (in place) with one Jacobi rotation, accumulating it into v."""
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    a[p, q] = a[q, p] = 0.0

    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def jacobi_eigen(
    m, threshold: float = OFFDIAGONAL_THRESHOLD, max_sweeps: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every (p, q) pair above the diagonal in row order until the off-diagonal
    Frobenius norm falls below ``threshold`` times ``max(1, ||m||_F)``.

    Args:
        m: symmetric matrix.
        threshold: relative off-diagonal convergence threshold.
        max_sweeps: sweep budget; defaults to 100 * dim.

    Returns:
        Eigenvalues in descending order and the matching orthonormal eigenvectors (columns).

    Raises:
        ConvergenceError: if the sweep budget runs out.
    """
    a = as_symmetric(m).copy()
    dim = a.shape[0]
    v = np.eye(dim)
    budget = max_sweeps if max_sweeps is not None else 100 * dim
    tolerance = threshold * max(1.0, float(np.linalg.norm(a)))

    for sweep in range(budget + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tolerance:
            logger.debug("jacobi converged after %d sweeps (dim=%d)", sweep, dim)
            break
        if sweep == budget:
            raise ConvergenceError(
                f"jacobi did not converge in {budget} sweeps (off-diagonal norm {off:.3e})"
            )
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)

    order = np.argsort(np.diag(a), kind="stable")[::-1]
    return np.diag(a)[order], v[:, order]


def sym_eigenvalues(m, method: str = "lapack") -> Spectrum:
    """Return the spectrum of a symmetric matrix, sorted descending.

    Raises:
        ValueError: on an unknown ``method``.
        ConvergenceError: if the chosen solver fails to converge.
    """
    sym = as_symmetric(m)
    if method == "lapack":
        try:
            values = np.linalg.eigvalsh(sym)[::-1]
        except np.linalg.LinAlgError as e:
            raise ConvergenceError("LAPACK symmetric eigensolver did not converge") from e
    elif method == "jacobi":
        values, _ = jacobi_eigen(sym)
    else:
        raise ValueError(f"unknown eigensolver {method!r}; expected one of {EIGENSOLVERS}")
    return Spectrum(eigenvalues=tuple(float(x) for x in np.sort(values)[::-1]))
