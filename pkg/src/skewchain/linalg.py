"""Dense complex matrix kernels shared by every other module.

All matrices are square ``numpy`` arrays of complex128 (pairs of 64-bit
floats).  Everything here is a pure function of its inputs; returned arrays
are fresh and safe to mutate by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteError,
    NotHermitianError,
    NotPSDError,
    NotSquareError,
)

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "HermitianEig",
    "as_matrix",
    "commutator",
    "frobenius_norm_sq",
    "hermitian_eigendecompose",
    "hermiticity_defect",
    "hs_inner",
    "max_abs",
    "psd_sqrt",
]


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex128 array, rejecting NaN/Inf entries."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise NonFiniteError()
    return arr


def require_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquareError(m.shape)
    return m.shape[0]


def max_abs(m: np.ndarray) -> float:
    """Entrywise max-norm ``max |m_ij|`` (0 for empty arrays)."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def hermiticity_defect(m: np.ndarray) -> float:
    """``max |M - M^dag|``."""
    return max_abs(m - m.conj().T)


def frobenius_norm_sq(m: np.ndarray) -> float:
    """Sum of squared moduli of all entries, via exact compensated summation."""
    flat = np.abs(np.asarray(m, dtype=np.complex128)).ravel()
    return math.fsum(float(x) * float(x) for x in flat)


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` ascend; ``eigenvectors`` holds the matching orthonormal
    eigenvectors as columns, with each column's phase fixed so that its
    largest-modulus component is real positive (deterministic tie-breaking).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_phases(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        mag = abs(a)
        if mag > 0.0:
            v[:, j] = col * (a.conjugate() / mag)
    return v


def hermitian_eigendecompose(m, hermiticity_tol: float = DEFAULT_TOL) -> HermitianEig:
    """Eigendecompose a Hermitian matrix with validated output.

    Raises
    ------
    NotSquareError, NotHermitianError, ConvergenceError
    """
    arr = as_matrix(m)
    require_square(arr)
    defect = hermiticity_defect(arr)
    if defect > hermiticity_tol:
        raise NotHermitianError(defect, hermiticity_tol)
    herm = (arr + arr.conj().T) / 2.0
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    v = _fix_phases(v)
    d = arr.shape[0]
    if max_abs(v.conj().T @ v - np.eye(d)) > 1e-10:
        raise ConvergenceError("eigenvector matrix is not unitary to 1e-10")
    if max_abs((v * w) @ v.conj().T - herm) > 1e-10:
        raise ConvergenceError("eigendecomposition does not reconstruct the input to 1e-10")
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def psd_sqrt(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root S with ``S @ S == rho`` to 1e-10.

    Eigenvalues in ``[-tol, 0)`` are clamped to 0 before the square root, so
    rounding noise in externally supplied states does not abort a run.
    """
    eig = hermitian_eigendecompose(rho, hermiticity_tol=tol)
    w = eig.eigenvalues
    if w[0] < -tol:
        raise NotPSDError(float(w[0]), tol)
    w = np.clip(w, 0.0, None)
    v = eig.eigenvectors
    s = (v * np.sqrt(w)) @ v.conj().T
    return (s + s.conj().T) / 2.0


def commutator(a, b) -> np.ndarray:
    """``A @ B - B @ A`` for square matrices of equal dimension."""
    am, bm = as_matrix(a), as_matrix(b)
    require_square(am)
    require_square(bm)
    if am.shape != bm.shape:
        raise DimensionMismatchError(f"commutator of shapes {am.shape} and {bm.shape}")
    return am @ bm - bm @ am


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(A^dag B)``.

    Conjugate-linear in the first slot.  Uses compensated summation so the
    result is independent of internal evaluation order.
    """
    am, bm = np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128)
    if am.shape != bm.shape:
        raise DimensionMismatchError(f"hs_inner of shapes {am.shape} and {bm.shape}")
    prod = (am.conj() * bm).ravel()
    return complex(math.fsum(prod.real.tolist()), math.fsum(prod.imag.tolist()))
