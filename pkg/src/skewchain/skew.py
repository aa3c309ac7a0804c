"""Skew information of observables, Kraus operators and channels.

The central object is the commutator frame ``[sqrt(rho), K]`` together with
its columns in the computational basis.  Column vectors are always taken in
that fixed basis: the k-th frame vector is literally the k-th matrix column.
Downstream bound chains are basis dependent, so this choice is part of the
contract rather than an implementation detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError
from .linalg import as_matrix, commutator, hermiticity_defect, hs_inner
from .objects import DensityMatrix, KrausChannel

__all__ = [
    "CommutatorFrame",
    "commutator_frame",
    "observable_commutator_bound",
    "skew_info_channel",
    "skew_info_observable",
    "skew_info_operator",
]


@dataclass(frozen=True)
class CommutatorFrame:
    """``[sqrt(rho), K]`` with its computational-basis columns.

    Half the summed squared column norms equals the skew information of K,
    which ties the frame to the quantity it feeds.
    """

    source_operator_index: int
    matrix: np.ndarray

    @property
    def columns(self) -> tuple:
        return tuple(self.matrix[:, k] for k in range(self.matrix.shape[1]))

    def column_norms_sq(self) -> np.ndarray:
        """Squared 2-norm of each column, exactly summable."""
        return np.einsum("ij,ij->j", self.matrix.conj(), self.matrix).real


def commutator_frame(rho: DensityMatrix, op, index: int = 0) -> CommutatorFrame:
    mat = as_matrix(op)
    if mat.shape != (rho.dim, rho.dim):
        raise DimensionMismatchError(
            f"operator of shape {mat.shape} against a dim-{rho.dim} state")
    frame = commutator(rho.sqrt_rho, mat)
    frame.setflags(write=False)
    return CommutatorFrame(source_operator_index=index, matrix=frame)


def skew_info_operator(rho: DensityMatrix, op) -> float:
    """``(1/2) Tr([sqrt(rho), K]^dag [sqrt(rho), K])``, clamped to >= 0.

    This dagger form is the definition used for arbitrary (not necessarily
    Hermitian) Kraus operators; it coincides with the squared-commutator form
    on the Hermitian cone only.
    """
    frame = commutator_frame(rho, op)
    value = 0.5 * math.fsum(frame.column_norms_sq().tolist())
    return max(value, 0.0)


def skew_info_channel(rho: DensityMatrix, channel: KrausChannel) -> float:
    """Sum of per-Kraus skew informations, in fixed operator order."""
    if channel.dim != rho.dim:
        raise DimensionMismatchError(
            f"dim-{channel.dim} channel against a dim-{rho.dim} state")
    return math.fsum(skew_info_operator(rho, k) for k in channel.operators)


def skew_info_observable(rho: DensityMatrix, a, hermiticity_tol: float = 1e-10) -> float:
    """``-(1/2) Tr([sqrt(rho), A]^2)`` for Hermitian A."""
    mat = as_matrix(a)
    defect = hermiticity_defect(mat)
    if defect > hermiticity_tol:
        raise NotHermitianError(defect, hermiticity_tol)
    c = commutator(rho.sqrt_rho, mat)
    return max(-0.5 * float(np.trace(c @ c).real), 0.0)


def observable_commutator_bound(rho: DensityMatrix, a, b,
                                hermiticity_tol: float = 1e-10) -> float:
    """``(1/4) |Tr(rho [A, B])|^2`` for Hermitian A, B.

    Returned as a check value for callers comparing it against the product of
    skew informations; the comparison can fail for mixed states, so nothing is
    asserted here.
    """
    am, bm = as_matrix(a), as_matrix(b)
    for mat in (am, bm):
        defect = hermiticity_defect(mat)
        if defect > hermiticity_tol:
            raise NotHermitianError(defect, hermiticity_tol)
    expectation = hs_inner(rho.rho, commutator(am, bm))  # Tr(rho [A,B]), rho Hermitian
    return 0.25 * abs(expectation) ** 2
