"""Validated quantum states and channels, plus seeded random instances.

Two completeness conventions coexist because physically interesting Kraus
families are sometimes normalized as ``sum_i K_i K_i^dag = I`` (row sum)
rather than the standard trace-preservation condition
``sum_i K_i^dag K_i = I`` (column sum).  The worked-example channels satisfy
only the row-sum form; randomly generated channels default to column sum.

All randomness flows through ``numpy``'s PCG64 bit generator seeded from a
64-bit integer, so identical seeds produce bit-identical objects and ports
can reproduce the streams from the published PCG64 reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    CompletenessError,
    DimensionMismatchError,
    NotHermitianError,
    NotUnitaryError,
    TraceNotOneError,
)
from .linalg import DEFAULT_TOL, as_matrix, hermiticity_defect, max_abs, psd_sqrt, require_square

__all__ = [
    "Convention",
    "DensityMatrix",
    "KrausChannel",
    "apply_channel",
    "derive_seed",
    "generator",
    "mix_kraus",
    "random_channel",
    "random_density",
    "random_unitary",
    "validate_channel",
    "validate_density",
]


class Convention(str, Enum):
    """Which completeness sum a Kraus family is validated against."""

    ROW_SUM = "row_sum"        # sum_i K_i K_i^dag = I
    COLUMN_SUM = "column_sum"  # sum_i K_i^dag K_i = I


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A validated d-dimensional state with its PSD square root cached."""

    dim: int
    rho: np.ndarray
    sqrt_rho: np.ndarray
    validation_tol: float


def validate_density(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check Hermiticity, positivity and unit trace, and cache ``sqrt(rho)``.

    Raises
    ------
    NotHermitianError, NotPSDError, TraceNotOneError
    """
    arr = as_matrix(m)
    d = require_square(arr)
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise NotHermitianError(defect, tol)
    trace_dev = abs(complex(np.trace(arr)) - 1.0)
    if trace_dev > tol:
        raise TraceNotOneError(trace_dev, tol)
    sqrt = psd_sqrt(arr, tol=tol)  # raises NotPSDError on negative spectrum
    return DensityMatrix(dim=d, rho=_frozen(arr), sqrt_rho=_frozen(sqrt), validation_tol=tol)


@dataclass(frozen=True)
class KrausChannel:
    """An ordered Kraus family with a declared completeness convention."""

    dim: int
    operators: tuple
    convention: Convention
    completeness_tol: float

    @property
    def n(self) -> int:
        return len(self.operators)


def completeness_residual(ops, convention: Convention) -> float:
    """Max-norm deviation of the convention's completeness sum from identity."""
    d = ops[0].shape[0]
    acc = np.zeros((d, d), dtype=np.complex128)
    for k in ops:
        acc += k @ k.conj().T if convention == Convention.ROW_SUM else k.conj().T @ k
    return max_abs(acc - np.eye(d))


def validate_channel(ops, convention: Convention = Convention.COLUMN_SUM,
                     tol: float = DEFAULT_TOL) -> KrausChannel:
    """Validate a Kraus family against the chosen completeness convention.

    Raises
    ------
    DimensionMismatchError, CompletenessError, ValueError
    """
    mats = [as_matrix(k) for k in ops]
    if not mats:
        raise ValueError("a channel needs at least one Kraus operator")
    d = require_square(mats[0])
    for k in mats[1:]:
        if k.shape != (d, d):
            raise DimensionMismatchError(
                f"Kraus operators have mixed shapes: {(d, d)} vs {k.shape}")
    if len(mats) > d * d:
        raise ValueError(f"{len(mats)} Kraus operators exceed the d^2 = {d * d} maximum")
    convention = Convention(convention)
    residual = completeness_residual(mats, convention)
    if residual > tol:
        raise CompletenessError(residual, convention.value, tol)
    return KrausChannel(dim=d, operators=tuple(_frozen(k) for k in mats),
                        convention=convention, completeness_tol=tol)


def apply_channel(channel: KrausChannel, state) -> np.ndarray:
    """``sum_i K_i rho K_i^dag`` for a DensityMatrix or raw matrix."""
    rho = state.rho if isinstance(state, DensityMatrix) else as_matrix(state)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionMismatchError(
            f"state of shape {rho.shape} fed to a dim-{channel.dim} channel")
    out = np.zeros_like(rho)
    for k in channel.operators:
        out += k @ rho @ k.conj().T
    return out


# ---------------------------------------------------------------------------
# Seeded random instances


def generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit unsigned seed."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seed(seed: int, *parts: int) -> int:
    """Stable 64-bit sub-seed for (seed, parts), via numpy's SeedSequence."""
    ss = np.random.SeedSequence(entropy=[int(seed), *[int(p) for p in parts]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _complex_gaussian(gen: np.random.Generator, shape) -> np.ndarray:
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2.0)


def random_density(d: int, rank: int, seed: int, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """``G G^dag / Tr(G G^dag)`` for a seeded d-by-rank complex Gaussian G."""
    if not 1 <= rank <= d:
        raise ValueError(f"rank must satisfy 1 <= rank <= d, got rank={rank}, d={d}")
    g = _complex_gaussian(generator(seed), (d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    m = (m + m.conj().T) / 2.0
    return validate_density(m, tol=tol)


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed n-by-n unitary with deterministic phase fixing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _haar_isometry(generator(seed), n, n)


def _haar_isometry(gen: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = _complex_gaussian(gen, (rows, cols))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))  # make the triangular factor's diagonal real positive
    return q


def random_channel(d: int, n_kraus: int, convention: Convention = Convention.COLUMN_SUM,
                   seed: int = 0, tol: float = 1e-12) -> KrausChannel:
    """Slice a Haar-distributed (n_kraus*d)-by-d isometry into Kraus blocks.

    Stacked blocks of an isometry W satisfy ``sum_i K_i^dag K_i = W^dag W = I``
    exactly, so column-sum completeness is constructive; the row-sum form takes
    the adjoint of each block.
    """
    if not 1 <= n_kraus <= d * d:
        raise ValueError(f"n_kraus must satisfy 1 <= n <= d^2, got n={n_kraus}, d={d}")
    convention = Convention(convention)
    w = _haar_isometry(generator(seed), n_kraus * d, d)
    blocks = [w[i * d:(i + 1) * d, :] for i in range(n_kraus)]
    if convention == Convention.ROW_SUM:
        blocks = [b.conj().T for b in blocks]
    return validate_channel(blocks, convention=convention, tol=tol)


def mix_kraus(channel: KrausChannel, u) -> KrausChannel:
    """Replace the Kraus family by ``K'_t = sum_s U_ts K_s`` for unitary U.

    The mixed family represents the same channel, so ``apply_channel`` output
    and the declared completeness convention are unchanged.
    """
    um = as_matrix(u)
    n = require_square(um)
    if n != channel.n:
        raise DimensionMismatchError(
            f"mixing unitary is {n}x{n} but the channel has {channel.n} Kraus operators")
    residual = max_abs(um.conj().T @ um - np.eye(n))
    if residual > 1e-10:
        raise NotUnitaryError(residual, 1e-10)
    stacked = np.stack(channel.operators)
    mixed = np.einsum("ts,sij->tij", um, stacked)
    return validate_channel(list(mixed), convention=channel.convention,
                            tol=channel.completeness_tol)
