"""Skew-information uncertainty bound chains for quantum channels.

Compute the Wigner-Yanase skew information of states against channels in
Kraus form, the refinement chains of lower bounds for products and sums of
two channel skew informations, permutation-optimized and convex-mixed
variants, and numerical certification of every claimed inequality.
"""

from .chains import (
    BoundChain,
    ChainVerdict,
    InvarianceReport,
    PartialSplit,
    PermutedBound,
    Reading,
    Strategy,
    SumBounds,
    compute_chain,
    cross_term_bound,
    i_chain,
    kraus_invariance_check,
    lattice_order,
    mixed_bound,
    optimize_permutations,
    partial_splits,
    permute_s,
    s_chain,
    sum_chain,
    verify_chain,
)
from .errors import (
    CompletenessError,
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteError,
    NotHermitianError,
    NotPSDError,
    NotSquareError,
    NotUnitaryError,
    SkewchainError,
    TraceNotOneError,
)
from .example import (
    ClosedForms,
    ExampleParams,
    SweepTable,
    closed_forms,
    discrepancy_report,
    example_channels,
    rho_theta,
    sweep,
)
from .linalg import (
    HermitianEig,
    commutator,
    hermitian_eigendecompose,
    hs_inner,
    psd_sqrt,
)
from .objects import (
    Convention,
    DensityMatrix,
    KrausChannel,
    apply_channel,
    derive_seed,
    mix_kraus,
    random_channel,
    random_density,
    random_unitary,
    validate_channel,
    validate_density,
)
from .serialize import load_channel, load_state, save_channel, save_state
from .skew import (
    CommutatorFrame,
    commutator_frame,
    observable_commutator_bound,
    skew_info_channel,
    skew_info_observable,
    skew_info_operator,
)

__version__ = "0.1.0"
