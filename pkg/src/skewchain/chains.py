"""Lower-bound chains for the product and sum of two channel skew informations.

Everything is driven by the per-pair column data of the commutator frames.
For Kraus operators E_i, F_j write ``a_k = <col_k(E), col_k(E)>``,
``b_k = <col_k(F), col_k(F)>`` and ``c_k = <col_k(E), col_k(F)>``.  With
A = sum_k a_k and B = sum_k b_k the product of skew informations is
``(1/4) sum_ij A_i B_j``, and the chains below subtract certified
non-negative deficits from it:

* I-chain: ``I_m`` applies the Cauchy-Schwarz step to the first m columns
  only, so ``product >= I_1 >= ... >= I_d`` and the endpoint equals the
  summed squared cross overlaps (the cross-term bound).
* S-lattice: values ``S_{p,q}`` for ``1 <= q < p <= d`` traversed in the
  order (2,1), (3,1), (3,2), (4,1), ..., (d,d-1).  Two readings of the
  recursion are provided:

  - ``Reading.AS_PRINTED`` applies the printed form of the update verbatim
    (subtract ``a_p + b_q``, add ``|c_p + c_q|^2``), with every squared
    bracket taken as a squared modulus.  This mixes quadratic and quartic
    terms and does not satisfy the chain's own anchor identities; it is kept
    so reports can document that behavior.
  - ``Reading.PRODUCT`` subtracts the product-form pairwise deficit
    ``(1/4)(a_p b_q + a_q b_p - 2 Re(conj(c_q) c_p))`` and, the first time a
    resolve index p enters, the diagonal deficit ``(1/4)(a_p b_p - |c_p|^2)``.
    Both deficits are non-negative by Cauchy-Schwarz and AM-GM, and the
    partial sums telescope so that ``S_{p,p-1} = I_p`` exactly, down to the
    same cross-term endpoint.

A symmetric-group pair (sigma, tau) relabels the columns seen by the p-slot
and q-slot of each update; the identity pair reproduces the unpermuted walk
bit for bit, and every permuted value stays between the cross-term bound's
floor of zero and the product.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError
from .objects import DensityMatrix, KrausChannel, derive_seed, generator, mix_kraus, random_unitary
from .skew import commutator_frame

__all__ = [
    "BoundChain",
    "ChainData",
    "ChainVerdict",
    "Check",
    "HARD_CHECK_NAMES",
    "InvarianceReport",
    "PartialSplit",
    "PermutedBound",
    "Reading",
    "Strategy",
    "SumBounds",
    "chain_data",
    "compute_chain",
    "cross_term_bound",
    "i_chain",
    "kraus_invariance_check",
    "lattice_order",
    "mixed_bound",
    "optimize_permutations",
    "partial_splits",
    "permute_s",
    "s_chain",
    "sum_chain",
    "verify_chain",
]


class Reading(str, Enum):
    """How the S-lattice recursion's update terms are interpreted."""

    AS_PRINTED = "as-printed"
    PRODUCT = "product"


class Strategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


def lattice_order(d: int) -> list:
    """S-lattice positions (p, q), 1 <= q < p <= d, in traversal order."""
    return [(p, q) for p in range(2, d + 1) for q in range(1, p)]


# ---------------------------------------------------------------------------
# Column data


@dataclass(frozen=True)
class PartialSplit:
    """Prefix/suffix split of one stacked frame vector at position m.

    ``head_norm_sq`` and ``tail_norm_sq`` are the squared norms of the first
    m columns and of the remainder; ``head_overlap`` accumulates the column
    overlaps with a second frame over the same prefix.
    """

    m: int
    head_norm_sq: float
    tail_norm_sq: float
    head_overlap: complex


def partial_splits(frame_a, frame_b) -> list:
    """PartialSplit list for m = 1..d; norms from frame_a, overlaps (a, b)."""
    a = frame_a.column_norms_sq()
    c = np.einsum("ij,ij->j", frame_a.matrix.conj(), frame_b.matrix)
    d = a.shape[0]
    total = math.fsum(a.tolist())
    out = []
    for m in range(1, d + 1):
        head = math.fsum(a[:m].tolist())
        overlap = complex(math.fsum(c[:m].real.tolist()), math.fsum(c[:m].imag.tolist()))
        out.append(PartialSplit(m=m, head_norm_sq=head,
                                tail_norm_sq=total - head, head_overlap=overlap))
    return out


@dataclass(frozen=True)
class ChainData:
    """Per-instance column data of all commutator frames.

    ``e_norms[i, k]`` and ``f_norms[j, k]`` are squared column norms of the
    two frame families; ``overlaps[i, j, k]`` the complex column overlaps.
    """

    dim: int
    e_norms: np.ndarray
    f_norms: np.ndarray
    overlaps: np.ndarray

    @property
    def n1(self) -> int:
        return self.e_norms.shape[0]

    @property
    def n2(self) -> int:
        return self.f_norms.shape[0]

    def skew_1(self) -> float:
        return 0.5 * math.fsum(self.e_norms.ravel().tolist())

    def skew_2(self) -> float:
        return 0.5 * math.fsum(self.f_norms.ravel().tolist())


def chain_data(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel) -> ChainData:
    if ch1.dim != rho.dim or ch2.dim != rho.dim:
        raise DimensionMismatchError(
            f"state dim {rho.dim} vs channel dims {ch1.dim}, {ch2.dim}")
    e_frames = [commutator_frame(rho, k, i) for i, k in enumerate(ch1.operators)]
    f_frames = [commutator_frame(rho, k, j) for j, k in enumerate(ch2.operators)]
    e_norms = np.stack([f.column_norms_sq() for f in e_frames])
    f_norms = np.stack([f.column_norms_sq() for f in f_frames])
    overlaps = np.stack([
        np.stack([np.einsum("ij,ij->j", e.matrix.conj(), f.matrix) for f in f_frames])
        for e in e_frames])
    return ChainData(dim=rho.dim, e_norms=e_norms, f_norms=f_norms, overlaps=overlaps)


def cross_term_bound(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel) -> float:
    """``(1/4) sum_ij |Tr([sqrt(rho), E_i]^dag [sqrt(rho), F_j])|^2``.

    The comparison lower bound (the ``lemma1`` report column); identical to
    the I-chain endpoint.
    """
    return _cross_term(chain_data(rho, ch1, ch2))


def _cross_term(data: ChainData) -> float:
    totals = data.overlaps.sum(axis=2)  # full-frame inner products, per (i, j)
    return 0.25 * math.fsum((abs(totals[i, j]) ** 2
                             for i in range(data.n1) for j in range(data.n2)))


# ---------------------------------------------------------------------------
# I-chain


def _i_values(data: ChainData) -> tuple:
    d = data.dim
    a_pref = np.cumsum(data.e_norms, axis=1)
    b_pref = np.cumsum(data.f_norms, axis=1)
    c_pref = np.cumsum(data.overlaps, axis=2)
    a_tot = a_pref[:, -1]
    b_tot = b_pref[:, -1]
    values = []
    for m in range(1, d + 1):
        terms = []
        for i in range(data.n1):
            for j in range(data.n2):
                head_a = a_pref[i, m - 1]
                tail_a = a_tot[i] - head_a
                head_b = b_pref[j, m - 1]
                tail_b = b_tot[j] - head_b
                u = c_pref[i, j, m - 1]
                terms.append(0.25 * (abs(u) ** 2 + head_a * tail_b
                                     + tail_a * (head_b + tail_b)))
        values.append(math.fsum(terms))
    return tuple(values)


# ---------------------------------------------------------------------------
# S-lattice walks (shared by s_chain and permute_s)


@dataclass(frozen=True)
class _STables:
    """Update terms pre-summed over all Kraus pairs, indexed by column labels."""

    start: float                 # S_{1,0} = product of channel skew informations
    pair_product: np.ndarray     # (d, d): product-reading pairwise deficit for labels (r, s)
    diag_product: np.ndarray     # (d,):   product-reading diagonal deficit for label r
    step_printed: np.ndarray     # (d, d): as-printed net update for labels (r, s)


def _s_tables(data: ChainData) -> _STables:
    a_sum = data.e_norms.sum(axis=0)  # (d,)
    b_sum = data.f_norms.sum(axis=0)
    # gram[r, s] = sum_ij conj(c_s) c_r, so its diagonal is sum_ij |c_r|^2
    flat = data.overlaps.reshape(-1, data.dim)
    gram = flat.T @ flat.conj()
    ab = np.outer(a_sum, b_sum)
    pair_product = 0.25 * (ab + ab.T - 2.0 * gram.real)
    diag_product = 0.25 * (np.diagonal(ab) - np.diagonal(gram).real)
    mod_sq = (np.diagonal(gram).real[:, None] + np.diagonal(gram).real[None, :]
              + 2.0 * gram.real)  # sum_ij |c_r + c_s|^2
    step_printed = mod_sq - (data.n2 * a_sum[:, None] + data.n1 * b_sum[None, :])
    product = data.skew_1() * data.skew_2()
    return _STables(start=product, pair_product=pair_product,
                    diag_product=diag_product, step_printed=step_printed)


def _walk_lattice(tables: _STables, reading: Reading, sigma, tau, d: int):
    """Yield ((p, q), value) along the traversal with labels sigma/tau applied."""
    value = tables.start
    for p, q in lattice_order(d):
        r = sigma[p - 1]
        s = tau[q - 1]
        if reading == Reading.PRODUCT:
            value -= float(tables.pair_product[r, s])
            if q == 1:
                value -= float(tables.diag_product[r])
            if p == 2 and q == 1:
                value -= float(tables.diag_product[tau[0]])
        else:
            value += float(tables.step_printed[r, s])
        yield (p, q), value


_IDENTITY_CACHE: dict = {}


def _identity(d: int) -> tuple:
    perm = _IDENTITY_CACHE.get(d)
    if perm is None:
        perm = tuple(range(d))
        _IDENTITY_CACHE[d] = perm
    return perm


def _check_permutation(perm, d: int) -> tuple:
    p = tuple(int(x) for x in perm)
    if sorted(p) != list(range(d)):
        raise ValueError(f"not a permutation of 0..{d - 1}: {perm}")
    return p


# ---------------------------------------------------------------------------
# Public chain API


@dataclass(frozen=True)
class BoundChain:
    """All bound values for one (state, channel, channel) instance."""

    dim: int
    product: float
    sum: float
    i_values: tuple
    s_values: dict
    cross_term: float
    s_reading: Reading


def compute_chain(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
                  reading: Reading = Reading.PRODUCT) -> BoundChain:
    """Product, sum, I-chain, S-lattice and cross-term bound in one pass."""
    data = chain_data(rho, ch1, ch2)
    return _chain_from_data(data, reading)


def _chain_from_data(data: ChainData, reading: Reading) -> BoundChain:
    tables = _s_tables(data)
    ident = _identity(data.dim)
    s_values = dict(_walk_lattice(tables, Reading(reading), ident, ident, data.dim))
    return BoundChain(
        dim=data.dim,
        product=tables.start,
        sum=data.skew_1() + data.skew_2(),
        i_values=_i_values(data),
        s_values=s_values,
        cross_term=_cross_term(data),
        s_reading=Reading(reading),
    )


def i_chain(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel) -> BoundChain:
    return compute_chain(rho, ch1, ch2, Reading.PRODUCT)


def s_chain(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
            reading: Reading = Reading.PRODUCT) -> BoundChain:
    return compute_chain(rho, ch1, ch2, reading)


@dataclass(frozen=True)
class SumBounds:
    """Sum-form transfers ``2 sqrt(value)`` of the chain entries."""

    i_values: tuple
    s_values: dict


def sum_chain(chain: BoundChain) -> SumBounds:
    """AM-GM transfer: each product-form bound yields ``2 sqrt(.)`` for the sum.

    Negative entries (possible under the as-printed reading) transfer to 0.
    """
    def root(x: float) -> float:
        return 2.0 * math.sqrt(x) if x > 0.0 else 0.0

    return SumBounds(i_values=tuple(root(v) for v in chain.i_values),
                     s_values={k: root(v) for k, v in chain.s_values.items()})


def permute_s(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
              sigma, tau, p: int, q: int,
              reading: Reading = Reading.PRODUCT) -> float:
    """S-lattice value at (p, q) with column labels permuted by (sigma, tau).

    ``sigma`` relabels the index resolved in the p-slot of each update and
    ``tau`` the q-slot index; both are 0-based permutations of ``range(d)``.
    The identity pair reproduces the unpermuted chain entry bit for bit.
    """
    data = chain_data(rho, ch1, ch2)
    return _permuted_value(_s_tables(data), data.dim, sigma, tau, p, q, reading)


def _permuted_value(tables: _STables, d: int, sigma, tau, p: int, q: int,
                    reading: Reading) -> float:
    if not (1 <= q < p <= d):
        raise ValueError(f"need 1 <= q < p <= d, got (p, q) = ({p}, {q}) at d = {d}")
    sigma = _check_permutation(sigma, d)
    tau = _check_permutation(tau, d)
    value = tables.start
    for pos, value in _walk_lattice(tables, Reading(reading), sigma, tau, d):
        if pos == (p, q):
            return value
    raise AssertionError("unreachable: (p, q) was validated against the lattice")


@dataclass(frozen=True)
class PermutedBound:
    """A permutation pair with its S-lattice value and convex mixing weight."""

    sigma: tuple
    tau: tuple
    p: int
    q: int
    value: float
    t: float = 1.0
    mixed_value: float = field(default=float("nan"))


def optimize_permutations(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
                          p: int, q: int, strategy: Strategy | None = None,
                          budget: int = 14400, seed: int = 0,
                          reading: Reading = Reading.PRODUCT) -> PermutedBound:
    """Maximize the permuted S value at (p, q) over permutation pairs.

    Exhaustive enumeration walks all ``(d!)^2`` pairs in lexicographic order
    (ties broken by first found) and requires ``(d!)^2 <= budget``.  Sampled
    search draws ``budget`` seeded pairs and then hill-climbs over adjacent
    transpositions; both are deterministic given the seed.
    """
    data = chain_data(rho, ch1, ch2)
    return _optimize(_s_tables(data), data.dim, p, q, strategy, budget, seed, reading)


def _optimize(tables: _STables, d: int, p: int, q: int, strategy, budget: int,
              seed: int, reading: Reading) -> PermutedBound:
    n_pairs = math.factorial(d) ** 2
    if strategy is None:
        strategy = Strategy.EXHAUSTIVE if n_pairs <= budget else Strategy.SAMPLED
    strategy = Strategy(strategy)

    def value(sig, tu):
        return _permuted_value(tables, d, sig, tu, p, q, reading)

    if strategy == Strategy.EXHAUSTIVE:
        if n_pairs > budget:
            raise ValueError(
                f"exhaustive search needs (d!)^2 = {n_pairs} evaluations > budget {budget}")
        best = None
        for sig in itertools.permutations(range(d)):
            for tu in itertools.permutations(range(d)):
                v = value(sig, tu)
                if best is None or v > best[0]:
                    best = (v, sig, tu)
        v, sig, tu = best
    else:
        gen = generator(seed)
        ident = _identity(d)
        best = (value(ident, ident), ident, ident)
        for _ in range(max(0, budget)):
            sig = tuple(int(x) for x in gen.permutation(d))
            tu = tuple(int(x) for x in gen.permutation(d))
            v = value(sig, tu)
            if v > best[0]:
                best = (v, sig, tu)
        improved = True
        while improved:
            improved = False
            _, sig, tu = best
            for k in range(d - 1):
                cand = list(sig)
                cand[k], cand[k + 1] = cand[k + 1], cand[k]
                v = value(tuple(cand), tu)
                if v > best[0]:
                    best = (v, tuple(cand), tu)
                    improved = True
            _, sig, tu = best
            for k in range(d - 1):
                cand = list(tu)
                cand[k], cand[k + 1] = cand[k + 1], cand[k]
                v = value(sig, tuple(cand))
                if v > best[0]:
                    best = (v, sig, tuple(cand))
                    improved = True
        v, sig, tu = best
    return PermutedBound(sigma=sig, tau=tu, p=p, q=q, value=v, t=1.0, mixed_value=v)


def mixed_bound(chain: BoundChain, best: PermutedBound, t: float) -> tuple:
    """Convex mixing of the trivial bound with the optimized permuted bound.

    Returns ``(product_bound, sum_bound)`` where the product form mixes
    S_{1,0} with the optimum and the sum form mixes the plain sum with
    ``2 sqrt(optimum)``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    product_bound = (1.0 - t) * chain.product + t * best.value
    root = 2.0 * math.sqrt(best.value) if best.value > 0.0 else 0.0
    sum_bound = (1.0 - t) * chain.sum + t * root
    return product_bound, sum_bound


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class Check:
    """One named verification row; ``deviation`` is how far from passing."""

    name: str
    kind: str  # "ge": lhs >= rhs - tol; "eq": |lhs - rhs| <= tol
    lhs: float
    rhs: float
    tol: float
    passed: bool
    deviation: float


def _ge_check(name: str, lhs: float, rhs: float, tol: float) -> Check:
    lhs, rhs = float(lhs), float(rhs)
    dev = max(rhs - lhs, 0.0)
    return Check(name, "ge", lhs, rhs, tol, lhs >= rhs - tol, dev)


def _eq_check(name: str, lhs: float, rhs: float, tol: float) -> Check:
    lhs, rhs = float(lhs), float(rhs)
    dev = abs(lhs - rhs)
    return Check(name, "eq", lhs, rhs, tol, dev <= tol, dev)


HARD_CHECK_NAMES = (
    "product_ge_cross_term",
    "product_ge_i1",
    "i_monotone",
    "i_endpoint_eq_cross_term",
    "mixed_le_product",
    "mixed_ge_cross_term",
    "opt_ge_identity",
)


@dataclass(frozen=True)
class ChainVerdict:
    checks: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def hard_passed(self) -> bool:
        return all(c.passed for c in self.checks if c.name in HARD_CHECK_NAMES)

    def by_name(self) -> dict:
        return {c.name: c for c in self.checks}


def verify_chain(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
                 tol: float = 1e-10, perm_budget: int = 14400,
                 seed: int = 0) -> ChainVerdict:
    """Run every chain check on one instance; failures are reported, not raised.

    Both S-lattice readings are always evaluated; the anchor-identity rows
    record, per reading, how far the lattice is from the I-chain it claims to
    refine.  Inequality rows pass when ``lhs >= rhs - tol``; equality rows
    report their deviation against the same tolerance.
    """
    data = chain_data(rho, ch1, ch2)
    tables = _s_tables(data)
    d = data.dim
    ident = _identity(d)
    chain = _chain_from_data(data, Reading.PRODUCT)
    i_vals = chain.i_values
    checks = []

    checks.append(_ge_check("product_ge_cross_term", chain.product, chain.cross_term, tol))
    checks.append(_ge_check("product_ge_i1", chain.product, i_vals[0], tol))
    worst_step = 0.0
    for m in range(d - 1):
        worst_step = max(worst_step, i_vals[m + 1] - i_vals[m])
    checks.append(_ge_check("i_monotone", -worst_step, 0.0, tol))
    checks.append(_eq_check("i_endpoint_eq_cross_term", i_vals[-1], chain.cross_term, tol))

    s_by_reading = {}
    for reading in (Reading.PRODUCT, Reading.AS_PRINTED):
        s_vals = dict(_walk_lattice(tables, reading, ident, ident, d))
        s_by_reading[reading] = s_vals
        label = reading.value.replace("-", "_")
        if s_vals:
            seq = [chain.product] + [s_vals[k] for k in lattice_order(d)]
            worst = max(seq[k + 1] - seq[k] for k in range(len(seq) - 1))
            checks.append(_ge_check(f"s_monotone[{label}]", -worst, 0.0, tol))
            if d >= 2:
                checks.append(_eq_check(f"anchor_s21_eq_i2[{label}]",
                                        s_vals[(2, 1)], i_vals[1], tol))
            if d >= 3:
                checks.append(_eq_check(f"anchor_s32_eq_i3[{label}]",
                                        s_vals[(3, 2)], i_vals[2], tol))
            worst_anchor = max(abs(s_vals[(p, p - 1)] - i_vals[p - 1])
                               for p in range(2, d + 1))
            checks.append(_eq_check(f"anchor_spp1_eq_ip[{label}]", worst_anchor, 0.0, tol))
            checks.append(_eq_check(f"anchor_endpoint_eq_cross_term[{label}]",
                                    s_vals[(d, d - 1)], chain.cross_term, tol))

    sum_worst = min(chain.sum - 2.0 * math.sqrt(max(v, 0.0)) for v in i_vals)
    checks.append(_ge_check("sum_ge_2sqrt_im", sum_worst, 0.0, tol))

    if d >= 2:
        best = _optimize(tables, d, 2, 1, None, perm_budget, seed, Reading.PRODUCT)
        identity_value = s_by_reading[Reading.PRODUCT][(2, 1)]
        checks.append(_ge_check("opt_ge_identity", best.value, identity_value, tol))
        for t in (0.0, 0.5, 1.0):
            prod_bound, _ = mixed_bound(chain, best, t)
            checks.append(_ge_check("mixed_le_product", chain.product, prod_bound, tol))
            checks.append(_ge_check("mixed_ge_cross_term", prod_bound, chain.cross_term, tol))

    return ChainVerdict(checks=tuple(checks), tol=tol)


@dataclass(frozen=True)
class InvarianceReport:
    """Worst-case deviation of each bound quantity under Kraus mixing."""

    trials: int
    tol: float
    deviations: dict

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.deviations.values())

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())


def kraus_invariance_check(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
                           trials: int, seed: int, tol: float = 1e-10) -> InvarianceReport:
    """Mix both Kraus families by random unitaries and recompute every bound.

    The chain quantities are functions of the channels, not of the chosen
    Kraus families, so all deviations should sit at rounding level.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = compute_chain(rho, ch1, ch2, Reading.PRODUCT)
    base_printed = compute_chain(rho, ch1, ch2, Reading.AS_PRINTED)
    devs = {"product": 0.0, "sum": 0.0, "i_values": 0.0, "s_values": 0.0,
            "s_values_as_printed": 0.0, "cross_term": 0.0}
    for trial in range(trials):
        u = random_unitary(ch1.n, derive_seed(seed, trial, 1))
        v = random_unitary(ch2.n, derive_seed(seed, trial, 2))
        mixed1 = mix_kraus(ch1, u)
        mixed2 = mix_kraus(ch2, v)
        chain = compute_chain(rho, mixed1, mixed2, Reading.PRODUCT)
        printed = compute_chain(rho, mixed1, mixed2, Reading.AS_PRINTED)
        devs["product"] = max(devs["product"], abs(chain.product - base.product))
        devs["sum"] = max(devs["sum"], abs(chain.sum - base.sum))
        devs["cross_term"] = max(devs["cross_term"], abs(chain.cross_term - base.cross_term))
        devs["i_values"] = max(devs["i_values"],
                               max(abs(a - b) for a, b in zip(chain.i_values, base.i_values)))
        if chain.s_values:
            devs["s_values"] = max(devs["s_values"],
                                   max(abs(chain.s_values[k] - base.s_values[k])
                                       for k in chain.s_values))
            devs["s_values_as_printed"] = max(
                devs["s_values_as_printed"],
                max(abs(printed.s_values[k] - base_printed.s_values[k])
                    for k in printed.s_values))
    return InvarianceReport(trials=trials, tol=tol, deviations=devs)
