"""The built-in worked example: a 4-dimensional two-block state family and two
one-parameter Kraus families, with reference closed forms and grid sweeps.

The state ``rho(theta)`` is block diagonal with 2x2 blocks
``[[1, 2 theta - 1], [2 theta - 1, 1]] / 4``; at ``theta = 1/2`` it is
maximally mixed and every bound vanishes.  The two channels are diagonal
amplitude-damping-like families in parameters p and q, valid under the
row-sum completeness convention (the q-family violates column-sum).

``closed_forms`` evaluates the reference closed-form expressions for this
family exactly as tabulated (report columns eq20..eq25).  They are
comparison targets, not oracles: the numeric pipeline is ground truth, and
``discrepancy_report`` documents where print and pipeline disagree (the sum
expression eq21 runs at twice the pipeline sum, and eq24/eq25 follow neither
S-lattice reading).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import (
    BoundChain,
    Reading,
    Strategy,
    _chain_from_data,
    _optimize,
    _s_tables,
    chain_data,
    lattice_order,
    mixed_bound,
)
from .objects import Convention, DensityMatrix, validate_channel, validate_density
from .serialize import write_text_atomic

__all__ = [
    "CSV_HEADER",
    "ClosedForms",
    "DiscrepancyReport",
    "EXAMPLE_DIM",
    "ExampleParams",
    "SweepRow",
    "SweepTable",
    "closed_forms",
    "discrepancy_report",
    "example_channels",
    "rho_theta",
    "row_hard_failures",
    "sweep",
    "write_discrepancy_csv",
    "write_sweep_csv",
]

EXAMPLE_DIM = 4


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def rho_theta(theta: float) -> DensityMatrix:
    """The two-block state family; off-diagonal entries are ``2 theta - 1``."""
    theta = _check_unit("theta", theta)
    a = 2.0 * theta - 1.0
    block = np.array([[1.0, a], [a, 1.0]], dtype=complex) / 4.0
    rho = np.zeros((4, 4), dtype=complex)
    rho[:2, :2] = block
    rho[2:, 2:] = block
    return validate_density(rho, tol=1e-12)


def example_channels(p: float, q: float) -> tuple:
    """The two diagonal-family channels, validated under row-sum completeness."""
    p = _check_unit("p", p)
    q = _check_unit("q", q)
    sp, sq = math.sqrt(1.0 - p), math.sqrt(1.0 - q)
    e1 = np.diag([1.0, sp, 1.0, sp]).astype(complex)
    e2 = np.diag([0.0, math.sqrt(p), 0.0, math.sqrt(p)]).astype(complex)
    f1 = np.diag([sq, 1.0, sq, 1.0]).astype(complex)
    f2 = np.zeros((4, 4), dtype=complex)
    f2[0, 1] = math.sqrt(q)
    f2[2, 3] = math.sqrt(q)
    n1 = validate_channel([e1, e2], convention=Convention.ROW_SUM, tol=1e-12)
    n2 = validate_channel([f1, f2], convention=Convention.ROW_SUM, tol=1e-12)
    return n1, n2


@dataclass(frozen=True)
class ExampleParams:
    """One grid point: state parameter, channel parameters, mixing weight."""

    theta: float
    p: float
    q: float
    t: float = 1.0

    def __post_init__(self):
        for name in ("theta", "p", "q", "t"):
            _check_unit(name, getattr(self, name))


@dataclass(frozen=True)
class ClosedForms:
    """Reference closed-form values (report columns eq20..eq25)."""

    eq20: float  # product of channel skew informations
    eq21: float  # tabulated sum form (documented factor-2 discrepancy)
    eq22: float  # cross-term bound (the lemma1 column)
    eq23: float  # S21 = I2
    eq24: float  # S31
    eq25: float  # S32 = I3


def closed_forms(params: ExampleParams) -> ClosedForms:
    theta, p, q = params.theta, params.p, params.q
    root_tt = math.sqrt(theta * (1.0 - theta))
    w4 = (math.sqrt(1.0 - theta) - math.sqrt(theta)) ** 4
    w2 = (1.0 - 2.0 * root_tt) ** 2
    sp, sq = math.sqrt(1.0 - p), math.sqrt(1.0 - q)
    eq20 = 0.25 * w4 * (1.0 - sp) * (1.0 - sq)
    eq21 = (2.0 * root_tt - 1.0) * (sp + sq - 2.0)
    eq22 = 0.125 * w4 * (1.0 - sp) * (1.0 - sq) ** 2
    eq23 = (1.0 / 32.0) * w2 * (sp - 1.0) * (q + 8.0 * sq - 8.0)
    eq24 = (1.0 / 256.0) * (4.0 * theta ** 2 - 4.0 * theta + 4.0 * root_tt - 1.0) * (
        p * (q + 2.0 * sq - 2.0) - 8.0 * (sp - 1.0) * (2.0 * q + 9.0 * sq - 9.0))
    eq25 = ((3.0 * q / 256.0) * w4 * (sp - 1.0) ** 2
            + (1.0 / 16.0) * w2 * (sp - 1.0) ** 2 * (sq - 1.0) ** 2
            + (p / 16.0) * w2 * (sq - 1.0) ** 2
            + (q / 16.0) * w2 * (sp - 1.0) ** 2
            + (q * math.sqrt(p) / 256.0) * w2 * (4.0 * sp + 3.0 * math.sqrt(p) - 4.0))
    return ClosedForms(eq20=eq20, eq21=eq21, eq22=eq22, eq23=eq23, eq24=eq24, eq25=eq25)


CSV_HEADER = ("theta,p,q,t,product,sum,I1,I2,I3,I4,S21,S31,S32,lemma1,"
              "perm_opt,mixed_product,mixed_sum,eq20,eq21,eq22,eq23,eq24,eq25")


@dataclass(frozen=True)
class SweepRow:
    params: ExampleParams
    chain: BoundChain
    perm_opt: float
    mixed_product: float
    mixed_sum: float
    forms: ClosedForms

    def csv_fields(self) -> list:
        c = self.chain
        f = self.forms
        values = [self.params.theta, self.params.p, self.params.q, self.params.t,
                  c.product, c.sum, *c.i_values,
                  c.s_values[(2, 1)], c.s_values[(3, 1)], c.s_values[(3, 2)],
                  c.cross_term, self.perm_opt, self.mixed_product, self.mixed_sum,
                  f.eq20, f.eq21, f.eq22, f.eq23, f.eq24, f.eq25]
        return values


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    reading: Reading

    def __len__(self) -> int:
        return len(self.rows)


def row_hard_failures(row: SweepRow, tol: float = 1e-9) -> list:
    """Names of violated hard invariants for one sweep row.

    Hard: pipeline product agrees with eq20, pipeline cross term agrees with
    eq22, and the chain order product >= S21 >= S31 >= S32 >= cross term.
    """
    failures = []
    c = row.chain
    if abs(c.product - row.forms.eq20) > tol:
        failures.append("product_vs_eq20")
    if abs(c.cross_term - row.forms.eq22) > tol:
        failures.append("cross_term_vs_eq22")
    seq = [c.product, c.s_values[(2, 1)], c.s_values[(3, 1)], c.s_values[(3, 2)], c.cross_term]
    if any(seq[i + 1] > seq[i] + tol for i in range(len(seq) - 1)):
        failures.append("chain_order")
    if any(c.i_values[m + 1] > c.i_values[m] + tol for m in range(len(c.i_values) - 1)):
        failures.append("i_chain_order")
    return failures


def sweep(theta_grid, p_grid, q_grid, t_grid=(1.0,), reading: Reading = Reading.PRODUCT,
          perm_target: tuple = (2, 1), strategy: Strategy | None = None,
          budget: int = 14400, seed: int = 0) -> SweepTable:
    """One SweepRow per grid point, ordered lexicographically in (theta, p, q, t).

    The permutation-optimized column maximizes the S value at ``perm_target``
    over permutation pairs; the mixed columns convex-combine it with the
    trivial bounds at each t.  Chains are computed once per (theta, p, q) and
    shared across the t axis.
    """
    thetas = [_check_unit("theta", v) for v in theta_grid]
    ps = [_check_unit("p", v) for v in p_grid]
    qs = [_check_unit("q", v) for v in q_grid]
    ts = [_check_unit("t", v) for v in t_grid]
    if not (thetas and ps and qs and ts):
        raise ValueError("all sweep grids must be nonempty")
    rows = []
    for theta in sorted(thetas):
        for p in sorted(ps):
            for q in sorted(qs):
                n1, n2 = example_channels(p, q)
                data = chain_data(rho_theta(theta), n1, n2)
                chain = _chain_from_data(data, reading)
                best = _optimize(_s_tables(data), data.dim, perm_target[0], perm_target[1],
                                 strategy, budget, seed, reading)
                forms = closed_forms(ExampleParams(theta=theta, p=p, q=q))
                for t in sorted(ts):
                    mp, ms = mixed_bound(chain, best, t)
                    rows.append(SweepRow(params=ExampleParams(theta=theta, p=p, q=q, t=t),
                                         chain=chain, perm_opt=best.value,
                                         mixed_product=mp, mixed_sum=ms, forms=forms))
    return SweepTable(rows=tuple(rows), reading=Reading(reading))


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".12g")  # + 0.0 folds -0.0 into 0.0


def write_sweep_csv(table: SweepTable, path) -> None:
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row.csv_fields()))
    write_text_atomic(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Discrepancy report: numeric pipeline vs reference closed forms


_FORM_NAMES = ("eq20", "eq21", "eq22", "eq23", "eq24", "eq25")


@dataclass(frozen=True)
class DiscrepancyRow:
    formula: str
    params: ExampleParams
    numeric: float
    printed: float

    @property
    def abs_dev(self) -> float:
        return abs(self.numeric - self.printed)

    @property
    def rel_dev(self) -> float:
        scale = max(abs(self.numeric), abs(self.printed))
        return self.abs_dev / scale if scale > 0.0 else 0.0

    @property
    def ratio(self) -> float:
        return self.printed / self.numeric if abs(self.numeric) > 1e-15 else float("nan")


@dataclass(frozen=True)
class DiscrepancyReport:
    rows: tuple
    fitted_ratios: dict  # formula -> constant ratio, when multiplicative

    def rows_for(self, formula: str) -> list:
        return [r for r in self.rows if r.formula == formula]


def _numeric_targets(chain: BoundChain) -> dict:
    return {
        "eq20": chain.product,
        "eq21": chain.sum,
        "eq22": chain.cross_term,
        "eq23": chain.s_values[(2, 1)],
        "eq24": chain.s_values[(3, 1)],
        "eq25": chain.s_values[(3, 2)],
    }


def discrepancy_report(param_grid) -> DiscrepancyReport:
    """Numeric-vs-reference table over a grid of ExampleParams.

    Purely descriptive: rows carry signed values, absolute and relative
    deviations, and a per-row printed/numeric ratio.  When one formula's
    ratios agree to 1e-6 relative across the grid, that constant is recorded
    as its fitted ratio.  The report never fails a run.
    """
    params = list(param_grid)
    if not params:
        raise ValueError("the parameter grid must be nonempty")
    rows = []
    for pt in params:
        n1, n2 = example_channels(pt.p, pt.q)
        chain = _chain_from_data(chain_data(rho_theta(pt.theta), n1, n2), Reading.PRODUCT)
        numeric = _numeric_targets(chain)
        forms = closed_forms(pt)
        for name in _FORM_NAMES:
            rows.append(DiscrepancyRow(formula=name, params=pt,
                                       numeric=numeric[name],
                                       printed=getattr(forms, name)))
    fitted = {}
    for name in _FORM_NAMES:
        ratios = [r.ratio for r in rows if r.formula == name and not math.isnan(r.ratio)]
        if ratios:
            lo, hi = min(ratios), max(ratios)
            mid = (lo + hi) / 2.0
            if abs(hi - lo) <= 1e-6 * max(abs(mid), 1e-12):
                fitted[name] = mid
    return DiscrepancyReport(rows=tuple(rows), fitted_ratios=fitted)


def write_discrepancy_csv(report: DiscrepancyReport, path) -> None:
    lines = ["formula,theta,p,q,numeric,printed,abs_dev,rel_dev,ratio,fitted_ratio"]
    for r in report.rows:
        fitted = report.fitted_ratios.get(r.formula)
        lines.append(",".join([
            r.formula, _fmt(r.params.theta), _fmt(r.params.p), _fmt(r.params.q),
            _fmt(r.numeric), _fmt(r.printed), _fmt(r.abs_dev), _fmt(r.rel_dev),
            "" if math.isnan(r.ratio) else _fmt(r.ratio),
            "" if fitted is None else _fmt(fitted),
        ]))
    write_text_atomic(path, "\n".join(lines) + "\n")
