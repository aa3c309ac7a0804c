"""Command-line entry point.

Subcommands
-----------
bounds      chain values, permutation optimum and mixed bounds for supplied
            state/channel files; writes a key-value report plus a CSV row.
verify      randomized property suite over seeded instances; writes a
            deterministic verdict file (byte-identical for identical config).
example     regenerates the worked example's figure data CSVs plus the
            closed-form discrepancy report.
invariance  re-runs all bounds under random Kraus mixings of both channels
            and reports the worst deviation.

Exit codes: 0 success; 1 verdict failure (verify/example/invariance only);
2 configuration or input validation failure; 3 internal numerical failure
(bounds only).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .chains import (
    HARD_CHECK_NAMES,
    Reading,
    Strategy,
    compute_chain,
    kraus_invariance_check,
    lattice_order,
    mixed_bound,
    optimize_permutations,
    verify_chain,
)
from .errors import SkewchainError
from .example import (
    ExampleParams,
    discrepancy_report,
    row_hard_failures,
    sweep,
    write_discrepancy_csv,
    write_sweep_csv,
)
from .objects import Convention, derive_seed, random_channel, random_density
from .serialize import load_channel, load_state, write_text_atomic


class ConfigError(Exception):
    pass


def parse_grid(spec: str) -> list:
    """Parse ``start:stop:count`` (or a bare value) into a [0, 1] grid."""
    try:
        if ":" in spec:
            start_s, stop_s, count_s = spec.split(":")
            start, stop, count = float(start_s), float(stop_s), int(count_s)
        else:
            start = stop = float(spec)
            count = 1
    except Exception as exc:
        raise ConfigError(f"bad grid spec {spec!r}: expected start:stop:count") from exc
    if count < 1:
        raise ConfigError(f"grid {spec!r}: count must be >= 1")
    if not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0):
        raise ConfigError(f"grid {spec!r}: bounds must lie within [0, 1]")
    if count == 1:
        return [start]
    return [float(v) for v in np.linspace(start, stop, count)]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_report(path, pairs) -> None:
    lines = [f"{key} = {_fmt(value)}" for key, value in pairs]
    write_text_atomic(path, "\n".join(lines) + "\n")


def _reading(args) -> Reading:
    return Reading(args.s_reading)


def _strategy(args):
    return None if args.perm == "auto" else Strategy(args.perm)


# ---------------------------------------------------------------------------
# bounds


def cmd_bounds(args) -> int:
    try:
        state = load_state(args.state, tol=args.tol)
        ch1 = load_channel(args.channel1, tol=args.tol)
        ch2 = load_channel(args.channel2, tol=args.tol)
        t_grid = parse_grid(args.t)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SkewchainError, OSError, KeyError, ValueError) as exc:
        print(f"error: input rejected: {exc}", file=sys.stderr)
        return 2

    try:
        reading = _reading(args)
        chain = compute_chain(state, ch1, ch2, reading)
        d = chain.dim
        p, q = (2, 1) if d >= 2 else (None, None)
        best = None
        if p is not None:
            best = optimize_permutations(state, ch1, ch2, p, q, strategy=_strategy(args),
                                         budget=args.budget, seed=args.seed, reading=reading)
        verdict = verify_chain(state, ch1, ch2, tol=args.tol,
                               perm_budget=args.budget, seed=args.seed)
    except SkewchainError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3

    pairs = [("command", "bounds"), ("dim", d), ("s_reading", reading.value),
             ("product", chain.product), ("sum", chain.sum),
             ("lemma1", chain.cross_term)]
    for m, v in enumerate(chain.i_values, start=1):
        pairs.append((f"I{m}", v))
    for (pp, qq) in lattice_order(d):
        pairs.append((f"S{pp}{qq}", chain.s_values[(pp, qq)]))
    if best is not None:
        pairs.append(("perm_opt.p", best.p))
        pairs.append(("perm_opt.q", best.q))
        pairs.append(("perm_opt.value", best.value))
        pairs.append(("perm_opt.sigma", ",".join(str(i) for i in best.sigma)))
        pairs.append(("perm_opt.tau", ",".join(str(i) for i in best.tau)))
        for t in t_grid:
            mp, ms = mixed_bound(chain, best, t)
            pairs.append((f"mixed_product[t={_fmt(t)}]", mp))
            pairs.append((f"mixed_sum[t={_fmt(t)}]", ms))
    for check in verdict.checks:
        pairs.append((f"check.{check.name}.passed", check.passed))
        pairs.append((f"check.{check.name}.deviation", check.deviation))
    _write_report(args.out, pairs)

    csv_path = Path(args.out).with_suffix(".csv")
    header = ["t", "product", "sum"]
    header += [f"I{m}" for m in range(1, d + 1)]
    header += [f"S{pp}{qq}" for (pp, qq) in lattice_order(d)]
    header += ["lemma1", "perm_opt", "mixed_product", "mixed_sum"]
    lines = [",".join(header)]
    for t in t_grid:
        mp, ms = mixed_bound(chain, best, t) if best is not None else (chain.product, chain.sum)
        fields = [t, chain.product, chain.sum, *chain.i_values]
        fields += [chain.s_values[k] for k in lattice_order(d)]
        fields += [chain.cross_term, best.value if best is not None else float("nan"), mp, ms]
        lines.append(",".join(format(float(v) + 0.0, ".12g") for v in fields))
    write_text_atomic(csv_path, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    try:
        dims = [int(v) for v in args.dims.split(",") if v.strip()]
        if not dims or any(d < 1 for d in dims):
            raise ConfigError(f"bad dims list {args.dims!r}")
        if args.instances < 1:
            raise ConfigError("instances must be >= 1")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    stats: dict = {}
    invariance_worst = 0.0
    total = 0
    for d in dims:
        for k in range(args.instances):
            rho = random_density(d, (k % d) + 1, derive_seed(args.seed, d, k, 0))
            n1 = min((k % 4) + 1, d * d)
            n2 = min(((k // 4) % 4) + 1, d * d)
            ch1 = random_channel(d, n1, Convention.COLUMN_SUM, derive_seed(args.seed, d, k, 1))
            ch2 = random_channel(d, n2, Convention.COLUMN_SUM, derive_seed(args.seed, d, k, 2))
            verdict = verify_chain(rho, ch1, ch2, tol=args.tol, perm_budget=args.budget,
                                   seed=derive_seed(args.seed, d, k, 3))
            for check in verdict.checks:
                entry = stats.setdefault(check.name, [0, 0, 0.0])
                entry[0] += 1
                entry[1] += 0 if check.passed else 1
                entry[2] = max(entry[2], check.deviation)
            report = kraus_invariance_check(rho, ch1, ch2, trials=1,
                                            seed=derive_seed(args.seed, d, k, 4), tol=args.tol)
            invariance_worst = max(invariance_worst, report.max_deviation)
            total += 1

    hard_failures = sum(stats[name][1] for name in stats if name in HARD_CHECK_NAMES)
    if invariance_worst > args.tol:
        hard_failures += 1

    pairs = [("command", "verify"), ("dims", args.dims), ("instances_per_dim", args.instances),
             ("seed", args.seed), ("tol", args.tol), ("budget", args.budget),
             ("instances_total", total)]
    for name in sorted(stats):
        count, failures, worst = stats[name]
        kind = "hard" if name in HARD_CHECK_NAMES else "soft"
        pairs.append((f"check.{name}.kind", kind))
        pairs.append((f"check.{name}.count", count))
        pairs.append((f"check.{name}.failures", failures))
        pairs.append((f"check.{name}.worst_deviation", worst))
    pairs.append(("invariance.kind", "hard"))
    pairs.append(("invariance.max_deviation", invariance_worst))
    pairs.append(("hard_failures", hard_failures))
    pairs.append(("hard_passed", hard_failures == 0))
    _write_report(args.out, pairs)
    return 0 if hard_failures == 0 else 1


# ---------------------------------------------------------------------------
# example


def _subsample(grid, limit: int = 9) -> list:
    if len(grid) <= limit:
        return list(grid)
    idx = np.linspace(0, len(grid) - 1, limit).round().astype(int)
    return [grid[i] for i in idx]


def cmd_example(args) -> int:
    try:
        theta_grid = parse_grid(args.theta)
        p_grid = parse_grid(args.p)
        q_grid = parse_grid(args.q)
        t_grid = parse_grid(args.t)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reading = _reading(args)
    strategy = _strategy(args)

    # Surfaces at theta = 1 over (p, q): product view, sum view, optimized view.
    surface = sweep([1.0], p_grid, q_grid, t_grid, reading=reading,
                    strategy=strategy, budget=args.budget, seed=args.seed)
    # Curve over theta at p = q = 1/2.
    curve = sweep(theta_grid, [0.5], [0.5], t_grid, reading=reading,
                  strategy=strategy, budget=args.budget, seed=args.seed)
    write_sweep_csv(surface, out_dir / "figure1.csv")
    write_sweep_csv(surface, out_dir / "figure2.csv")
    write_sweep_csv(curve, out_dir / "figure3.csv")
    write_sweep_csv(surface, out_dir / "figure4.csv")

    grid = [ExampleParams(theta=th, p=p, q=q)
            for th in _subsample(theta_grid) for p in _subsample(p_grid)
            for q in _subsample(q_grid)]
    report = discrepancy_report(grid)
    write_discrepancy_csv(report, out_dir / "discrepancy_report.csv")

    failures = 0
    for table in (surface, curve):
        for row in table.rows:
            failures += len(row_hard_failures(row, tol=args.tol))
    if failures:
        print(f"error: {failures} hard invariant violations across sweep rows",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# invariance


def cmd_invariance(args) -> int:
    try:
        if args.trials < 1:
            raise ConfigError("trials must be >= 1")
        state = load_state(args.state, tol=1e-9)
        ch1 = load_channel(args.channel1, tol=1e-9)
        ch2 = load_channel(args.channel2, tol=1e-9)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SkewchainError, OSError, KeyError, ValueError) as exc:
        print(f"error: input rejected: {exc}", file=sys.stderr)
        return 2
    report = kraus_invariance_check(state, ch1, ch2, trials=args.trials,
                                    seed=args.seed, tol=args.tol)
    pairs = [("command", "invariance"), ("trials", args.trials), ("seed", args.seed),
             ("tol", args.tol)]
    for name in sorted(report.deviations):
        pairs.append((f"deviation.{name}", report.deviations[name]))
    pairs.append(("max_deviation", report.max_deviation))
    pairs.append(("passed", report.passed))
    _write_report(args.out, pairs)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewchain",
                                     description="Skew-information bound chains "
                                                 "for quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--out", required=True, help="output path")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--s-reading", choices=[r.value for r in Reading],
                        default=Reading.PRODUCT.value)
        sp.add_argument("--perm", choices=["auto", "exhaustive", "sampled"], default="auto")
        sp.add_argument("--budget", type=int, default=14400)

    sp = sub.add_parser("bounds", help="bound chain for supplied state/channels")
    add_common(sp)
    sp.add_argument("--state", required=True)
    sp.add_argument("--channel1", required=True)
    sp.add_argument("--channel2", required=True)
    sp.add_argument("--t", default="1:1:1", help="mixing-weight grid start:stop:count")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="randomized certification suite")
    add_common(sp)
    sp.add_argument("--dims", default="2,3,4", help="comma-separated dimensions")
    sp.add_argument("--instances", type=int, default=200, help="instances per dimension")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("example", help="regenerate worked-example figure data")
    add_common(sp)
    sp.add_argument("--theta", default="0:1:101")
    sp.add_argument("--p", default="0:1:51")
    sp.add_argument("--q", default="0:1:51")
    sp.add_argument("--t", default="1:1:1")
    sp.set_defaults(func=cmd_example, tol=1e-9)  # sweep hard invariants hold at 1e-9

    sp = sub.add_parser("invariance", help="Kraus-mixing invariance check")
    add_common(sp)
    sp.add_argument("--state", required=True)
    sp.add_argument("--channel1", required=True)
    sp.add_argument("--channel2", required=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=cmd_invariance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # tol = 0 stays legal for invariance (it then reports floating noise and
    # exits 1); every other command treats a non-positive tol as bad config.
    if args.command == "invariance":
        if args.tol < 0:
            print("error: tol must be >= 0", file=sys.stderr)
            return 2
    elif args.tol <= 0:
        print("error: tol must be > 0", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
