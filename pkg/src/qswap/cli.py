"""Command-line front end.

    qswap swap --config run.ini [--out DIR] [--strategy smc] [--beta-max 2|adaptive]
    qswap sweep [--config run.ini] [--out DIR] [--grid 101]
    qswap oracle-check [--config run.ini] [--seed 42]

Exit codes: 0 success, 1 oracle check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import discrimination as disc
from .config import RunConfig, SwapOptions, config_from_text, load_config
from .errors import ConfigError, SwapError
from .protocol import (
    Objective,
    StagePolicy,
    adaptive_stage_policy,
    analyze_channel,
    average_me,
    average_smc,
    postselected_average,
    prepare_channel,
    strategy_tree,
    success_probability,
)
from .sweep import SweepConfig, run_sweep
from .verify import CheckConfig, run_oracle_check

log = logging.getLogger("qswap")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2

BRANCH_COLUMNS = ("strategy", "s", "m", "beta", "success", "branch_probability", "E", "F")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qswap", description="Entanglement swapping assisted by state discrimination.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="INI run configuration")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--renormalize", action="store_true", help="rescale near-normalized coefficients")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("swap", help="evaluate every branch for one channel pair")
    common(p)
    p.add_argument("--strategy", choices=("me", "mc", "smc"), action="append", help="repeatable; default all")
    p.add_argument("--beta-max", help="SMC stage cap per set: an integer, 'full' or 'adaptive'")
    p.add_argument("--threshold-e", type=float, help="SMC stages whose conclusive entanglement meets this value")
    p.add_argument("--threshold-f", type=float, help="SMC stages whose conclusive fidelity meets this value")
    p.add_argument("--effective", action="store_true", help="swap on the effective subspace")

    p = sub.add_parser("sweep", help="grid sweep over the free coefficients, CSV output")
    common(p)
    p.add_argument("--grid", type=int, help="points per axis")
    p.add_argument("--beta-max", type=int, help="largest stage cap to tabulate")

    p = sub.add_parser("oracle-check", help="compare closed forms against the statevector oracle")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--n-channels", type=int)
    p.add_argument("--mc-samples", type=int, help="also run a Monte Carlo sampling check")
    return parser


def _load(args) -> RunConfig:
    if args.config is None:
        return config_from_text("", args.renormalize)
    return load_config(args.config, args.renormalize)


def _policy(ch, opts: SwapOptions, strategy: str) -> StagePolicy:
    if strategy == "me":
        return StagePolicy.me_only(ch)
    if strategy == "mc":
        return StagePolicy.fixed(ch, 1)
    if opts.threshold_e is not None:
        return adaptive_stage_policy(ch, Objective.threshold_e(opts.threshold_e))
    if opts.threshold_f is not None:
        return adaptive_stage_policy(ch, Objective.threshold_f(opts.threshold_f))
    if opts.beta_max == "full":
        return StagePolicy.full(ch)
    if opts.beta_max == "adaptive":
        obj = Objective.max_avg_e() if opts.objective == "e" else Objective.max_avg_f()
        return adaptive_stage_policy(ch, obj)
    return StagePolicy.fixed(ch, int(opts.beta_max))


def cmd_swap(args) -> int:
    cfg = _load(args)
    if cfg.channel is None:
        raise ConfigError("swap needs a [channel] section")
    opts = cfg.swap
    if args.strategy:
        opts.strategies = tuple(args.strategy)
    if args.beta_max is not None:
        low = args.beta_max.lower()
        if low not in ("full", "adaptive") and not low.isdigit():
            raise ConfigError(f"--beta-max: expected an integer, 'full' or 'adaptive', got {args.beta_max!r}")
        opts.beta_max = low
    if args.threshold_e is not None:
        opts.threshold_e = args.threshold_e
    if args.threshold_f is not None:
        opts.threshold_f = args.threshold_f
    ch = prepare_channel(cfg.channel, opts.effective or args.effective)
    ca = analyze_channel(ch)

    out = sys.stdout
    out.write(f"channel D_A={ch.dim_a} D_B={ch.dim_b}\n")
    out.write(f"  c = {list(ch.c)}\n  d = {list(ch.d)}\n\n")
    out.write(f"{'s':>2} {'p_s':>9} {'N_s':>4} {'n_s':>4} {'det G':>10} {'indep':>5} "
              f"{'E_ME':>8} {'F_ME':>8} {'E_MC':>8} {'F_MC':>8} {'p_MC':>8} {'stages':>6}\n")
    for s in range(ch.dim_b):
        if s not in ca.sets:
            out.write(f"{s:>2} {0.0:9.6f}  (never occurs)\n")
            continue
        sa = ca.sets[s]
        prof = sa.profile
        out.write(
            f"{s:>2} {prof.p_s:9.6f} {prof.support_size:>4} {prof.distinct_values:>4} "
            f"{disc.gram_determinant(prof):10.3e} {str(disc.is_linearly_independent(prof)):>5} "
            f"{sa.me_e:8.5f} {sa.me_f:8.5f} {sa.stage_e[0]:8.5f} {sa.stage_f[0]:8.5f} "
            f"{sa.p_stages[0]:8.5f} {sa.available:>6}\n"
        )

    rows = []
    summary = []
    for strategy in opts.strategies:
        policy = _policy(ch, opts, strategy)
        tree = strategy_tree(ch, policy)
        for o in tree:
            rows.append((strategy, o.s, o.m, o.beta_used, o.success, o.branch_probability, o.entanglement, o.fidelity))
        e, f = average_smc(ch, policy)
        p_succ = success_probability(ch, policy)
        e_post, f_post, _ = postselected_average(ch, policy)
        summary.append((strategy, list(policy.betas), e, f, p_succ, e_post, f_post))

    e_me, f_me = average_me(ch)
    out.write(f"\nME reference averages: E={e_me:.6f} F={f_me:.6f}\n")
    out.write(f"{'strategy':<8} {'stages per s':<18} {'<E>':>9} {'<F>':>9} {'p_succ':>9} {'<E>|succ':>9} {'<F>|succ':>9}\n")
    for strategy, betas, e, f, p, ep, fp in summary:
        out.write(f"{strategy:<8} {str(betas):<18} {e:9.6f} {f:9.6f} {p:9.6f} {ep:9.6f} {fp:9.6f}\n")

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        with (args.out / "swap_branches.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(BRANCH_COLUMNS)
            for r in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in r])
        with (args.out / "swap_summary.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("strategy", "betas", "E_avg", "F_avg", "p_succ", "E_avg_postselected", "F_avg_postselected"))
            for strategy, betas, *vals in summary:
                w.writerow([strategy, " ".join(map(str, betas))] + [repr(v) for v in vals])
        log.info("wrote %s", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    sweep = cfg.sweep or SweepConfig()
    if args.grid is not None:
        if args.grid < 2:
            raise ConfigError("--grid must be >= 2")
        sweep.c_grid = replace(sweep.c_grid, num=args.grid)
        sweep.d_grid = replace(sweep.d_grid, num=args.grid)
    if args.beta_max is not None:
        sweep.betas = tuple(range(1, args.beta_max + 1))
    sweep.out_dir = args.out or Path("sweep_out")
    files = run_sweep(sweep)
    for name, path in files.items():
        sys.stdout.write(f"{name}: {path}\n")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .verify import monte_carlo_check

    cfg = _load(args)
    check: CheckConfig = cfg.check
    try:
        if args.seed is not None:
            check = replace(check, seed=args.seed)
        if args.tolerance is not None:
            check = replace(check, tolerance=args.tolerance)
        if args.n_channels is not None:
            check = replace(check, n_channels=args.n_channels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = run_oracle_check(check)
    sys.stdout.write(report.format() + "\n")
    ok = report.passed
    n_mc = args.mc_samples if args.mc_samples is not None else cfg.mc_samples
    if n_mc:
        mc = monte_carlo_check(n_samples=n_mc, seed=check.seed)
        sys.stdout.write(mc.format() + "\n")
        ok = ok and mc.passed
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "oracle_check.txt").write_text(report.format() + "\n", encoding="utf-8")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {"swap": cmd_swap, "sweep": cmd_sweep, "oracle-check": cmd_oracle_check}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SwapError) as exc:
        sys.stderr.write(f"qswap: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
