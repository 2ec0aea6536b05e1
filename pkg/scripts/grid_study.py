"""Regenerate the sweep tables (surfaces, enhancement, averages) on the default
101x101 grid and count points that violate the expected strategy orderings.

    python3 scripts/grid_study.py --out results/grid [--grid 101]
"""

import argparse
import time
from pathlib import Path

from qswap.protocol import (
    Objective,
    StagePolicy,
    adaptive_stage_policy,
    average_me,
    average_smc,
    enhancement_probability,
    postselected_average,
)
from qswap.sweep import GridSpec, SweepConfig, grid_points, run_sweep

TOL = 1e-10


def orderings(cfg: SweepConfig) -> dict[str, int]:
    """Count grid points violating each expected ordering."""
    names = ["fixed<=me", "adaptive>=fixed", "adaptive<=me", "postselected>=me", "postselected nonincreasing", "enhancement nondecreasing"]
    bad = dict.fromkeys(names, 0)
    for _, _, ch in grid_points(cfg):
        if ch is None:
            continue
        e_me, f_me = average_me(ch)
        prev_post, prev_enh = None, (0.0, 0.0)
        for beta in cfg.betas:
            e_fix, f_fix = average_smc(ch, StagePolicy.fixed(ch, beta))
            pol_e = adaptive_stage_policy(ch, Objective.max_avg_e(), beta)
            pol_f = adaptive_stage_policy(ch, Objective.max_avg_f(), beta)
            e_ad, f_ad = average_smc(ch, pol_e)[0], average_smc(ch, pol_f)[1]
            post = postselected_average(ch, pol_e)[0], postselected_average(ch, pol_f)[1]
            enh = enhancement_probability(ch, beta, "e")[0], enhancement_probability(ch, beta, "f")[0]
            bad["fixed<=me"] += e_fix > e_me + TOL or f_fix > f_me + TOL
            bad["adaptive>=fixed"] += e_ad < e_fix - TOL or f_ad < f_fix - TOL
            bad["adaptive<=me"] += e_ad > e_me + TOL or f_ad > f_me + TOL
            bad["postselected>=me"] += post[0] < e_me - TOL or post[1] < f_me - TOL
            if prev_post is not None:
                bad["postselected nonincreasing"] += post[0] > prev_post[0] + TOL or post[1] > prev_post[1] + TOL
            bad["enhancement nondecreasing"] += enh[0] < prev_enh[0] - TOL or enh[1] < prev_enh[1] - TOL
            prev_post, prev_enh = post, enh
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/grid"))
    ap.add_argument("--grid", type=int, default=101)
    args = ap.parse_args()

    cfg = SweepConfig(c_grid=GridSpec(num=args.grid), d_grid=GridSpec(num=args.grid), out_dir=args.out)
    t0 = time.perf_counter()
    for name, path in run_sweep(cfg).items():
        print(f"{name:<22s} {path}")
    print(f"tables written in {time.perf_counter() - t0:.1f} s")
    for name, n in orderings(cfg).items():
        print(f"  {name:<28s} violations: {n}")


if __name__ == "__main__":
    main()
