"""Two-parameter grid sweeps over one free Schmidt coefficient on each side.

The default configuration is the D_A=4, D_B=5 channel pair with
c = (c0, 0.2811, 0.3790, c3) and d = (d0, 0.3220, 0.2064, 0, d4), where c0 and
d0 are swept and c3, d4 follow from normalization. Output is long-format CSV.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from .channels import SchmidtChannel, make_channel
from .discrimination import smc_cumulative_success
from .protocol import (
    Objective,
    StagePolicy,
    adaptive_stage_policy,
    analyze_channel,
    average_me,
    average_smc,
    enhancement_probability,
    postselected_average,
    success_probability,
)

FREE = "free"
AUTO = "auto"
Template = Sequence[Union[float, str]]

SWEEP_C: tuple = (FREE, 0.2811, 0.3790, AUTO)
SWEEP_D: tuple = (FREE, 0.3220, 0.2064, 0.0, AUTO)

COLUMNS = (
    "c0",
    "d0",
    "s",
    "strategy",
    "beta",
    "E",
    "F",
    "p_succ_cumulative",
    "E_avg",
    "F_avg",
    "E_avg_postselected",
    "F_avg_postselected",
    "status",
)

# Normalization residuals down to -FEASIBILITY_TOL are clamped to zero.
FEASIBILITY_TOL = 1e-12


@dataclass
class GridSpec:
    lo: float = 0.0
    hi: float | None = None  # None: largest feasible value
    num: int = 101


@dataclass
class SweepConfig:
    dim_a: int = 4
    dim_b: int = 5
    c_template: Template = SWEEP_C
    d_template: Template = SWEEP_D
    c_grid: GridSpec = field(default_factory=GridSpec)
    d_grid: GridSpec = field(default_factory=GridSpec)
    betas: tuple[int, ...] = (1, 2, 3)
    strategies: tuple[str, ...] = ("me", "mc", "smc")
    out_dir: Path = Path("sweep_out")

    def __post_init__(self):
        for name, tpl, dim in (("c", self.c_template, self.dim_a), ("d", self.d_template, self.dim_b)):
            if len(tpl) != dim:
                raise ValueError(f"{name} template has {len(tpl)} entries, expected {dim}")
            if sum(1 for v in tpl if v == FREE) != 1:
                raise ValueError(f"{name} template needs exactly one '{FREE}' entry")
            if sum(1 for v in tpl if v == AUTO) != 1:
                raise ValueError(f"{name} template needs exactly one '{AUTO}' entry")
        bad = [x for x in self.strategies if x not in ("me", "mc", "smc")]
        if bad:
            raise ValueError(f"unknown strategy {bad[0]!r}")
        if any(b < 1 for b in self.betas):
            raise ValueError("betas must be >= 1")


def _fixed_norm_sq(template: Template) -> float:
    return sum(float(v) ** 2 for v in template if v not in (FREE, AUTO))


def feasible_max(template: Template) -> float:
    return math.sqrt(max(0.0, 1.0 - _fixed_norm_sq(template)))


def fill_template(template: Template, free_value: float) -> list[float] | None:
    """Coefficients with the free entry set and the auto entry normalizing;
    ``None`` when no normalizing value exists."""
    rest = 1.0 - _fixed_norm_sq(template) - free_value**2
    if rest < -FEASIBILITY_TOL:
        return None
    auto = math.sqrt(max(0.0, rest))
    return [free_value if v == FREE else auto if v == AUTO else float(v) for v in template]


def grid_values(spec: GridSpec, template: Template) -> np.ndarray:
    hi = feasible_max(template) if spec.hi is None else spec.hi
    return np.linspace(spec.lo, hi, spec.num)


def grid_points(cfg: SweepConfig) -> Iterator[tuple[float, float, SchmidtChannel | None]]:
    """Row-major over (c0, d0); infeasible points yield ``None``."""
    for c0 in grid_values(cfg.c_grid, cfg.c_template):
        c = fill_template(cfg.c_template, float(c0))
        for d0 in grid_values(cfg.d_grid, cfg.d_template):
            d = fill_template(cfg.d_template, float(d0))
            if c is None or d is None:
                yield float(c0), float(d0), None
                continue
            yield float(c0), float(d0), make_channel(cfg.dim_a, cfg.dim_b, c, d, renormalize=True)


def _row(c0: float, d0: float, **kw) -> dict:
    row = dict.fromkeys(COLUMNS, "")
    row.update(c0=c0, d0=d0, status="ok")
    row.update(kw)
    return row


def _skip(c0: float, d0: float) -> dict:
    return _row(c0, d0, status="infeasible")


def surface_figures(cfg: SweepConfig) -> list[dict]:
    """Per point and set s: ME surfaces and MC planes of E and F; with ``smc``
    in the strategy list, the conclusive figures of every later stage too."""
    rows = []
    for c0, d0, ch in grid_points(cfg):
        if ch is None:
            rows.append(_skip(c0, d0))
            continue
        for s, sa in analyze_channel(ch).sets.items():
            if "me" in cfg.strategies:
                rows.append(_row(c0, d0, s=s, strategy="me", beta=0, E=sa.me_e, F=sa.me_f))
            if "mc" in cfg.strategies:
                rows.append(
                    _row(c0, d0, s=s, strategy="mc", beta=1, E=sa.stage_e[0], F=sa.stage_f[0], p_succ_cumulative=sa.p_stages[0])
                )
            if "smc" in cfg.strategies:
                for b in range(2, sa.available + 1):
                    rows.append(
                        _row(
                            c0, d0, s=s, strategy="smc", beta=b, E=sa.stage_e[b - 1], F=sa.stage_f[b - 1],
                            p_succ_cumulative=smc_cumulative_success(sa.p_stages, b),
                        )
                    )
    return rows


def enhancement_probability_map(cfg: SweepConfig) -> list[dict]:
    """Probability of beating ME in E (strategy ``enhance_e``) or F
    (``enhance_f``) with at most beta stages, per set and p_s-averaged."""
    rows = []
    for c0, d0, ch in grid_points(cfg):
        if ch is None:
            rows.append(_skip(c0, d0))
            continue
        for beta in cfg.betas:
            for fig in ("e", "f"):
                total, per_set = enhancement_probability(ch, beta, fig)
                for s, v in per_set.items():
                    rows.append(_row(c0, d0, s=s, strategy=f"enhance_{fig}", beta=beta, p_succ_cumulative=v))
                rows.append(_row(c0, d0, s="avg", strategy=f"enhance_{fig}", beta=beta, p_succ_cumulative=total))
    return rows


MODES = ("fixed", "adaptive", "postselected")


def averages_map(cfg: SweepConfig, mode: str) -> list[dict]:
    """Overall averages per point.

    ``fixed``: beta stages for every set. ``adaptive``: beta_s <= beta chosen
    per set to maximize the E (resp. F) average. ``postselected``: the adaptive
    policies, averaged over conclusive branches only. Each point also carries
    an ``me`` row for reference.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rows = []
    for c0, d0, ch in grid_points(cfg):
        if ch is None:
            rows.append(_skip(c0, d0))
            continue
        e_me, f_me = average_me(ch)
        rows.append(_row(c0, d0, s="avg", strategy="me", beta=0, E_avg=e_me, F_avg=f_me, p_succ_cumulative=1.0))
        for beta in cfg.betas:
            if mode == "fixed":
                pol = StagePolicy.fixed(ch, beta)
                e, f = average_smc(ch, pol)
                rows.append(
                    _row(c0, d0, s="avg", strategy="smc", beta=beta, E_avg=e, F_avg=f, p_succ_cumulative=success_probability(ch, pol))
                )
                continue
            pol_e = adaptive_stage_policy(ch, Objective.max_avg_e(), beta)
            pol_f = adaptive_stage_policy(ch, Objective.max_avg_f(), beta)
            if mode == "adaptive":
                rows.append(
                    _row(
                        c0, d0, s="avg", strategy="smc_adaptive", beta=beta,
                        E_avg=average_smc(ch, pol_e)[0],
                        F_avg=average_smc(ch, pol_f)[1],
                    )
                )
            else:
                e_post, _, p_e = postselected_average(ch, pol_e)
                _, f_post, _ = postselected_average(ch, pol_f)
                rows.append(
                    _row(
                        c0, d0, s="avg", strategy="smc_postselected", beta=beta,
                        E_avg_postselected=e_post, F_avg_postselected=f_post, p_succ_cumulative=p_e,
                    )
                )
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows: Sequence[dict], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in COLUMNS])
    return path


def run_sweep(cfg: SweepConfig) -> dict[str, Path]:
    """Write one CSV per figure mode into ``cfg.out_dir``."""
    out = Path(cfg.out_dir)
    files = {
        "surfaces": surface_figures(cfg),
        "enhancement": enhancement_probability_map(cfg),
        "averages_fixed": averages_map(cfg, "fixed"),
        "averages_adaptive": averages_map(cfg, "adaptive"),
        "averages_postselected": averages_map(cfg, "postselected"),
    }
    return {name: write_csv(rows, out / f"{name}.csv") for name, rows in files.items()}
