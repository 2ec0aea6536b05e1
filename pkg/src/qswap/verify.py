"""Closed-form vs statevector-oracle comparison used by ``qswap oracle-check``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .channels import SchmidtChannel, make_channel
from .gates import unitarity_error
from .protocol import StagePolicy, analyze_channel, average_smc, strategy_tree, success_probability

QUANTITIES = (
    "outcome_probability",
    "branch_probability",
    "branch_state",
    "entanglement",
    "fidelity",
    "tree_total",
    "average_e",
    "average_f",
    "success_probability",
    "unitarity",
)


@dataclass
class CheckConfig:
    n_channels: int = 100
    seed: int = 42
    dims_a: tuple[int, ...] = (2, 3, 4)
    dim_b_max: int = 5
    tolerance: float = 1e-9
    zero_prob: float = 0.25

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.n_channels < 1:
            raise ValueError("n_channels must be >= 1")


@dataclass
class CheckReport:
    tolerance: float
    n_channels: int = 0
    n_branches: int = 0
    max_dev: dict[str, float] = field(default_factory=lambda: {q: 0.0 for q in QUANTITIES})
    worst: dict[str, str] = field(default_factory=dict)

    def record(self, quantity: str, deviation: float, where: str) -> None:
        if not deviation <= self.max_dev[quantity]:
            self.max_dev[quantity] = float(deviation)
            self.worst[quantity] = where

    @property
    def failures(self) -> list[str]:
        return [q for q, v in self.max_dev.items() if not v <= self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.failures

    def format(self) -> str:
        lines = [f"oracle check: {self.n_channels} channels, {self.n_branches} branches, tolerance {self.tolerance:g}"]
        for q in QUANTITIES:
            v = self.max_dev[q]
            status = "ok  " if v <= self.tolerance else "FAIL"
            extra = f"  (worst: {self.worst[q]})" if q in self.worst and status == "FAIL" else ""
            lines.append(f"  {status} {q:<22s} max deviation {v:.3e}{extra}")
        lines.append("PASS" if self.passed else "FAIL: " + ", ".join(self.failures))
        return "\n".join(lines)


def random_channel(rng: np.random.Generator, dim_a: int, dim_b: int, zero_prob: float = 0.25) -> SchmidtChannel:
    """Random channel pair; each coefficient is zeroed with ``zero_prob`` (at
    least one survives on each side)."""

    def coeffs(n: int) -> np.ndarray:
        v = rng.uniform(0.05, 1.0, n)
        mask = rng.random(n) < zero_prob
        if mask.all():
            mask[rng.integers(n)] = False
        v[mask] = 0.0
        return v / np.linalg.norm(v)

    return make_channel(dim_a, dim_b, coeffs(dim_a), coeffs(dim_b))


def random_channels(cfg: CheckConfig) -> list[SchmidtChannel]:
    rng = np.random.default_rng(cfg.seed)
    pairs = [(a, b) for a in cfg.dims_a for b in range(a, cfg.dim_b_max + 1)]
    out = []
    for i in range(cfg.n_channels):
        a, b = pairs[i % len(pairs)]
        out.append(random_channel(rng, a, b, cfg.zero_prob))
    return out


def _record_key(outcome) -> tuple:
    if outcome.beta_used == 0:
        bits: tuple[int, ...] = ()
    elif outcome.success:
        bits = (1,) * (outcome.beta_used - 1) + (0,)
    else:
        bits = (1,) * outcome.beta_used
    return outcome.s, bits, outcome.m


def check_channel(ch: SchmidtChannel, report: CheckReport, label: str = "") -> None:
    ca = analyze_channel(ch)
    max_k = max((sa.available for sa in ca.sets.values()), default=0)
    for k in range(max_k + 1):
        policy = StagePolicy.fixed(ch, k)
        where = f"{label} dims=({ch.dim_a},{ch.dim_b}) beta<={k}"
        run = oracle.enumerate_trajectories(ch, policy.betas)
        for s in range(ch.dim_b):
            report.record("outcome_probability", abs(ca.p[s] - run.p_s.get(s, 0.0)), f"{where} s={s}")
        for u in run.unitaries:
            report.record("unitarity", unitarity_error(u.matrix), where)

        traj = {(t.s, t.bits, t.m): t for t in run.trajectories}
        tree = strategy_tree(ch, policy)
        seen = set()
        for out in tree:
            key = _record_key(out)
            seen.add(key)
            tag = f"{where} record={key}"
            t = traj.get(key)
            if t is None:
                report.record("branch_probability", out.branch_probability, tag)
                continue
            report.n_branches += 1
            report.record("branch_probability", abs(out.branch_probability - t.probability), tag)
            overlap = abs(np.vdot(out.state().amplitudes, t.state14)) ** 2
            report.record("branch_state", abs(1.0 - overlap), tag)
            report.record("entanglement", abs(out.entanglement - t.entanglement), tag)
            report.record("fidelity", abs(out.fidelity - t.fidelity), tag)
        for key, t in traj.items():
            if key not in seen:
                report.record("branch_probability", t.probability, f"{where} record={key} (oracle only)")

        report.record("tree_total", abs(sum(o.branch_probability for o in tree) - 1.0), where)
        report.record("tree_total", abs(sum(t.probability for t in run.trajectories) - 1.0), where + " oracle")
        e_avg, f_avg = average_smc(ch, policy)
        report.record("average_e", abs(e_avg - sum(t.probability * t.entanglement for t in run.trajectories)), where)
        report.record("average_f", abs(f_avg - sum(t.probability * t.fidelity for t in run.trajectories)), where)
        p_succ = sum(t.probability for t in run.trajectories if t.success)
        report.record("success_probability", abs(success_probability(ch, policy) - p_succ), where)


def run_oracle_check(cfg: CheckConfig | None = None) -> CheckReport:
    cfg = cfg or CheckConfig()
    report = CheckReport(tolerance=cfg.tolerance)
    for i, ch in enumerate(random_channels(cfg)):
        check_channel(ch, report, label=f"channel#{i}")
        report.n_channels += 1
    return report


def worked_example_channel() -> SchmidtChannel:
    """D_A = D_B = 3 pair whose every set has Gamma^2 = (0.5, 0.3, 0.2)."""
    return make_channel(3, 3, np.sqrt([0.5, 0.3, 0.2]), [3**-0.5] * 3)


@dataclass
class MonteCarloReport:
    n_samples: int
    rows: list[tuple[str, float, float, float]]  # name, sampled, exact, standard error
    n_sigma: float = 3.0

    @property
    def passed(self) -> bool:
        return all(abs(x - ref) <= self.n_sigma * se for _, x, ref, se in self.rows)

    def format(self) -> str:
        lines = [f"monte carlo: {self.n_samples} sampled records, bound {self.n_sigma:g} standard errors"]
        for name, x, ref, se in self.rows:
            z = abs(x - ref) / se if se > 0 else (0.0 if x == ref else float("inf"))
            status = "ok  " if z <= self.n_sigma else "FAIL"
            lines.append(f"  {status} {name:<20s} sampled {x:.6f} exact {ref:.6f} se {se:.2e} ({z:.2f} sigma)")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def monte_carlo_check(
    ch: SchmidtChannel | None = None, beta_max: int = 2, n_samples: int = 100_000, seed: int = 42
) -> MonteCarloReport:
    from .protocol import postselected_average

    ch = ch or worked_example_channel()
    policy = StagePolicy.fixed(ch, beta_max)
    stats = oracle.monte_carlo_run(ch, policy.betas, n_samples, seed)
    e_avg, f_avg = average_smc(ch, policy)
    e_post, f_post, p_total = postselected_average(ch, policy)
    rows = [
        ("success_probability", stats.success_rate, p_total, stats.success_se),
        ("average_e", stats.e_mean, e_avg, stats.e_se),
        ("average_f", stats.f_mean, f_avg, stats.f_se),
        ("postselected_e", stats.e_post, e_post, stats.e_post_se),
        ("postselected_f", stats.f_post, f_post, stats.f_post_se),
    ]
    return MonteCarloReport(n_samples, rows)
