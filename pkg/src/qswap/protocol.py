"""Entanglement swapping assisted by ME, MC and sequential MC discrimination.

Branch states are expressed in the generalized Bell basis {|Psi_ls>}_l of the
measured set ``s``; figures of merit are the normalized linear entropy of a
reduced state and the fidelity to |Psi_ms>.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import discrimination as disc
from .channels import SchmidtChannel, SetProfile, outcome_probabilities, reduce_effective, set_profile
from .errors import (
    ExhaustedStagesError,
    IndexOutOfRangeError,
    InvalidPolicyError,
    ZeroProbabilitySetError,
    ZeroSuccessProbabilityError,
)
from .gates import QuditState, bell_basis_matrix, omega

# Ties in thresholds and in "strictly better than ME" comparisons.
COMPARE_TOL = 1e-12


class Strategy(str, enum.Enum):
    ME = "me"
    MC = "mc"
    SMC = "smc"


@dataclass(frozen=True, eq=False)
class SwapOutcome:
    strategy: Strategy
    s: int
    m: int | None
    beta_used: int
    success: bool
    branch_probability: float
    state_coeffs: np.ndarray
    entanglement: float
    fidelity: float
    dim_b: int
    corrected: bool = False

    @property
    def dim_a(self) -> int:
        return len(self.state_coeffs)

    def state(self) -> QuditState:
        """The branch state of systems (1, 4) as an amplitude vector.

        After :func:`local_correction` the coefficients refer to |Psi_l0>.
        """
        frame = 0 if self.corrected else self.s
        basis = bell_basis_matrix(self.dim_a, frame, self.dim_b)
        return QuditState((self.dim_a, self.dim_b), basis @ self.state_coeffs)


# -- closed-form figures ------------------------------------------------------


def me_entanglement(gamma: np.ndarray) -> float:
    dim = len(gamma)
    return dim / (dim - 1) * (1.0 - float(np.sum(gamma**4)))


def me_fidelity(gamma: np.ndarray) -> float:
    return float(np.sum(gamma)) ** 2 / len(gamma)


def mc_entanglement(support_size: int, dim: int) -> float:
    return dim / (dim - 1) * (1.0 - 1.0 / support_size)


def mc_fidelity(support_size: int, dim: int) -> float:
    return support_size / dim


def _fourier_coeffs(fiducial: np.ndarray, m: int) -> np.ndarray:
    # b_l = D^{-1/2} sum_n omega^{n(l-m)} f_n
    dim = len(fiducial)
    n = np.arange(dim)
    l = np.arange(dim)
    phases = omega(dim) ** (np.outer(l - m, n) % dim)
    return phases @ fiducial.astype(complex) / np.sqrt(dim)


def me_coeffs(gamma: np.ndarray, m: int) -> np.ndarray:
    """Coefficients of |Phi_ms> in the |Psi_ls> basis."""
    return _fourier_coeffs(np.asarray(gamma, dtype=float), m)


def mc_coeffs(support: Sequence[int], m: int) -> np.ndarray:
    """Coefficients of the state left by a conclusive MC stage on ``support``."""
    y = np.asarray(support, dtype=float)
    return _fourier_coeffs(y / np.sqrt(np.sum(y)), m)


# -- cached per-channel analysis ---------------------------------------------


@dataclass(frozen=True)
class SetAnalysis:
    """Everything the averages need about one occurring set s.

    Index conventions: ``p_stages[b-1]``, ``stage_e[b-1]`` and ``stage_f[b-1]``
    refer to MC stage b; ``residuals[k]`` is the set after k failed stages
    (``None`` when k failures cannot happen).
    """

    profile: SetProfile
    chain: tuple[disc.SmcStage, ...]
    p_stages: tuple[float, ...]
    stage_e: tuple[float, ...]
    stage_f: tuple[float, ...]
    residuals: tuple[disc.SmcStage | None, ...]
    residual_e: tuple[float, ...]
    residual_f: tuple[float, ...]

    @property
    def available(self) -> int:
        return len(self.chain)

    @property
    def me_e(self) -> float:
        return self.residual_e[0]

    @property
    def me_f(self) -> float:
        return self.residual_f[0]

    def reach_probability(self, beta: int) -> float:
        """Probability of failing the first ``beta`` stages."""
        return float(np.prod([1.0 - p for p in self.p_stages[:beta]]))

    def terms(self, beta_max: int) -> tuple[list[tuple[float, float, float]], float, float, float]:
        """(prob, E, F) per conclusive stage, then the terminal-failure
        probability with its ME figures, for at most ``beta_max`` stages."""
        succ = []
        reach = 1.0
        for b in range(1, beta_max + 1):
            p = self.p_stages[b - 1]
            succ.append((reach * p, self.stage_e[b - 1], self.stage_f[b - 1]))
            reach *= 1.0 - p
        if self.residuals[beta_max] is None:
            return succ, 0.0, 0.0, 0.0
        return succ, reach, self.residual_e[beta_max], self.residual_f[beta_max]


def _analyze_set(profile: SetProfile) -> SetAnalysis:
    dim = profile.dim_a
    chain = tuple(disc.stage_chain(profile))
    p_stages = tuple(st.p_succ_next for st in chain)
    residuals: list[disc.SmcStage | None] = [chain[0]]
    for b in range(1, len(chain) + 1):
        residuals.append(disc.terminal_residual(chain, b))
    res_e = tuple(me_entanglement(r.gamma_arr) if r is not None else 0.0 for r in residuals)
    res_f = tuple(me_fidelity(r.gamma_arr) if r is not None else 0.0 for r in residuals)
    return SetAnalysis(
        profile=profile,
        chain=chain,
        p_stages=p_stages,
        stage_e=tuple(mc_entanglement(st.support_size, dim) for st in chain),
        stage_f=tuple(mc_fidelity(st.support_size, dim) for st in chain),
        residuals=tuple(residuals),
        residual_e=res_e,
        residual_f=res_f,
    )


@dataclass(frozen=True)
class ChannelAnalysis:
    channel: SchmidtChannel
    p: tuple[float, ...]
    sets: dict[int, SetAnalysis]


@lru_cache(maxsize=32768)
def analyze_channel(ch: SchmidtChannel) -> ChannelAnalysis:
    p = outcome_probabilities(ch)
    sets = {s: _analyze_set(set_profile(ch, s)) for s in range(ch.dim_b) if p[s] > 0.0}
    return ChannelAnalysis(ch, tuple(float(v) for v in p), sets)


def prepare_channel(ch: SchmidtChannel, effective: bool = False) -> SchmidtChannel:
    """Optionally restrict to the effective subspace before swapping."""
    return reduce_effective(ch) if effective else ch


def _set(ch: SchmidtChannel, s: int) -> SetAnalysis:
    if not 0 <= s < ch.dim_b:
        raise IndexOutOfRangeError(f"s={s} outside 0..{ch.dim_b - 1}")
    sets = analyze_channel(ch).sets
    if s not in sets:
        raise ZeroProbabilitySetError(f"outcome s={s} has zero probability")
    return sets[s]


def _check_m(ch: SchmidtChannel, m: int) -> None:
    if not 0 <= m < ch.dim_a:
        raise IndexOutOfRangeError(f"m={m} outside 0..{ch.dim_a - 1}")


# -- single branches ----------------------------------------------------------


def me_swap(ch: SchmidtChannel, s: int, m: int) -> SwapOutcome:
    sa = _set(ch, s)
    _check_m(ch, m)
    gamma = sa.profile.gamma_arr
    return SwapOutcome(
        strategy=Strategy.ME,
        s=s,
        m=m,
        beta_used=0,
        success=True,
        branch_probability=sa.profile.p_s / ch.dim_a,
        state_coeffs=me_coeffs(gamma, m),
        entanglement=sa.me_e,
        fidelity=sa.me_f,
        dim_b=ch.dim_b,
    )


def smc_swap(ch: SchmidtChannel, s: int, m: int, beta: int) -> SwapOutcome:
    """Branch in which MC stages 1..beta-1 failed and stage ``beta`` succeeded."""
    sa = _set(ch, s)
    _check_m(ch, m)
    if not 1 <= beta <= sa.available:
        raise ExhaustedStagesError(f"set s={s} supports MC stages 1..{sa.available}, got {beta}")
    stage = sa.chain[beta - 1]
    prob = sa.profile.p_s * sa.reach_probability(beta - 1) * sa.p_stages[beta - 1] / ch.dim_a
    return SwapOutcome(
        strategy=Strategy.SMC,
        s=s,
        m=m,
        beta_used=beta,
        success=True,
        branch_probability=prob,
        state_coeffs=mc_coeffs(stage.support, m),
        entanglement=sa.stage_e[beta - 1],
        fidelity=sa.stage_f[beta - 1],
        dim_b=ch.dim_b,
    )


def mc_swap(ch: SchmidtChannel, s: int, m: int) -> SwapOutcome:
    return replace(smc_swap(ch, s, m, 1), strategy=Strategy.MC)


def failed_terminal_me(ch: SchmidtChannel, s: int, m: int, beta_max: int) -> SwapOutcome:
    """ME applied to the residual set after ``beta_max`` failed MC stages."""
    if beta_max == 0:
        return me_swap(ch, s, m)
    sa = _set(ch, s)
    _check_m(ch, m)
    if not 1 <= beta_max <= sa.available:
        raise ExhaustedStagesError(f"set s={s} supports MC stages 1..{sa.available}, got {beta_max}")
    residual = sa.residuals[beta_max]
    if residual is None:
        raise ExhaustedStagesError(f"stage {beta_max} of set s={s} never fails")
    return SwapOutcome(
        strategy=Strategy.SMC,
        s=s,
        m=m,
        beta_used=beta_max,
        success=False,
        branch_probability=sa.profile.p_s * sa.reach_probability(beta_max) / ch.dim_a,
        state_coeffs=me_coeffs(residual.gamma_arr, m),
        entanglement=sa.residual_e[beta_max],
        fidelity=sa.residual_f[beta_max],
        dim_b=ch.dim_b,
    )


def local_correction(outcome: SwapOutcome) -> SwapOutcome:
    """Alice applies Z^m and Bob X^s, mapping |Psi_ms> onto |Psi_00>."""
    if outcome.m is None:
        raise ValueError("local correction needs a conclusive outcome m")
    if outcome.corrected:
        return outcome
    coeffs = np.roll(outcome.state_coeffs, -outcome.m)
    return replace(outcome, state_coeffs=coeffs, corrected=True)


# -- policies -----------------------------------------------------------------


@dataclass(frozen=True)
class Objective:
    kind: str
    tau: float | None = None

    KINDS = ("max_avg_e", "max_avg_f", "threshold_e", "threshold_f")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown objective {self.kind!r}")
        if self.kind.startswith("threshold") and self.tau is None:
            raise ValueError("threshold objectives need tau")

    @classmethod
    def max_avg_e(cls) -> "Objective":
        return cls("max_avg_e")

    @classmethod
    def max_avg_f(cls) -> "Objective":
        return cls("max_avg_f")

    @classmethod
    def threshold_e(cls, tau: float) -> "Objective":
        return cls("threshold_e", tau)

    @classmethod
    def threshold_f(cls, tau: float) -> "Objective":
        return cls("threshold_f", tau)


@dataclass(frozen=True)
class StagePolicy:
    """Maximum number of MC stages per outcome s (0 means plain ME)."""

    betas: tuple[int, ...]
    mode: str = "fixed"
    objective: Objective | None = None

    def beta(self, s: int) -> int:
        return self.betas[s]

    @classmethod
    def me_only(cls, ch: SchmidtChannel) -> "StagePolicy":
        return cls((0,) * ch.dim_b)

    @classmethod
    def fixed(cls, ch: SchmidtChannel, k: int) -> "StagePolicy":
        """``k`` stages for every set, capped by what each set supports."""
        sets = analyze_channel(ch).sets
        return cls(tuple(min(k, sets[s].available) if s in sets else 0 for s in range(ch.dim_b)))

    @classmethod
    def full(cls, ch: SchmidtChannel) -> "StagePolicy":
        sets = analyze_channel(ch).sets
        return cls(tuple(sets[s].available if s in sets else 0 for s in range(ch.dim_b)))


def validate_policy(ch: SchmidtChannel, policy: StagePolicy) -> None:
    if len(policy.betas) != ch.dim_b:
        raise InvalidPolicyError(f"policy has {len(policy.betas)} entries, channel has {ch.dim_b} sets")
    sets = analyze_channel(ch).sets
    for s, b in enumerate(policy.betas):
        limit = sets[s].available if s in sets else 0
        if s in sets and not 0 <= b <= limit:
            raise InvalidPolicyError(f"beta={b} for s={s} outside 0..{limit}")
        if s not in sets and b != 0:
            raise InvalidPolicyError(f"s={s} never occurs, beta must be 0")


def _set_average(sa: SetAnalysis, beta_max: int) -> tuple[float, float]:
    succ, p_fail, e_fail, f_fail = sa.terms(beta_max)
    e = sum(p * e for p, e, _ in succ) + p_fail * e_fail
    f = sum(p * f for p, _, f in succ) + p_fail * f_fail
    return e, f


def adaptive_stage_policy(
    ch: SchmidtChannel,
    objective: Objective,
    max_stages: int | None = None,
    min_stages: int = 1,
) -> StagePolicy:
    """Pick beta_s per set by exhaustive search.

    ``max_avg_*`` maximizes the set's contribution to the overall average over
    beta in ``min_stages..min(max_stages, available)``; ties keep the smaller
    beta. ``threshold_*`` takes every stage whose conclusive figure meets tau.
    """
    sets = analyze_channel(ch).sets
    betas = []
    for s in range(ch.dim_b):
        if s not in sets:
            betas.append(0)
            continue
        sa = sets[s]
        cap = sa.available if max_stages is None else min(max_stages, sa.available)
        if objective.kind.startswith("threshold"):
            figs = sa.stage_e if objective.kind == "threshold_e" else sa.stage_f
            betas.append(sum(1 for v in figs[:cap] if v >= objective.tau - COMPARE_TOL))
            continue
        idx = 0 if objective.kind == "max_avg_e" else 1
        lo = min(min_stages, cap)
        best_b, best_v = lo, _set_average(sa, lo)[idx]
        for b in range(lo + 1, cap + 1):
            v = _set_average(sa, b)[idx]
            if v > best_v + COMPARE_TOL:
                best_b, best_v = b, v
        betas.append(best_b)
    mode = "threshold" if objective.kind.startswith("threshold") else "adaptive"
    return StagePolicy(tuple(betas), mode, objective)


# -- whole-protocol statistics -----------------------------------------------


def strategy_tree(ch: SchmidtChannel, policy: StagePolicy) -> list[SwapOutcome]:
    """Every branch (s, stage, m) of the protocol run under ``policy``."""
    validate_policy(ch, policy)
    out = []
    for s, sa in analyze_channel(ch).sets.items():
        beta_max = policy.beta(s)
        for b in range(1, beta_max + 1):
            out.extend(smc_swap(ch, s, m, b) for m in range(ch.dim_a))
        if sa.residuals[beta_max] is not None:
            out.extend(failed_terminal_me(ch, s, m, beta_max) for m in range(ch.dim_a))
    return out


def average_me(ch: SchmidtChannel) -> tuple[float, float]:
    ca = analyze_channel(ch)
    e = sum(ca.p[s] * sa.me_e for s, sa in ca.sets.items())
    f = sum(ca.p[s] * sa.me_f for s, sa in ca.sets.items())
    return e, f


def average_smc(ch: SchmidtChannel, policy: StagePolicy) -> tuple[float, float]:
    """Averages over every branch, including ME after the last failed stage."""
    validate_policy(ch, policy)
    ca = analyze_channel(ch)
    e_tot = f_tot = 0.0
    for s, sa in ca.sets.items():
        e, f = _set_average(sa, policy.beta(s))
        e_tot += ca.p[s] * e
        f_tot += ca.p[s] * f
    return e_tot, f_tot


def success_probability(ch: SchmidtChannel, policy: StagePolicy) -> float:
    """Total probability of a conclusive branch; sets with beta=0 use ME,
    which always concludes."""
    validate_policy(ch, policy)
    ca = analyze_channel(ch)
    total = 0.0
    for s, sa in ca.sets.items():
        b = policy.beta(s)
        total += ca.p[s] * (disc.smc_cumulative_success(sa.p_stages, b) if b else 1.0)
    return total


def postselected_average(ch: SchmidtChannel, policy: StagePolicy) -> tuple[float, float, float]:
    """Averages conditioned on a conclusive branch: (E, F, p_total)."""
    validate_policy(ch, policy)
    ca = analyze_channel(ch)
    e_tot = f_tot = p_tot = 0.0
    for s, sa in ca.sets.items():
        b = policy.beta(s)
        if b == 0:
            succ = [(1.0, sa.me_e, sa.me_f)]
        else:
            succ = sa.terms(b)[0]
        for p, e, f in succ:
            w = ca.p[s] * p
            p_tot += w
            e_tot += w * e
            f_tot += w * f
    if p_tot <= 0.0:
        raise ZeroSuccessProbabilityError("policy never yields a conclusive branch")
    return e_tot / p_tot, f_tot / p_tot, p_tot


def enhancement_probability(ch: SchmidtChannel, beta_max: int, figure: str = "e") -> tuple[float, dict[int, float]]:
    """Probability of swapping with a figure strictly above the ME value.

    Sums the conclusive-stage probabilities over stages 1..beta_max whose
    entanglement (``figure="e"``) or fidelity (``"f"``) beats ME for that set.
    Returns the p_s-weighted total and the per-set values.
    """
    if figure not in ("e", "f"):
        raise ValueError("figure must be 'e' or 'f'")
    ca = analyze_channel(ch)
    per_set = {}
    for s, sa in ca.sets.items():
        ref = sa.me_e if figure == "e" else sa.me_f
        figs = sa.stage_e if figure == "e" else sa.stage_f
        succ = sa.terms(min(beta_max, sa.available))[0]
        per_set[s] = sum(p for (p, _, _), v in zip(succ, figs) if v > ref + COMPARE_TOL)
    total = sum(ca.p[s] * v for s, v in per_set.items())
    return total, per_set
