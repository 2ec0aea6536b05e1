"""Discrimination of the symmetric sets {|nu_ls>: l = 0..D_A-1}.

Covers the Gram-matrix test for linear independence, the minimum-error (ME)
measurement statistics, the maximum-confidence (MC) Kraus pair with its
two-dimensional-ancilla dilation, and the sequential MC (SMC) recursion in
which each failed stage removes the smallest degeneracy class of the
fiducial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .channels import DEGENERACY_RTOL, ZERO_TOL, SetProfile
from .errors import CompletionFailureError, EmptySupportError, ExhaustedStagesError
from .gates import UNITARY_TOL, LocalOperator, omega, unitarity_error

# Rounding residues of Gamma^2 - gamma^2 below this are clamped to zero.
CLAMP_TOL = 1e-14


def gram_matrix(profile: SetProfile) -> np.ndarray:
    """[G]_jk = <nu_js|nu_ks> = sum_l Gamma_l^2 omega^{l(k-j)}."""
    dim = profile.dim_a
    g2 = profile.gamma_arr**2
    idx = np.arange(dim)
    diff = (idx[None, :] - idx[:, None]) % dim
    phases = omega(dim) ** (np.arange(dim)[:, None, None] * diff[None, :, :] % dim)
    return np.einsum("l,ljk->jk", g2, phases)


def gram_determinant(profile: SetProfile) -> float:
    """Closed form D_A^D_A * prod_j Gamma_j^2 (the Gram matrix is circulant)."""
    dim = profile.dim_a
    return float(dim**dim * np.prod(profile.gamma_arr**2))


def is_linearly_independent(profile: SetProfile) -> bool:
    return profile.support_size == profile.dim_a


def me_outcome_distribution(profile: SetProfile, l: int) -> np.ndarray:
    """P(m | nu_l) for the inverse-Fourier-then-computational-basis measurement."""
    dim = profile.dim_a
    n = np.arange(dim)
    amps = [np.sum(profile.gamma_arr * omega(dim) ** (n * (l - m) % dim)) for m in range(dim)]
    return np.abs(np.array(amps)) ** 2 / dim


@dataclass(frozen=True)
class SmcStage:
    """Set to be discriminated after ``beta`` failed MC attempts."""

    beta: int
    gamma_vec: tuple[float, ...]
    min_coeff: float
    support: tuple[int, ...]
    support_size: int
    p_succ_next: float

    @property
    def gamma_arr(self) -> np.ndarray:
        return np.asarray(self.gamma_vec, dtype=float)


@dataclass(frozen=True)
class McOperators:
    a_succ: LocalOperator
    a_fail: LocalOperator
    p_succ: float


@dataclass(frozen=True)
class SmcStep:
    """Outcome of one MC stage applied to an :class:`SmcStage`."""

    success_coeffs: np.ndarray
    failure_stage: SmcStage | None
    p_succ: float


def _stage_from_gamma_sq(beta: int, gamma_sq: np.ndarray) -> SmcStage:
    gamma = np.sqrt(gamma_sq)
    gamma = np.where(gamma < ZERO_TOL, 0.0, gamma)
    support = tuple(int(v > 0.0) for v in gamma)
    n_supp = sum(support)
    if n_supp == 0:
        raise EmptySupportError("stage has no nonzero coefficients")
    gmin = float(np.min(gamma[gamma > 0.0]))
    return SmcStage(
        beta=beta,
        gamma_vec=tuple(float(v) for v in gamma),
        min_coeff=gmin,
        support=support,
        support_size=n_supp,
        p_succ_next=min(1.0, n_supp * gmin**2),
    )


def initial_stage(profile: SetProfile) -> SmcStage:
    return _stage_from_gamma_sq(0, profile.gamma_arr**2)


def _as_stage(obj: Union[SetProfile, SmcStage]) -> SmcStage:
    return obj if isinstance(obj, SmcStage) else initial_stage(obj)


def _residual_gamma_sq(gamma_sq: np.ndarray, gmin_sq: float) -> np.ndarray:
    """Unnormalized Gamma^2 - gamma^2 on the support, with the whole minimum
    degeneracy class removed."""
    resid = np.where(gamma_sq > 0.0, gamma_sq - gmin_sq, 0.0)
    in_min_class = (gamma_sq > 0.0) & (gamma_sq - gmin_sq <= DEGENERACY_RTOL * gamma_sq)
    resid[in_min_class] = 0.0
    resid[resid < CLAMP_TOL] = 0.0
    return resid


def mc_operators(obj: Union[SetProfile, SmcStage]) -> McOperators:
    """Diagonal Kraus pair A_succ = gamma y/Gamma, A_? = sqrt(1 - (gamma y/Gamma)^2).

    Off the support A_? acts as the identity so the pair is complete on the
    full D_A-dimensional space.
    """
    stage = _as_stage(obj)
    g = stage.gamma_arr
    if stage.support_size == 0:
        raise EmptySupportError("MC measurement needs at least one nonzero coefficient")
    ratio = np.zeros_like(g)
    ratio[g > 0] = stage.min_coeff / g[g > 0]
    ratio = np.minimum(ratio, 1.0)
    dim = len(g)
    a_succ = LocalOperator(dim, np.diag(ratio).astype(complex))
    a_fail = LocalOperator(dim, np.diag(np.sqrt(1.0 - ratio**2)).astype(complex))
    return McOperators(a_succ, a_fail, stage.p_succ_next)


def embed_mc_unitary(ops: McOperators) -> LocalOperator:
    """Unitary on system (x) ancilla with U|psi>|0> = A_succ|psi>|0> + A_?|psi>|1>.

    Columns for ancilla input |1> are filled by Gram-Schmidt over the
    computational basis in index order; basis index is ``2*q + a``.
    """
    dim = ops.a_succ.dim
    size = 2 * dim
    fixed = np.zeros((size, dim), dtype=complex)
    fixed[0::2, :] = ops.a_succ.matrix
    fixed[1::2, :] = ops.a_fail.matrix
    if unitarity_error(fixed) > UNITARY_TOL:
        raise CompletionFailureError("Kraus pair is not complete; cannot dilate")

    basis = [fixed[:, j] for j in range(dim)]
    extra = []
    for k in range(size):
        if len(extra) == dim:
            break
        v = np.zeros(size, dtype=complex)
        v[k] = 1.0
        for _ in range(2):  # second pass for numerical orthogonality
            for b in basis + extra:
                v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            extra.append(v / nv)
    if len(extra) != dim:
        raise CompletionFailureError("could not complete the dilation to a unitary")

    mat = np.zeros((size, size), dtype=complex)
    mat[:, 0::2] = fixed
    mat[:, 1::2] = np.column_stack(extra)
    if unitarity_error(mat) > UNITARY_TOL:
        raise CompletionFailureError("completed dilation is not unitary within tolerance")
    return LocalOperator(size, mat, (dim, 2))


def smc_advance(stage: SmcStage) -> SmcStep:
    """Run one MC stage on ``stage``.

    Returns the success-branch fiducial (uniform over the current support),
    the stage left behind on failure (``None`` if success is certain) and the
    success probability N * gamma^2.
    """
    if stage.beta >= 1 and stage.support_size < 2:
        raise ExhaustedStagesError(
            f"stage {stage.beta} holds a single basis vector; further MC only yields product states"
        )
    g_sq = stage.gamma_arr**2
    y = np.asarray(stage.support, dtype=float)
    success = y / np.sqrt(stage.support_size)
    resid = _residual_gamma_sq(g_sq, stage.min_coeff**2)
    total = float(np.sum(resid))
    if total <= 0.0:
        return SmcStep(success, None, 1.0)
    failure = _stage_from_gamma_sq(stage.beta + 1, resid / total)
    return SmcStep(success, failure, stage.p_succ_next)


def stage_chain(obj: Union[SetProfile, SmcStage]) -> list[SmcStage]:
    """All stages on which an MC attempt is meaningful, starting at ``obj``.

    ``len(stage_chain(profile))`` is the number of MC stages available; the
    residual left after failing the last one is reached via
    :func:`terminal_residual`.
    """
    stage = _as_stage(obj)
    chain = [stage]
    while True:
        step = smc_advance(chain[-1])
        nxt = step.failure_stage
        if nxt is None or nxt.support_size < 2:
            return chain
        chain.append(nxt)


def terminal_residual(chain: Sequence[SmcStage], beta_max: int) -> SmcStage | None:
    """Stage reached after failing stages 1..beta_max (None if impossible)."""
    if beta_max == 0:
        return chain[0]
    return smc_advance(chain[beta_max - 1]).failure_stage


def max_useful_stages(profile: SetProfile) -> int:
    return profile.distinct_values - 1


def available_stages(profile: SetProfile) -> int:
    return len(stage_chain(profile))


def smc_cumulative_success(p_stages: Sequence[float], beta_max: int) -> float:
    """Probability of a conclusive event within the first ``beta_max`` stages."""
    if not 0 <= beta_max <= len(p_stages):
        raise ValueError(f"beta_max={beta_max} outside 0..{len(p_stages)}")
    total, fail = 0.0, 1.0
    for p in p_stages[:beta_max]:
        total += fail * p
        fail *= 1.0 - p
    return total
