"""Full-statevector simulation of the swapping circuits.

Systems 1-4 and one qubit ancilla per executed MC stage are simulated as a
dense tensor. The MC Kraus operators are derived from the simulated reduced
state of system 2 (rho_2 = diag(Gamma^2) for a symmetric equiprobable set),
never from the closed-form recursion, so the oracle can catch errors there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channels import SchmidtChannel
from .discrimination import McOperators, embed_mc_unitary
from .gates import LocalOperator, fourier, hybrid_gxor

SYS1, SYS2, SYS3, SYS4 = 0, 1, 2, 3
# Eigenvalues of rho_2 below this are outside the support (Gamma < 1e-12).
SUPPORT_TOL = 1e-24
BRANCH_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class Register:
    dims: tuple[int, ...]
    state: np.ndarray  # shaped like dims

    @property
    def vector(self) -> np.ndarray:
        return self.state.reshape(-1)

    def norm_sq(self) -> float:
        return float(np.vdot(self.state, self.state).real)


def build_initial_state(ch: SchmidtChannel) -> Register:
    phi_a = np.diag(ch.c_arr).astype(complex)  # amplitudes over (1, 2)
    phi_b = np.diag(ch.d_arr).astype(complex)  # amplitudes over (3, 4)
    state = np.einsum("ab,cd->abcd", phi_a, phi_b)
    return Register((ch.dim_a, ch.dim_a, ch.dim_b, ch.dim_b), state)


def apply_operator(reg: Register, matrix: np.ndarray, axes: Sequence[int]) -> Register:
    """Apply ``matrix`` (row-major over ``axes``) to the given subsystems."""
    axes = list(axes)
    sub_dims = [reg.dims[a] for a in axes]
    k = len(axes)
    op = matrix.reshape(sub_dims + sub_dims)
    moved = np.tensordot(op, reg.state, axes=(list(range(k, 2 * k)), axes))
    return Register(reg.dims, np.moveaxis(moved, list(range(k)), axes))


def project(reg: Register, axis: int, outcome: int) -> tuple[float, Register | None]:
    """Computational-basis measurement on one subsystem.

    Returns the outcome probability (relative to the current norm) and the
    renormalized post-measurement register, or ``None`` for a null branch.
    """
    total = reg.norm_sq()
    index = [slice(None)] * len(reg.dims)
    index[axis] = outcome
    kept = np.zeros_like(reg.state)
    kept[tuple(index)] = reg.state[tuple(index)]
    p = float(np.vdot(kept, kept).real) / total
    if p <= BRANCH_TOL:
        return p, None
    return p, Register(reg.dims, kept / np.sqrt(p * total))


def add_ancilla(reg: Register) -> Register:
    state = np.stack([reg.state, np.zeros_like(reg.state)], axis=-1)
    return Register(reg.dims + (2,), state)


def reduced_state(reg: Register, keep: Iterable[int]) -> np.ndarray:
    keep = list(keep)
    rest = [a for a in range(len(reg.dims)) if a not in keep]
    psi = np.moveaxis(reg.state, keep + rest, list(range(len(reg.dims))))
    d_keep = int(np.prod([reg.dims[a] for a in keep]))
    mat = psi.reshape(d_keep, -1)
    rho = mat @ mat.conj().T
    return rho / np.trace(rho).real


def linear_entropy_entanglement(rho: np.ndarray, dim: int) -> float:
    """D/(D-1) * (1 - tr rho^2) for a reduced state of dimension ``dim``."""
    purity = float(np.real(np.trace(rho @ rho)))
    return dim / (dim - 1) * (1.0 - purity)


def pair_state(reg: Register) -> np.ndarray:
    """Pure state of systems (1, 4) once every other subsystem is definite."""
    axes = [SYS1, SYS4]
    rest = [a for a in range(len(reg.dims)) if a not in axes]
    psi = np.moveaxis(reg.state, axes + rest, list(range(len(reg.dims))))
    flat = psi.reshape(reg.dims[SYS1] * reg.dims[SYS4], -1)
    col = int(np.argmax(np.linalg.norm(flat, axis=0)))
    vec = flat[:, col]
    if np.linalg.norm(np.delete(flat, col, axis=1)) > 1e-9:
        raise RuntimeError("systems other than (1, 4) are not in a definite state")
    return vec / np.linalg.norm(vec)


def apply_gxor_and_measure3(reg: Register) -> dict[int, tuple[float, Register]]:
    """G^XOR on (2 -> 3), then measure 3. Null branches are skipped."""
    dim_a, dim_b = reg.dims[SYS2], reg.dims[SYS3]
    reg = apply_operator(reg, hybrid_gxor(dim_a, dim_b).matrix, [SYS2, SYS3])
    out = {}
    for s in range(dim_b):
        p, post = project(reg, SYS3, s)
        if post is not None:
            out[s] = (p, post)
    return out


def mc_operators_from_register(reg: Register) -> McOperators:
    """MC Kraus pair A_succ = sqrt(lambda_min) rho_2^{-1/2} on the support of rho_2."""
    rho = reduced_state(reg, [SYS2])
    off = rho - np.diag(np.diag(rho))
    if np.max(np.abs(off)) > 1e-9:
        raise RuntimeError("reduced state of system 2 is not diagonal; set is not symmetric under Z")
    lam = np.clip(np.real(np.diag(rho)), 0.0, None)
    supp = lam > SUPPORT_TOL
    lam_min = float(np.min(lam[supp]))
    a_succ = np.zeros_like(lam)
    a_succ[supp] = np.sqrt(lam_min / lam[supp])
    a_succ = np.minimum(a_succ, 1.0)
    a_fail = np.sqrt(1.0 - a_succ**2)
    dim = len(lam)
    return McOperators(
        LocalOperator(dim, np.diag(a_succ).astype(complex)),
        LocalOperator(dim, np.diag(a_fail).astype(complex)),
        float(np.sum(supp)) * lam_min,
    )


def mc_stage(reg: Register) -> tuple[Register, LocalOperator]:
    """Attach a fresh ancilla and apply the stage unitary to (2, ancilla)."""
    unitary = embed_mc_unitary(mc_operators_from_register(reg))
    reg = add_ancilla(reg)
    return apply_operator(reg, unitary.matrix, [SYS2, len(reg.dims) - 1]), unitary


def measure_me(reg: Register, m: int) -> tuple[float, Register | None]:
    """Inverse Fourier on system 2, then measure it."""
    f_inv = fourier(reg.dims[SYS2]).matrix.conj().T
    return project(apply_operator(reg, f_inv, [SYS2]), SYS2, m)


def run_me_branch(reg_s: Register, m: int) -> tuple[float, np.ndarray | None]:
    p, post = measure_me(reg_s, m)
    return p, None if post is None else pair_state(post)


def run_smc_branch(reg_s: Register, bits: Sequence[int], m: int) -> tuple[float, np.ndarray | None]:
    """Ancilla record ``bits`` (0 = conclusive, 1 = failed), then ME outcome m.

    A record ending in 0 stops at that conclusive stage; a record of only 1s
    is followed by ME on the residual set.
    """
    prob = 1.0
    reg = reg_s
    for i, bit in enumerate(bits):
        if bit == 0 and i != len(bits) - 1:
            raise ValueError("a conclusive stage must end the record")
        reg, _ = mc_stage(reg)
        p, reg = project(reg, len(reg.dims) - 1, bit)
        prob *= p
        if reg is None:
            return prob, None
    p, post = measure_me(reg, m)
    return prob * p, None if post is None else pair_state(post)


@dataclass
class Trajectory:
    s: int
    bits: tuple[int, ...]
    m: int
    probability: float
    state14: np.ndarray
    entanglement: float
    fidelity: float

    @property
    def success(self) -> bool:
        return not self.bits or self.bits[-1] == 0


@dataclass
class OracleRun:
    p_s: dict[int, float]
    trajectories: list[Trajectory]
    unitaries: list[LocalOperator] = field(default_factory=list)


def _pair_figures(vec: np.ndarray, dim_a: int, dim_b: int, s: int, m: int) -> tuple[float, float]:
    mat = vec.reshape(dim_a, dim_b)
    rho1 = mat @ mat.conj().T
    ent = linear_entropy_entanglement(rho1, dim_a)
    # fidelity to |Psi_ms>, built here from its definition
    target = np.zeros((dim_a, dim_b), dtype=complex)
    w = np.exp(2j * np.pi / dim_a)
    for q in range(dim_a):
        target[q, (q - s) % dim_b] = w ** (-q * m) / np.sqrt(dim_a)
    fid = abs(np.vdot(target.reshape(-1), vec)) ** 2
    return ent, fid


def enumerate_trajectories(ch: SchmidtChannel, betas: Sequence[int]) -> OracleRun:
    """Simulate every measurement record; ``betas[s]`` MC stages for set s."""
    dim_a, dim_b = ch.dim_a, ch.dim_b
    branches = apply_gxor_and_measure3(build_initial_state(ch))
    trajectories: list[Trajectory] = []
    unitaries: list[LocalOperator] = []

    def leaves(reg: Register, s: int, bits: tuple[int, ...], prob: float) -> None:
        f_inv = fourier(dim_a).matrix.conj().T
        reg_f = apply_operator(reg, f_inv, [SYS2])
        for m in range(dim_a):
            p, post = project(reg_f, SYS2, m)
            if post is None:
                continue
            vec = pair_state(post)
            ent, fid = _pair_figures(vec, dim_a, dim_b, s, m)
            trajectories.append(Trajectory(s, bits, m, prob * p, vec, ent, fid))

    for s, (p_s, reg) in branches.items():
        prob = p_s
        bits: tuple[int, ...] = ()
        for _stage in range(betas[s]):
            reg, unitary = mc_stage(reg)
            unitaries.append(unitary)
            anc = len(reg.dims) - 1
            p0, succ = project(reg, anc, 0)
            p1, fail = project(reg, anc, 1)
            if succ is not None:
                leaves(succ, s, bits + (0,), prob * p0)
            if fail is None:
                break
            prob *= p1
            bits = bits + (1,)
            reg = fail
        else:
            leaves(reg, s, bits, prob)
    return OracleRun({s: p for s, (p, _) in branches.items()}, trajectories, unitaries)


@dataclass
class MonteCarloStats:
    n_samples: int
    success_rate: float
    success_se: float
    e_mean: float
    e_se: float
    f_mean: float
    f_se: float
    e_post: float
    e_post_se: float
    f_post: float
    f_post_se: float


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size == 0:
        return float("nan"), float("nan")
    se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(np.mean(x)), se


def monte_carlo_run(ch: SchmidtChannel, betas: Sequence[int], n_samples: int, seed: int) -> MonteCarloStats:
    """Sample measurement records from the simulated outcome distribution.

    Deterministic for a fixed ``seed`` and ``n_samples``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    run = enumerate_trajectories(ch, betas)
    probs = np.array([t.probability for t in run.trajectories])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(probs), size=n_samples, p=probs)
    succ = np.array([t.success for t in run.trajectories])[picks]
    ent = np.array([t.entanglement for t in run.trajectories])[picks]
    fid = np.array([t.fidelity for t in run.trajectories])[picks]
    rate, rate_se = _mean_se(succ.astype(float))
    e, e_se = _mean_se(ent)
    f, f_se = _mean_se(fid)
    ep, ep_se = _mean_se(ent[succ])
    fp, fp_se = _mean_se(fid[succ])
    return MonteCarloStats(n_samples, rate, rate_se, e, e_se, f, f_se, ep, ep_se, fp, fp_se)
