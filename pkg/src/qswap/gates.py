"""Dense qudit states and operators.

Composite kets are stored row-major over their ``dims`` signature, so the
amplitude of ``|i_0 i_1 ... >`` sits at ``np.ravel_multi_index(i, dims)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import SetProfile

UNITARY_TOL = 1e-12


def omega(dim: int) -> complex:
    return np.exp(2j * np.pi / dim)


@dataclass(frozen=True, eq=False)
class QuditState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (int(np.prod(self.dims)),):
            raise ValueError(f"amplitude vector of shape {self.amplitudes.shape} does not match dims {self.dims}")

    @classmethod
    def basis(cls, dims: Sequence[int], index: Sequence[int]) -> "QuditState":
        dims = tuple(dims)
        amps = np.zeros(int(np.prod(dims)), dtype=complex)
        amps[np.ravel_multi_index(tuple(index), dims)] = 1.0
        return cls(dims, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "QuditState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def overlap(self, other: "QuditState") -> float:
        """Phase-insensitive |<self|other>|^2."""
        return abs(self.inner(other)) ** 2

    def tensor(self, other: "QuditState") -> "QuditState":
        return QuditState(self.dims + other.dims, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class LocalOperator:
    dim: int
    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.dims:
            object.__setattr__(self, "dims", (self.dim,))

    def is_unitary(self, atol: float = UNITARY_TOL) -> bool:
        return unitarity_error(self.matrix) <= atol

    def apply(self, state: QuditState) -> QuditState:
        return QuditState(state.dims, self.matrix @ state.amplitudes)

    def dagger(self) -> "LocalOperator":
        return LocalOperator(self.dim, self.matrix.conj().T, self.dims)

    def power(self, k: int) -> "LocalOperator":
        mat = self.matrix if k >= 0 else self.matrix.conj().T
        return LocalOperator(self.dim, np.linalg.matrix_power(mat, abs(k)), self.dims)


def unitarity_error(matrix: np.ndarray) -> float:
    """Max-abs entry of U^dagger U - 1."""
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[1]))))


def fourier(dim: int) -> LocalOperator:
    n = np.arange(dim)
    return LocalOperator(dim, np.exp(2j * np.pi * np.outer(n, n) / dim) / np.sqrt(dim))


def phase_op(dim: int, power: int = 1) -> LocalOperator:
    """Z^power with Z|l> = omega^l |l>."""
    return LocalOperator(dim, np.diag(omega(dim) ** (power * np.arange(dim) % dim)))


def shift_op(dim: int, power: int = 1) -> LocalOperator:
    """X^power with X|l> = |l + 1 mod dim>."""
    mat = np.zeros((dim, dim), dtype=complex)
    l = np.arange(dim)
    mat[(l + power) % dim, l] = 1.0
    return LocalOperator(dim, mat)


def hybrid_gxor(dim_control: int, dim_target: int) -> LocalOperator:
    """|m>_C |r>_T -> |m>_C |m - r mod dim_target>_T on the control (x) target space."""
    size = dim_control * dim_target
    mat = np.zeros((size, size), dtype=complex)
    for m in range(dim_control):
        for r in range(dim_target):
            mat[m * dim_target + (m - r) % dim_target, m * dim_target + r] = 1.0
    return LocalOperator(size, mat, (dim_control, dim_target))


def generalized_bell(dim_a: int, l: int, s: int, dim_b: int | None = None) -> QuditState:
    """|Psi_ls> = D_A^{-1/2} sum_q omega^{-ql} |q>_1 |q - s mod D_B>_4."""
    dim_b = dim_a if dim_b is None else dim_b
    w = omega(dim_a)
    amps = np.zeros(dim_a * dim_b, dtype=complex)
    for q in range(dim_a):
        amps[q * dim_b + (q - s) % dim_b] = w ** (-q * l % dim_a)
    return QuditState((dim_a, dim_b), amps / np.sqrt(dim_a))


def bell_basis_matrix(dim_a: int, s: int, dim_b: int | None = None) -> np.ndarray:
    """Columns are |Psi_ls>, l = 0..D_A-1, as amplitude vectors over (D_A, D_B)."""
    return np.column_stack([generalized_bell(dim_a, l, s, dim_b).amplitudes for l in range(dim_a)])


def nu_state(profile: SetProfile, l: int) -> QuditState:
    """|nu_ls> = sum_m Gamma_ms omega^{ml} |m>, i.e. Z^l applied to the fiducial."""
    dim = profile.dim_a
    phases = omega(dim) ** (np.arange(dim) * l % dim)
    return QuditState((dim,), profile.gamma_arr * phases)
