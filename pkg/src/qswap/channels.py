"""Schmidt-coefficient description of the two input channels.

Alice holds ``sum_m c_m |m>_1 |m>_2`` and Bob holds ``sum_r d_r |r>_3 |r>_4``.
Everything the swapping protocol needs (outcome probabilities of the
measurement on system 3, the fiducial coefficients of each symmetric set)
follows from ``c`` and ``d`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionOrderError,
    IndexOutOfRangeError,
    LengthMismatchError,
    NegativeCoefficientError,
    NonNormalizedError,
    ZeroProbabilitySetError,
)

# Gamma values below this are exact zeros (support, multiplicities, Gram det).
ZERO_TOL = 1e-12
# Relative tolerance on Gamma^2 when grouping degenerate values.
DEGENERACY_RTOL = 1e-9
NORM_TOL = 1e-12


@dataclass(frozen=True)
class SchmidtChannel:
    dim_a: int
    dim_b: int
    c: tuple[float, ...]
    d: tuple[float, ...]

    @property
    def c_arr(self) -> np.ndarray:
        return np.asarray(self.c, dtype=float)

    @property
    def d_arr(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)


@dataclass(frozen=True)
class SetProfile:
    """Fiducial coefficients of the symmetric set selected by outcome ``s``."""

    s: int
    p_s: float
    gamma: tuple[float, ...]
    support: tuple[int, ...]
    support_size: int
    distinct_values: int
    multiplicities: tuple[int, ...]

    @property
    def dim_a(self) -> int:
        return len(self.gamma)

    @property
    def gamma_arr(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)


def _check_coeffs(name: str, values: Sequence[float], dim: int, renormalize: bool) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size != dim:
        raise LengthMismatchError(f"{name} has {arr.size} entries, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise LengthMismatchError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        raise NegativeCoefficientError(f"{name} has negative entries: {arr.tolist()}")
    norm_sq = float(np.sum(arr**2))
    if renormalize:
        if norm_sq == 0.0:
            raise NonNormalizedError(f"{name} is identically zero")
        arr = arr / math.sqrt(norm_sq)
    elif abs(norm_sq - 1.0) > NORM_TOL:
        raise NonNormalizedError(f"sum of {name}^2 = {norm_sq!r}, expected 1")
    return tuple(float(v) for v in arr)


def make_channel(
    dim_a: int,
    dim_b: int,
    c: Sequence[float],
    d: Sequence[float],
    *,
    renormalize: bool = False,
) -> SchmidtChannel:
    """Validated constructor. Normalization is checked, never silently repaired
    unless ``renormalize`` is set."""
    if int(dim_a) != dim_a or int(dim_b) != dim_b:
        raise LengthMismatchError("dimensions must be integers")
    dim_a, dim_b = int(dim_a), int(dim_b)
    if dim_a < 2:
        raise DimensionOrderError(f"dim_a must be >= 2, got {dim_a}")
    if dim_b < dim_a:
        raise DimensionOrderError(f"dim_b={dim_b} < dim_a={dim_a} is not supported")
    return SchmidtChannel(
        dim_a,
        dim_b,
        _check_coeffs("c", c, dim_a, renormalize),
        _check_coeffs("d", d, dim_b, renormalize),
    )


def maximally_entangled(dim_a: int, dim_b: int | None = None) -> SchmidtChannel:
    dim_b = dim_a if dim_b is None else dim_b
    return make_channel(dim_a, dim_b, [dim_a**-0.5] * dim_a, [dim_b**-0.5] * dim_b)


def _joint_amplitudes(ch: SchmidtChannel, s: int) -> np.ndarray:
    # c_q * d_{(q - s) mod D_B}
    q = np.arange(ch.dim_a)
    return ch.c_arr * ch.d_arr[(q - s) % ch.dim_b]


def _check_index(ch: SchmidtChannel, s: int) -> None:
    if not 0 <= s < ch.dim_b:
        raise IndexOutOfRangeError(f"s={s} outside 0..{ch.dim_b - 1}")


def outcome_probability(ch: SchmidtChannel, s: int) -> float:
    _check_index(ch, s)
    return float(np.sum(_joint_amplitudes(ch, s) ** 2))


def outcome_probabilities(ch: SchmidtChannel) -> np.ndarray:
    return np.array([outcome_probability(ch, s) for s in range(ch.dim_b)])


def group_degenerate(values: Sequence[float], rtol: float = DEGENERACY_RTOL) -> list[tuple[float, int]]:
    """Group positive values into ascending ``(representative, multiplicity)``
    classes; neighbours within ``rtol`` of the class minimum are merged."""
    classes: list[list[float]] = []
    for v in sorted(values):
        if classes and v - classes[-1][0] <= rtol * max(abs(classes[-1][0]), abs(v)):
            classes[-1].append(v)
        else:
            classes.append([v])
    return [(cls[0], len(cls)) for cls in classes]


def profile_from_gamma(gamma: Sequence[float], s: int = 0, p_s: float = 1.0) -> SetProfile:
    """Build a profile from fiducial coefficients directly.

    Entries below ``ZERO_TOL`` are snapped to zero.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise NegativeCoefficientError("fiducial coefficients must be nonnegative")
    g = np.where(g < ZERO_TOL, 0.0, g)
    norm_sq = float(np.sum(g**2))
    if abs(norm_sq - 1.0) > NORM_TOL:
        raise NonNormalizedError(f"sum of Gamma^2 = {norm_sq!r}, expected 1")
    support = tuple(int(v > 0.0) for v in g)
    classes = group_degenerate([float(v) ** 2 for v in g if v > 0.0])
    return SetProfile(
        s=s,
        p_s=float(p_s),
        gamma=tuple(float(v) for v in g),
        support=support,
        support_size=sum(support),
        distinct_values=len(classes),
        multiplicities=tuple(mult for _, mult in classes),
    )


def profile_from_gamma_sq(gamma_sq: Sequence[float], s: int = 0, p_s: float = 1.0) -> SetProfile:
    return profile_from_gamma(np.sqrt(np.clip(np.asarray(gamma_sq, dtype=float), 0.0, None)), s, p_s)


def set_profile(ch: SchmidtChannel, s: int) -> SetProfile:
    p_s = outcome_probability(ch, s)
    if p_s <= 0.0:
        raise ZeroProbabilitySetError(f"outcome s={s} has zero probability")
    gamma = _joint_amplitudes(ch, s) / math.sqrt(p_s)
    # Renormalize after the zero cutoff so the sum rule holds to rounding.
    gamma = np.where(gamma < ZERO_TOL, 0.0, gamma)
    gamma = gamma / math.sqrt(float(np.sum(gamma**2)))
    return profile_from_gamma(gamma, s, p_s)


def occurring_profiles(ch: SchmidtChannel) -> list[SetProfile]:
    """Profiles of every outcome s that can occur (p_s > 0), in order of s."""
    return [set_profile(ch, s) for s in range(ch.dim_b) if outcome_probability(ch, s) > 0.0]


def reduce_effective(ch: SchmidtChannel) -> SchmidtChannel:
    """Drop vanishing Schmidt directions on both sides and reindex.

    Models a swapping gate that acts only on the effective subspace spanned by
    the nonzero Schmidt vectors.
    """
    c = [v for v in ch.c if v >= ZERO_TOL]
    d = [v for v in ch.d if v >= ZERO_TOL]
    if len(c) < 2:
        raise DimensionOrderError("effective Alice dimension would drop below 2")
    return make_channel(len(c), len(d), c, d, renormalize=True)
