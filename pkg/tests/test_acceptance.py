"""Acceptance criteria 1-9, each at its stated tolerance.

Every test carries ``@pytest.mark.criterion(n)``; the conftest hook prints one
PASS/FAIL line per criterion at the end of the run. Standalone use:

    python3 tests/test_acceptance.py
"""

import math
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from conftest import channels, sweep_channel, gamma_profiles
from qswap import discrimination as disc
from qswap import oracle
from qswap.channels import make_channel, maximally_entangled, profile_from_gamma, profile_from_gamma_sq, set_profile
from qswap.gates import fourier, hybrid_gxor, phase_op, shift_op, unitarity_error
from qswap.protocol import (
    Objective,
    StagePolicy,
    adaptive_stage_policy,
    analyze_channel,
    average_me,
    average_smc,
    enhancement_probability,
    mc_swap,
    me_swap,
    postselected_average,
    strategy_tree,
    success_probability,
)
from qswap.sweep import SweepConfig, grid_points
from qswap.verify import CheckConfig, CheckReport, check_channel, monte_carlo_check, run_oracle_check


# -- 1. oracle equivalence ------------------------------------------------------


@pytest.mark.criterion(1)
def test_oracle_equivalence_seeded_100_channels():
    cfg = CheckConfig(n_channels=100, seed=42, dims_a=(2, 3, 4), dim_b_max=5, tolerance=1e-9)
    report = run_oracle_check(cfg)
    assert report.n_channels == 100
    assert report.passed, report.format()


@pytest.mark.criterion(1)
@settings(max_examples=40, deadline=None)
@given(channels())
def test_oracle_equivalence_property(ch):
    report = CheckReport(tolerance=1e-9)
    check_channel(ch, report)
    assert report.passed, report.format()


# -- 2. trivial limit -----------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_maximally_entangled_is_perfect(dim):
    ch = maximally_entangled(dim)
    for policy in (StagePolicy.me_only(ch), StagePolicy.fixed(ch, 1), StagePolicy.full(ch)):
        tree = strategy_tree(ch, policy)
        assert all(o.success for o in tree)
        for o in tree:
            assert abs(o.entanglement - 1) <= 1e-12 and abs(o.fidelity - 1) <= 1e-12
        assert abs(success_probability(ch, policy) - 1) <= 1e-12
    for s in range(dim):
        for m in range(dim):
            assert abs(me_swap(ch, s, m).fidelity - 1) <= 1e-12
            assert abs(mc_swap(ch, s, m).entanglement - 1) <= 1e-12
    for sa in analyze_channel(ch).sets.values():
        assert abs(sa.p_stages[0] - 1) <= 1e-12
    # the simulated circuit agrees
    for t in oracle.enumerate_trajectories(ch, (1,) * dim).trajectories:
        assert t.success and abs(t.entanglement - 1) <= 1e-12 and abs(t.fidelity - 1) <= 1e-12


# -- 3. MC plane values on the sweep channel ------------------------------------


@pytest.mark.criterion(3)
@pytest.mark.parametrize("c0,d0", [(0.5, 0.5), (0.2, 0.7), (0.8, 0.1), (0.05, 0.9)])
def test_mc_planes_interior(c0, d0):
    ch = sweep_channel(c0, d0)
    for s in range(5):
        for m in range(4):
            o = mc_swap(ch, s, m)
            if s == 1:
                assert abs(o.fidelity - 1) <= 1e-12 and abs(o.entanglement - 1) <= 1e-12
            else:
                assert abs(o.fidelity - 0.75) <= 1e-12 and abs(o.entanglement - 8 / 9) <= 1e-12


@pytest.mark.criterion(3)
def test_me_surfaces_below_planes_full_grid():
    worst = -np.inf
    for _, _, ch in grid_points(SweepConfig()):
        if ch is None:
            continue
        for s, sa in analyze_channel(ch).sets.items():
            plane_e, plane_f = (1.0, 1.0) if s == 1 else (8 / 9, 0.75)
            worst = max(worst, sa.me_e - sa.stage_e[0], sa.me_f - sa.stage_f[0])
            worst = max(worst, sa.me_e - plane_e, sa.me_f - plane_f)
    assert worst <= 1e-12


# -- 4. dominance ---------------------------------------------------------------


@pytest.mark.criterion(4)
@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(channels())
def test_mc_dominates_me(ch):
    for s in analyze_channel(ch).sets:
        for m in range(ch.dim_a):
            me, mc = me_swap(ch, s, m), mc_swap(ch, s, m)
            assert me.entanglement <= mc.entanglement + 1e-12
            assert me.fidelity <= mc.fidelity + 1e-12


# -- 5. Gram consistency --------------------------------------------------------


@pytest.mark.criterion(5)
@settings(max_examples=300, deadline=None)
@given(gamma_profiles())
def test_gram_determinant_closed_form(gamma):
    prof = profile_from_gamma(gamma)
    direct = float(np.linalg.det(disc.gram_matrix(prof)).real)
    assert abs(disc.gram_determinant(prof) - direct) <= 1e-10


@pytest.mark.criterion(5)
def test_gram_single_null_coefficient():
    ch = make_channel(2, 3, [math.sqrt(0.6), math.sqrt(0.4)], [math.sqrt(0.5), math.sqrt(0.5), 0.0])
    dets = [disc.gram_determinant(set_profile(ch, s)) for s in range(3)]
    assert dets[0] > 1e-3
    assert dets[1] == 0.0 and dets[2] == 0.0
    for s in range(3):
        direct = float(np.linalg.det(disc.gram_matrix(set_profile(ch, s))).real)
        assert abs(direct - dets[s]) <= 1e-10


# -- 6. SMC worked recursion ----------------------------------------------------


@pytest.mark.criterion(6)
def test_smc_worked_recursion():
    chain = disc.stage_chain(profile_from_gamma_sq([0.5, 0.3, 0.2]))
    p = [st.p_succ_next for st in chain]
    assert len(p) == 2
    assert abs(p[0] - 0.6) <= 1e-12 and abs(p[1] - 0.5) <= 1e-12
    assert np.max(np.abs(chain[1].gamma_arr ** 2 - [0.75, 0.25, 0.0])) <= 1e-12
    final = disc.terminal_residual(chain, 2)
    assert np.max(np.abs(final.gamma_arr ** 2 - [1.0, 0.0, 0.0])) <= 1e-12
    assert abs(disc.smc_cumulative_success(p, 2) - 0.8) <= 1e-12


# -- 7. averages on the sweep grid ----------------------------------------------


@pytest.mark.criterion(7)
def test_average_orderings_sweep_grid():
    tol = 1e-10
    bad = []
    n_points = 0
    for c0, d0, ch in grid_points(SweepConfig()):
        if ch is None:
            continue
        n_points += 1
        e_me, f_me = average_me(ch)
        prev_enh = (0.0, 0.0)
        for beta in (1, 2, 3):
            e_fix, f_fix = average_smc(ch, StagePolicy.fixed(ch, beta))
            pol_e = adaptive_stage_policy(ch, Objective.max_avg_e(), beta)
            pol_f = adaptive_stage_policy(ch, Objective.max_avg_f(), beta)
            e_ad = average_smc(ch, pol_e)[0]
            f_ad = average_smc(ch, pol_f)[1]
            e_post = postselected_average(ch, pol_e)[0]
            f_post = postselected_average(ch, pol_f)[1]
            enh = (enhancement_probability(ch, beta, "e")[0], enhancement_probability(ch, beta, "f")[0])
            checks = {
                "fixed E <= ME": e_fix <= e_me + tol,
                "fixed F <= ME": f_fix <= f_me + tol,
                "adaptive E >= fixed": e_ad >= e_fix - tol,
                "adaptive F >= fixed": f_ad >= f_fix - tol,
                "postselected E >= ME": e_post >= e_me - tol,
                "postselected F >= ME": f_post >= f_me - tol,
                "enhancement E nondecreasing": enh[0] >= prev_enh[0] - tol,
                "enhancement F nondecreasing": enh[1] >= prev_enh[1] - tol,
            }
            bad += [(name, c0, d0, beta) for name, ok in checks.items() if not ok]
            prev_enh = enh
    assert n_points > 5000
    assert not bad, bad[:10]


# -- 8. Monte Carlo -------------------------------------------------------------


@pytest.mark.criterion(8)
def test_monte_carlo_worked_example():
    rep = monte_carlo_check(n_samples=100_000, seed=42)
    assert rep.passed, rep.format()
    assert abs(rep.rows[0][2] - 0.8) <= 1e-12
    again = monte_carlo_check(n_samples=100_000, seed=42)
    assert again.rows == rep.rows


@pytest.mark.criterion(8)
def test_monte_carlo_sweep_channel():
    ch = sweep_channel(0.5, 0.5)
    rep = monte_carlo_check(ch, beta_max=3, n_samples=100_000, seed=7)
    assert rep.passed, rep.format()


# -- 9. unitarity ---------------------------------------------------------------


@pytest.mark.criterion(9)
def test_fixed_gates_unitary():
    for dim in range(1, 9):
        for op in (fourier(dim), phase_op(dim), shift_op(dim)):
            assert unitarity_error(op.matrix) <= 1e-12
        for dt in range(1, 9):
            assert unitarity_error(hybrid_gxor(dim, dt).matrix) <= 1e-12


@pytest.mark.criterion(9)
@settings(max_examples=200, deadline=None)
@given(gamma_profiles())
def test_embedded_stage_unitaries(gamma):
    for stage in disc.stage_chain(profile_from_gamma(gamma)):
        u = disc.embed_mc_unitary(disc.mc_operators(stage))
        assert unitarity_error(u.matrix) <= 1e-12


@pytest.mark.criterion(9)
def test_oracle_stage_unitaries():
    ch = sweep_channel(0.5, 0.5)
    run = oracle.enumerate_trajectories(ch, StagePolicy.full(ch).betas)
    assert len(run.unitaries) >= 11
    assert max(unitarity_error(u.matrix) for u in run.unitaries) <= 1e-12


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
