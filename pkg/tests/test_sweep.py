import math

import pytest

from qswap.sweep import (
    COLUMNS,
    GridSpec,
    SweepConfig,
    averages_map,
    enhancement_probability_map,
    feasible_max,
    fill_template,
    grid_points,
    run_sweep,
    surface_figures,
)

SMALL = dict(c_grid=GridSpec(num=9), d_grid=GridSpec(num=9))
FIGS = ("E", "F", "p_succ_cumulative", "E_avg", "F_avg", "E_avg_postselected", "F_avg_postselected")


def interior(row):
    return row["status"] == "ok" and 0 < row["c0"] and 0 < row["d0"] and row["c0"] < 0.85 and row["d0"] < 0.9


def test_fill_template():
    tpl = ("free", 0.6, "auto")
    assert fill_template(tpl, 0.0) == pytest.approx([0.0, 0.6, 0.8])
    assert fill_template(tpl, 0.9) is None
    assert feasible_max(tpl) == pytest.approx(0.8)


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(c_template=(0.5, 0.5, "auto", "free", 0.1))
    with pytest.raises(ValueError):
        SweepConfig(c_template=("free", 0.2, 0.3, 0.4))
    with pytest.raises(ValueError):
        SweepConfig(strategies=("ud",))


def test_surface_planes():
    rows = surface_figures(SweepConfig(**SMALL))
    mc = [r for r in rows if r["strategy"] == "mc" and interior(r)]
    assert mc
    for r in mc:
        if r["s"] == 1:
            assert r["E"] == pytest.approx(1, abs=1e-12) and r["F"] == pytest.approx(1, abs=1e-12)
        else:
            assert r["F"] == pytest.approx(0.75, abs=1e-12)
    by_key = {(r["c0"], r["d0"], r["s"], r["strategy"]): r for r in rows if r["status"] == "ok"}
    for (c0, d0, s, strat), r in by_key.items():
        if strat == "me":
            plane = by_key[(c0, d0, s, "mc")]
            assert r["E"] <= plane["E"] + 1e-12 and r["F"] <= plane["F"] + 1e-12
    smc = [r for r in rows if r["strategy"] == "smc" and interior(r) and r["s"] == 1]
    assert {r["beta"] for r in smc} == {2, 3}


def test_strategy_filter():
    rows = surface_figures(SweepConfig(strategies=("me",), **SMALL))
    assert {r["strategy"] for r in rows if r["status"] == "ok"} == {"me"}


def test_infeasible_points_flagged():
    cfg = SweepConfig(c_grid=GridSpec(0.0, 1.0, 5), d_grid=GridSpec(num=3))
    rows = averages_map(cfg, "fixed")
    bad = [r for r in rows if r["status"] == "infeasible"]
    assert {r["c0"] for r in bad} == {1.0}
    assert len(list(grid_points(cfg))) == 15


def test_enhancement_zero_at_maximal_entanglement():
    h = 1 / math.sqrt(2)
    cfg = SweepConfig(
        dim_a=2, dim_b=2, c_template=("free", "auto"), d_template=("free", "auto"),
        c_grid=GridSpec(h, h, 1), d_grid=GridSpec(h, h, 1), betas=(1,),
    )
    rows = enhancement_probability_map(cfg)
    assert rows and all(r["p_succ_cumulative"] == 0.0 for r in rows)


def test_enhancement_monotone_in_stages():
    rows = enhancement_probability_map(SweepConfig(**SMALL))
    table = {(r["c0"], r["d0"], r["s"], r["strategy"], r["beta"]): r["p_succ_cumulative"] for r in rows if r["status"] == "ok"}
    for (c0, d0, s, strat, beta), v in table.items():
        if beta == 3:
            assert v >= table[(c0, d0, s, strat, 1)] - 1e-12
        assert 0 <= v <= 1


def test_average_modes():
    cfg = SweepConfig(**SMALL)
    fixed = averages_map(cfg, "fixed")
    adaptive = averages_map(cfg, "adaptive")
    post = averages_map(cfg, "postselected")
    me = {(r["c0"], r["d0"]): r for r in fixed if r["strategy"] == "me"}
    fx = {(r["c0"], r["d0"], r["beta"]): r for r in fixed if r["strategy"] == "smc"}
    for r in adaptive:
        if r["status"] != "ok" or r["strategy"] == "me":
            continue
        key = (r["c0"], r["d0"])
        assert r["E_avg"] >= fx[key + (r["beta"],)]["E_avg"] - 1e-10
        assert r["E_avg"] <= me[key]["E_avg"] + 1e-10
    for r in post:
        if r["status"] == "ok" and r["strategy"] != "me":
            assert r["E_avg_postselected"] >= me[(r["c0"], r["d0"])]["E_avg"] - 1e-10
    with pytest.raises(ValueError):
        averages_map(cfg, "bogus")


def test_postselected_nonincreasing_in_stages():
    rows = averages_map(SweepConfig(**SMALL), "postselected")
    table = {(r["c0"], r["d0"], r["beta"]): r for r in rows if r["strategy"] == "smc_postselected"}
    for (c0, d0, beta), r in table.items():
        if beta > 1:
            prev = table[(c0, d0, beta - 1)]
            assert r["E_avg_postselected"] <= prev["E_avg_postselected"] + 1e-10
            assert r["F_avg_postselected"] <= prev["F_avg_postselected"] + 1e-10


def test_run_sweep_deterministic(tmp_path):
    a = run_sweep(SweepConfig(out_dir=tmp_path / "a", **SMALL))
    b = run_sweep(SweepConfig(out_dir=tmp_path / "b", **SMALL))
    assert set(a) == {"surfaces", "enhancement", "averages_fixed", "averages_adaptive", "averages_postselected"}
    for name in a:
        text = a[name].read_text(encoding="utf-8")
        assert text == b[name].read_text(encoding="utf-8")
        header, *lines = text.splitlines()
        assert header.split(",") == list(COLUMNS)
        for line in lines:
            row = dict(zip(COLUMNS, line.split(",")))
            for k in FIGS:
                if row[k]:
                    assert -1e-12 <= float(row[k]) <= 1 + 1e-12
