import csv
import math

import numpy as np
import pytest

from safegame import experiments as ex
from safegame.game_model import PRESETS, expected_risk, expected_total_reward
from safegame.policies import InfeasibleTolerance, optimal_strategy

MINIMAL = """
[experiment]
kind = trajectory
[table]
preset = type_a
[dynamics]
kinds = mixed
[policy]
kinds = proposed
epsilon = 9e-4
[sim]
pi_h_0 = 0.9
steps = 2000
"""


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def cfg_from(text, tmp_path, **kw):
    return ex.config_from_string(text, out=tmp_path, **kw)


def test_minimal_config_writes_one_csv(tmp_path):
    rep = ex.run(cfg_from(MINIMAL, tmp_path))
    trajs = [p for p in rep.files if p.name.startswith("traj_")]
    assert len(trajs) == 1
    assert (tmp_path / "summary.csv").exists()


def test_fig3_preset_risks(tmp_path):
    cfg = ex.load_config("configs/type_a_trajectory.ini", out=tmp_path)
    rep = ex.run(cfg)
    assert rep.ok
    rows = {(r["policy"], r["dynamics"]): r for r in rep.rows}
    dwsc = rows[("dwsc", "mixed")]
    prop = rows[("proposed", "mixed")]
    assert dwsc["exp_risk"] == pytest.approx(0.00109, abs=1e-6)
    assert prop["exp_risk"] == pytest.approx(8.62e-4, abs=1e-6)
    assert dwsc["exp_risk"] > prop["exp_risk"]
    assert len([p for p in rep.files if p.name.startswith("traj_")]) == 12


def test_rows_recompute_from_table(tmp_path):
    rep = ex.run(cfg_from(MINIMAL, tmp_path))
    t = PRESETS["type_a"]
    for row in read(tmp_path / "traj_proposed_mixed.csv"):
        h, a = float(row["pi_h"]), float(row["pi_a"])
        assert float(row["exp_risk"]) == pytest.approx(expected_risk(h, a, t), abs=1e-12)
        assert float(row["exp_reward"]) == pytest.approx(expected_total_reward(h, a, t),
                                                         abs=1e-12)
    assert rep.ok


def test_byte_identical_reruns(tmp_path):
    text = MINIMAL.replace("kinds = proposed", "kinds = dwsc, proposed") + "simulator = mc\nseeds = 0-2\nn = 200\n"
    for sub in ("a", "b"):
        ex.run(cfg_from(text, tmp_path / sub))
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "traj_dwsc_mixed_mean.csv" in names
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_override_changes_mc(tmp_path):
    text = MINIMAL + "simulator = mc\nn = 200\nseeds = 0\n"
    a = ex.run(cfg_from(text, tmp_path / "a"))
    b = ex.run(cfg_from(text, tmp_path / "b", seed=5))
    assert b.rows[0]["seed"] == 5
    assert a.rows[0]["final_pi_h"] != b.rows[0]["final_pi_h"]


def test_risk_map_corners(tmp_path):
    text = "[experiment]\nkind = risk_map\ngrid = 2\n[table]\npreset = type_a\n"
    rep = ex.run(cfg_from(text, tmp_path))
    t = PRESETS["type_a"]
    grid = {(r["pi_h"], r["pi_a"]): r for r in rep.rows if r["kind"] == "grid"}
    assert len(grid) == 4
    assert grid[(1.0, 1.0)]["exp_risk"] == t.w_cc
    assert grid[(0.0, 0.0)]["exp_risk"] == t.w_dd
    assert grid[(1.0, 0.0)]["exp_reward"] == pytest.approx(t.r_cd + t.r_dc)
    kinds = {r["kind"] for r in rep.rows}
    assert {"admissible", "dwsc", "msne"} <= kinds


def test_risk_map_type_a_minimum_near_target():
    rows = ex.risk_map_rows(PRESETS["type_a"], 101, 9e-4)
    grid = [r for r in rows if r["kind"] == "grid"]
    best = min(grid, key=lambda r: r["exp_risk"])
    # global risk minimum over the square sits on pi_h = 1; the admissible
    # minimum (1, L) is on the same edge
    assert best["pi_h"] == 1.0
    overlay = {r["kind"] for r in rows}
    assert {"feasible", "optimum"} <= overlay


def test_risk_map_type_d_offdiagonal_minimum():
    rows = ex.risk_map_rows(PRESETS["type_d"], 101, None)
    best = min((r for r in rows if r["kind"] == "grid"), key=lambda r: r["exp_risk"])
    assert (best["pi_h"], best["pi_a"]) in [(1.0, 0.0), (0.0, 1.0)]


def test_risk_map_grid_too_small(tmp_path):
    with pytest.raises(ex.ConfigError, match="grid"):
        cfg_from("[experiment]\nkind = risk_map\ngrid = 1\n[table]\npreset = type_a\n", tmp_path)


def test_pareto_type_b(tmp_path):
    eps = ", ".join(f"{e:.6g}" for e in np.linspace(1.3e-3, 1.8e-3, 11))
    text = f"[experiment]\nkind = pareto\nepsilons = {eps}\n[table]\npreset = type_b\n"
    rep = ex.run(cfg_from(text, tmp_path))
    assert rep.checks == {"reward_nondecreasing": True, "risk_within_epsilon": True}
    assert all(r["exp_risk"] <= r["epsilon"] for r in rep.rows if r["status"] == "ok")


def test_pareto_vacuous_tolerance_matches_admissible_optimum():
    t = PRESETS["type_c"]
    rows = ex.pareto_rows(t, [t.w_dd + 1e-6])
    opt = optimal_strategy(t, 0.999)
    assert rows[0]["exp_reward"] == pytest.approx(opt.reward)


def test_pareto_infeasible_rows():
    rows = ex.pareto_rows(PRESETS["type_a"], [1e-6, 9e-4])
    assert rows[0]["status"] == "infeasible" and math.isnan(rows[0]["exp_reward"])
    with pytest.raises(InfeasibleTolerance):
        optimal_strategy(PRESETS["type_a"], 1e-6)
    assert rows[1]["status"] == "ok"


def test_pareto_needs_epsilons(tmp_path):
    with pytest.raises(ex.ConfigError, match="epsilons"):
        cfg_from("[experiment]\nkind = pareto\n[table]\npreset = type_b\n", tmp_path)


def test_robustness_ode_converges(tmp_path):
    text = """
[experiment]
kind = robustness
[table]
preset = type_b
[dynamics]
kinds = mixed
[policy]
kinds = proposed
epsilon = 1.4e-3
[sim]
pi_h_0 = 0.1, 0.3, 0.5, 0.7, 0.9
"""
    rep = ex.run(cfg_from(text, tmp_path))
    assert rep.ok
    assert all(r["dist_to_target"] < 1e-3 for r in rep.rows)


def test_robustness_single_row(tmp_path):
    text = MINIMAL.replace("kind = trajectory", "kind = robustness")
    rep = ex.run(cfg_from(text, tmp_path))
    assert len(rep.rows) == 1


def test_robustness_mc_spread(tmp_path):
    text = """
[experiment]
kind = robustness
[table]
preset = type_b
[dynamics]
kinds = mixed
[policy]
kinds = proposed
epsilon = 1.4e-3
[sim]
simulator = mc
n = 1000
seeds = 0-7
pi_h_0 = 0.5
"""
    rep = ex.run(cfg_from(text, tmp_path))
    assert rep.checks["endpoint_spread_below_0.05"]
    assert rep.checks["proposed_within_epsilon"]


def test_policy_report(tmp_path):
    rep = ex.run(ex.load_config("configs/type_c_policy.ini", out=tmp_path))
    assert rep.ok
    summary = rep.rows[0]
    assert summary["interaction_type"] == "C"
    assert (tmp_path / "policy.json").exists()


@pytest.mark.parametrize("text,match", [
    ("[table]\npreset = type_z\n", "unknown table preset"),
    ("[table]\nr_cc = 1\n", "missing"),
    ("[experiment]\nkind = movie\n[table]\npreset = type_a\n", "kind"),
    ("[table]\npreset = type_a\n[policy]\nkinds = greedy\n", "unknown policy"),
    ("[table]\npreset = type_a\n[policy]\nkinds = proposed\n", "epsilon"),
    ("[table]\npreset = type_a\n[dynamics]\nkinds = logit\n", "dynamics"),
    ("[table]\npreset = type_a\n[dynamics]\nweights = 1, 2\n", "weights"),
    ("[table]\npreset = type_a\n[policy]\nkinds = dwsc\n[sim]\npi_h_0 = 1.5\n", "pi_h_0"),
    ("[table]\npreset = type_a\n[policy]\nkinds = dwsc\n[sim]\nsimulator = sde\n", "simulator"),
])
def test_config_errors(text, match, tmp_path):
    with pytest.raises(ex.ConfigError, match=match):
        cfg_from(text, tmp_path)


def test_inline_table_and_fractions(tmp_path):
    text = """
[table]
r_cc = 65.51
r_cd = 17.93
r_dc = 96.8
r_dd = -69.23
w_cc = 0.00078
w_cd = 0.00109
w_dd = 0.00147
[dynamics]
kinds = mixed
weights = 1/2, 1/4, 1/4
[policy]
kinds = dwsc
[sim]
seeds = 3-5
"""
    cfg = cfg_from(text, tmp_path)
    assert cfg.table == PRESETS["type_a"]
    assert cfg.dynamics[0].weights == (0.5, 0.25, 0.25)
    assert cfg.seeds == [3, 4, 5]


def test_distance_to_admissible():
    t = PRESETS["type_a"]
    assert ex.distance_to_admissible(t, 0.0, 1.0) == 0.0
    assert ex.distance_to_admissible(t, 0.5, t.msne) == 0.0
    assert ex.distance_to_admissible(t, 0.5, 1.0) == pytest.approx(min(0.5, 1.0 - t.msne))
