import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from safegame.dynamics import ALL_KINDS, DynamicsSpec, rate_generic
from safegame.game_model import PRESET_EPSILON, PRESETS
from safegame.ode_sim import (
    CSV_HEADER, Trajectory, rk4_step, run_until, simulate_ode, stable_dt,
)
from safegame.policies import PolicySpec, policy_action

TYPE_A = PRESETS["type_a"]
MIXED = DynamicsSpec.mixed()


def test_fixed_point_unchanged():
    dwsc = PolicySpec.dwsc(TYPE_A)
    assert rk4_step(0.0, TYPE_A, MIXED, dwsc, 1e-3) == 0.0


def test_one_step_decreases_under_dwsc():
    dwsc = PolicySpec.dwsc(TYPE_A)
    x1 = rk4_step(0.9, TYPE_A, MIXED, dwsc, 1e-3)
    assert x1 < 0.9
    expected = 1e-3 * rate_generic(MIXED, 0.9, 1.0, TYPE_A)
    # first-order agreement; the rate is large so curvature shows at the 1% level
    assert x1 - 0.9 == pytest.approx(expected, rel=3e-2)


def test_rk4_consistency():
    # (x1 - x0) / dt -> rate linearly in dt
    prop = PolicySpec.proposed(TYPE_A, 9e-4)
    x0 = 0.6
    f = rate_generic(MIXED, x0, policy_action(prop, x0), TYPE_A)
    errs = [abs((rk4_step(x0, TYPE_A, MIXED, prop, dt) - x0) / dt - f)
            for dt in (1e-4, 5e-5, 2.5e-5)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.05)


def test_rk4_local_error_small():
    prop = PolicySpec.proposed(TYPE_A, 9e-4)
    x1 = rk4_step(0.6, TYPE_A, MIXED, prop, 1e-3)
    fine = simulate_ode(TYPE_A, MIXED, prop, 0.6, dt=1e-5, steps=100).final["pi_h"]
    assert abs(x1 - fine) < 1e-9


def test_dwsc_converges_to_defection():
    traj = simulate_ode(TYPE_A, MIXED, PolicySpec.dwsc(TYPE_A), 0.9)
    assert traj.final["pi_h"] < 1e-3
    assert traj.final["exp_risk"] == pytest.approx(0.00109, abs=1e-6)
    assert np.all(np.diff(traj.pi_h) <= 0)


def test_proposed_reaches_target():
    prop = PolicySpec.proposed(TYPE_A, 9e-4, 1.0)
    traj = simulate_ode(TYPE_A, MIXED, prop, 0.9)
    assert abs(traj.final["pi_h"] - 1.0) < 1e-3
    assert abs(traj.final["pi_a"] - TYPE_A.msne) < 1e-3


def test_msne_policy_freezes_state():
    for spec in ALL_KINDS:
        traj = simulate_ode(TYPE_A, spec, PolicySpec.msne(TYPE_A), 0.37, steps=1000)
        assert np.allclose(traj.pi_h, 0.37, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.sampled_from(sorted(PRESETS)),
       st.sampled_from(ALL_KINDS), st.sampled_from(["dwsc", "msne", "proposed"]))
def test_state_stays_in_unit_interval(x0, name, spec, kind):
    t = PRESETS[name]
    pol = {"dwsc": PolicySpec.dwsc, "msne": PolicySpec.msne,
           "proposed": lambda tb: PolicySpec.proposed(tb, PRESET_EPSILON[name])}[kind](t)
    traj = simulate_ode(t, spec, pol, x0, dt=1e-2, steps=2000)
    assert np.all((traj.pi_h >= 0) & (traj.pi_h <= 1))
    assert traj.meta["clamp_count"] == 0


def test_stiff_case_clamps_are_counted():
    # a vacuous tolerance on Type B puts pi_a at 0 where alpha is ~264; at
    # dt = 1e-2 BNN then overshoots and the clamp keeps the state a probability
    t = PRESETS["type_b"]
    prop = PolicySpec.proposed(t, 2e-3)
    traj = simulate_ode(t, DynamicsSpec.bnn(), prop, 0.0, dt=1e-2, steps=2000)
    assert traj.meta["clamp_count"] > 0
    assert np.all((traj.pi_h >= 0) & (traj.pi_h <= 1))
    fine = simulate_ode(t, DynamicsSpec.bnn(), prop, 0.0, dt=1e-3, steps=20000)
    assert fine.meta["clamp_count"] == 0


def test_step_size_robustness():
    prop = PolicySpec.proposed(TYPE_A, 9e-4)
    a = simulate_ode(TYPE_A, MIXED, prop, 0.9, dt=1e-3, steps=20_000)
    b = simulate_ode(TYPE_A, MIXED, prop, 0.9, dt=5e-4, steps=40_000)
    assert abs(a.final["pi_h"] - b.final["pi_h"]) < 1e-8


def test_trajectory_columns_recompute(tmp_path):
    prop = PolicySpec.proposed(TYPE_A, 9e-4)
    traj = simulate_ode(TYPE_A, MIXED, prop, 0.9, steps=500)
    path = traj.to_csv(tmp_path / "t.csv", stride=7)
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = Trajectory.read_csv(path)
    assert back.t[-1] == pytest.approx(traj.t[-1])
    from safegame.game_model import expected_risk, expected_total_reward
    np.testing.assert_allclose(back.exp_risk, expected_risk(back.pi_h, back.pi_a, TYPE_A),
                               rtol=0, atol=1e-12)
    np.testing.assert_allclose(back.exp_reward,
                               expected_total_reward(back.pi_h, back.pi_a, TYPE_A),
                               rtol=0, atol=1e-9)


def test_invalid_inputs():
    dwsc = PolicySpec.dwsc(TYPE_A)
    with pytest.raises(ValueError):
        simulate_ode(TYPE_A, MIXED, dwsc, 1.2)
    with pytest.raises(ValueError):
        simulate_ode(TYPE_A, MIXED, dwsc, 0.5, dt=0.0)
    with pytest.raises(ValueError):
        simulate_ode(TYPE_A, MIXED, dwsc, 0.5, steps=0)


def test_run_until_stops_when_done():
    prop = PolicySpec.proposed(TYPE_A, 9e-4)
    res = run_until(TYPE_A, MIXED, prop, 0.2, lambda h, a: abs(h - 1.0) < 1e-3)
    assert res.converged
    assert res.dt == stable_dt(TYPE_A, MIXED, prop)
