import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import unit_grid
from safegame.dynamics import ALL_KINDS, DynamicsSpec, alpha, rate, rate_generic
from safegame.game_model import PRESETS
from safegame.policies import admissible_set

TYPE_A = PRESETS["type_a"]
unit = st.floats(0.0, 1.0)


def test_alpha_values():
    L = TYPE_A.msne
    assert alpha(L, TYPE_A) == pytest.approx(0.0, abs=1e-12)
    assert alpha(1.0, TYPE_A) == pytest.approx(-31.29, abs=1e-10)
    assert alpha(0.0, TYPE_A) == pytest.approx(87.16, abs=1e-10)


@given(unit)
def test_alpha_sign_matches_threshold(a):
    for t in PRESETS.values():
        if a > t.msne:
            assert alpha(a, t) < 0
        elif a < t.msne:
            assert alpha(a, t) > 0


@pytest.mark.parametrize("spec", ALL_KINDS, ids=lambda s: s.label)
def test_closed_form_matches_generic(table, spec):
    H, A = unit_grid(50)
    np.testing.assert_allclose(rate(spec, H, A, table), rate_generic(spec, H, A, table),
                               rtol=0, atol=1e-12)


@given(unit, unit, st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_closed_form_matches_generic_random_weights(h, a, wr, wb, ws):
    if wr + wb + ws == 0:
        return
    s = wr + wb + ws
    spec = DynamicsSpec.mixed(wr / s, wb / s, ws / s)
    for t in PRESETS.values():
        assert rate(spec, h, a, t) == pytest.approx(rate_generic(spec, h, a, t), abs=1e-12)


def test_replicator_boundaries():
    spec = DynamicsSpec.replicator()
    for a in np.linspace(0, 1, 11):
        assert rate(spec, 0.0, a, TYPE_A) == 0.0
        assert rate(spec, 1.0, a, TYPE_A) == 0.0


def test_mixed_value():
    assert rate(DynamicsSpec.mixed(), 0.5, 1.0, TYPE_A) == pytest.approx(-10.43, abs=1e-10)


def test_smith_zero_at_threshold():
    spec = DynamicsSpec.smith()
    for h in np.linspace(0, 1, 11):
        assert rate(spec, h, TYPE_A.msne, TYPE_A) == 0.0


@given(unit, unit)
def test_rate_keeps_state_in_unit_interval(h, a):
    for t in PRESETS.values():
        for spec in ALL_KINDS:
            r = rate(spec, h, a, t)
            if h == 0.0:
                assert r >= 0.0
            if h == 1.0:
                assert r <= 0.0


@given(unit, unit)
def test_rate_sign_follows_alpha(h, a):
    for t in PRESETS.values():
        for spec in ALL_KINDS:
            r = rate(spec, h, a, t)
            assert r * alpha(a, t) >= 0.0


def test_mixed_zero_iff_admissible(table):
    # exact zero test on a 100x100 grid including the threshold line
    axis = np.unique(np.concatenate([np.linspace(0, 1, 100), [table.msne]]))
    H, A = np.meshgrid(axis, axis, indexing="ij")
    adm = admissible_set(table)
    zero = rate(DynamicsSpec.mixed(), H, A, table) == 0.0
    member = np.vectorize(adm.contains)(H, A)
    assert np.array_equal(zero, member)


def test_pure_replicator_zero_set_is_larger(table):
    # interior points off the threshold line are never zeros, but the
    # replicator also vanishes on the full edges pi_h in {0, 1}
    adm = admissible_set(table)
    spec = DynamicsSpec.replicator()
    for a in np.linspace(0, 1, 21):
        for h in (0.0, 1.0):
            assert rate(spec, h, a, table) == 0.0
        if adm.contains(0.0, a):
            assert rate(spec, 0.0, a, table) == 0.0


def test_bad_weights_rejected():
    with pytest.raises(ValueError):
        DynamicsSpec.mixed(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        DynamicsSpec.mixed(-0.1, 0.6, 0.5)
