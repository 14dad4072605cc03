import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vpmcf.flow import FlowConfig, Mode, run
from vpmcf.harness import presets
from vpmcf.profile import GridSpec, RadialProfile, curvature_fields
from vpmcf.flow import initial_state
from vpmcf.sturm import (Violation, monotonicity_report, neck_convergence, neck_positions,
                         sign_change_count, zero_census)


def test_sign_change_examples():
    assert sign_change_count([1, 0.5, -0.2, -0.1, 0.3]) == 2
    assert sign_change_count([1, 1e-12, -1], tol=1e-9) == 1
    for m in (2, 5, 10):
        assert sign_change_count([(-1) ** i for i in range(m)]) == m - 1
    assert sign_change_count([1, 0, 1]) == 0
    assert sign_change_count([]) == 0
    with pytest.raises(ValueError):
        sign_change_count([1, -1], tol=-1)


finite = st.floats(-10, 10, allow_nan=False)
vectors = arrays(np.float64, st.integers(0, 40), elements=finite)


@given(vectors, arrays(np.float64, 40, elements=st.floats(1e-3, 1e3)))
def test_count_invariant_under_positive_multiplier(vals, weights):
    w = weights[: vals.size]
    assert sign_change_count(vals * w) == sign_change_count(vals)


@given(vectors, st.floats(0, 5), st.floats(0, 5))
def test_count_monotone_in_tol(vals, t1, t2):
    lo, hi = sorted((t1, t2))
    assert sign_change_count(vals, hi) <= sign_change_count(vals, lo)


def _state(grid, rho):
    return initial_state(RadialProfile(grid, rho), FlowConfig())


def test_cylinder_census():
    c = zero_census(_state(GridSpec(0, 1, 32), np.ones(33)))
    assert (c.zeros_d1, c.zeros_d2, c.zeros_H) == (0, 0, 0)
    assert c.necks == []


def test_cosine_census_counts_and_locations():
    grid = GridSpec(0, 1, 400)
    c = zero_census(_state(grid, 1 + 0.5 * np.cos(2 * np.pi * grid.x)))
    assert c.zeros_d1 == 1
    assert c.zeros_d2 == 2
    assert np.allclose(c.zero_locations_d2, [0.25, 0.75], atol=grid.dx)
    assert c.necks == [pytest.approx(0.5)]


@given(st.integers(1, 4), st.floats(0.05, 0.3))
def test_d2_count_matches_k(m, amp):
    grid = GridSpec(0, 1, 200)
    st_ = _state(grid, 1 + amp * np.cos(np.pi * m * grid.x) + 0.3 * amp * np.cos(
        np.pi * (m + 1) * grid.x))
    f = st_.field
    assert zero_census(st_).zeros_d2 == sign_change_count(f.k[1:-1], 1e-8 * np.abs(f.k).max())


def test_neck_positions_use_mirror_at_ends():
    x = np.linspace(0, 1, 9)
    assert neck_positions(x, 1 - 0.1 * np.cos(2 * np.pi * x)) == [0.0, 1.0]
    assert neck_positions(x, np.ones(9)) == []


def test_hysteresis_ignores_single_record_blip():
    from vpmcf.sturm import _confirmed

    assert list(_confirmed([2, 3, 2, 2])) == [2, 2, 2, 2]
    assert list(_confirmed([2, 3, 3, 3])) == [2, 3, 3, 3]
    assert list(_confirmed([1, 1, 2])) == [1, 1, 1]


class _Fake:
    def __init__(self, t, d1, d2, H):
        self.t, self.zeros_d1, self.zeros_d2, self.zeros_H = t, d1, d2, H

    def count(self, name):
        return getattr(self, f"zeros_{name}")


def test_monotonicity_report_flags_persistent_increase():
    cs = [_Fake(0, 1, 2, 0), _Fake(1, 1, 3, 0), _Fake(2, 1, 3, 0)]
    assert monotonicity_report(None, censuses=cs) == [Violation("d2", 1, 2, 3)]


def test_no_violations_on_standard_runs():
    grid = GridSpec(0, 1, 64)
    runs = [
        run(presets.cylinder(grid), FlowConfig(t_end=0.05)),
        run(presets.cylinder(grid), FlowConfig(t_end=1, mode=Mode.PLAIN_MCF)),
    ]
    for traj in runs:
        assert monotonicity_report(traj) == []
    prof = RadialProfile.from_function(GridSpec(0, 1, 128), lambda x: 1 + 0.05 * np.cos(4 * np.pi * x))
    traj = run(prof, FlowConfig(t_end=0.2, output_every=200))
    assert monotonicity_report(traj) == []
    d2 = [zero_census(s).zeros_d2 for s in traj]
    assert d2[0] == 4 and d2[-1] < d2[0]


def test_dumbbell_neck_stays_at_center():
    grid = GridSpec(0, 1, 200)
    traj = run(presets.dumbbell(grid, 0.2, 0.12),
               FlowConfig(t_end=0.05, output_every=500, stop_rho_min=8 * grid.dx))
    tr = neck_convergence(traj)
    assert len(tr.series) == 1
    assert np.allclose(tr.series[0].positions, 0.5, atol=grid.dx)
    assert tr.converged == [True] and tr.lost == []


def test_two_necks_converge():
    grid = GridSpec(0, 1, 200)
    traj = run(presets.perturbed(grid, 1.0, 0.3, (2,)), FlowConfig(t_end=0.02, output_every=100))
    tr = neck_convergence(traj)
    assert len(tr.series) == 2
    assert all(tr.converged)
    assert np.allclose([s.positions[-1] for s in tr.series], [0.25, 0.75], atol=grid.dx)


def test_stationary_neck_tracking():
    grid = GridSpec(0, 1, 32)
    traj = run(presets.cylinder(grid), FlowConfig(t_end=0.01))
    tr = neck_convergence(traj)
    assert tr.series == [] and all(tr.converged)
