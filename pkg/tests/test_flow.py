import numpy as np
import pytest

from vpmcf.flow import (FlowConfig, Mode, Status, adaptive_dt, initial_state, run,
                        stage_derivative, step)
from vpmcf.harness import presets
from vpmcf.profile import GridSpec, RadialProfile, enclosed_volume, surface_area


def cyl(N=64, r=1.0, n=2):
    return presets.cylinder(GridSpec(0.0, 1.0, N, n), r)


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(t_end=0)
    with pytest.raises(ValueError):
        FlowConfig(dt_safety=1.5)
    with pytest.raises(ValueError):
        FlowConfig(output_every=0)
    with pytest.raises(ValueError):
        FlowConfig(record_rho_factor=1.0)
    assert FlowConfig(mode="plain_mcf").mode is Mode.PLAIN_MCF


def test_default_stop_thresholds_resolved():
    s = initial_state(cyl(r=2.0), FlowConfig())
    assert s.config.stop_rho_min == pytest.approx(2e-3)
    assert s.config.stop_A2_max == pytest.approx(1e8 * 0.25)


@pytest.mark.parametrize("r", [0.3, 1.0, 4.0])
def test_cylinder_is_stationary_under_one_step(r):
    s0 = initial_state(cyl(r=r), FlowConfig())
    s1 = step(s0, adaptive_dt(s0))
    assert np.max(np.abs(s1.rho - r)) <= 1e-14 * r


def test_plain_stage_derivative_on_unit_cylinder():
    assert np.all(stage_derivative(cyl(), Mode.PLAIN_MCF) == -1.0)
    assert np.all(stage_derivative(cyl(), Mode.VOLUME_PRESERVING) == 0.0)


def test_adaptive_dt_formula():
    s = initial_state(cyl(N=100), FlowConfig(dt_safety=0.2))
    assert adaptive_dt(s) == pytest.approx(1e-5, rel=1e-12)


def test_adaptive_dt_capped_by_diffusion_limit():
    grid = GridSpec(0, 1, 50)
    s = initial_state(presets.perturbed(grid, 1.0, 0.3, (1, 2)), FlowConfig(dt_safety=0.2))
    assert adaptive_dt(s) <= 0.2 * grid.dx ** 2 / 2


def test_adaptive_dt_stops_at_t_end():
    s = initial_state(cyl(N=16), FlowConfig(t_end=1e-6))
    assert adaptive_dt(s) == pytest.approx(1e-6)


def test_step_rejects_finished_state():
    traj = run(cyl(N=16), FlowConfig(t_end=1e-3))
    assert traj.status is Status.REACHED_T_END
    with pytest.raises(ValueError):
        step(traj.final, 1e-6)


def test_stationary_run_reaches_t_end():
    traj = run(cyl(N=64), FlowConfig(t_end=0.05, output_every=500))
    assert traj.status is Status.REACHED_T_END
    assert traj.final.t == 0.05
    assert max(np.max(np.abs(s.rho - 1)) for s in traj) <= 1e-8
    assert all(abs(s.h - 1) <= 1e-8 for s in traj)


def test_collapsing_cylinder_matches_closed_form():
    traj = run(cyl(N=32), FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF, output_every=200))
    assert traj.status.singular
    assert traj.final.t == pytest.approx(0.5, rel=5e-3)
    for s in traj:
        exact = np.sqrt(1 - 2 * s.t)
        if exact >= 0.1:
            assert np.max(np.abs(s.rho - exact)) / exact <= 1e-4


@pytest.mark.parametrize("n", [3, 4])
def test_collapse_time_general_n(n):
    traj = run(cyl(N=16, n=n), FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF))
    assert traj.final.t == pytest.approx(1 / (2 * (n - 1)), rel=5e-3)


def test_volume_preserving_run_conserves_volume_and_shrinks_area():
    grid = GridSpec(0, 1, 64)
    prof = presets.perturbed(grid, 1.0, 0.1, (2,))
    for projection, tol in ((True, 1e-12), (False, 1e-6)):
        traj = run(prof, FlowConfig(t_end=0.05, output_every=200, volume_projection=projection))
        V0 = enclosed_volume(prof)
        vols = np.array([enclosed_volume(s.profile) for s in traj])
        assert np.max(np.abs(vols - V0)) / V0 <= tol
        area = np.array([surface_area(s.profile) for s in traj])
        assert np.all(np.diff(area) <= 1e-8)
        assert min(s.h for s in traj) > 0


def test_perturbation_decays_towards_cylinder():
    grid = GridSpec(0, 1, 64)
    traj = run(presets.perturbed(grid, 1.0, 0.05, (2,)), FlowConfig(t_end=0.05))
    amp = [np.ptp(s.rho) for s in traj]
    assert amp[-1] < 0.1 * amp[0]


def test_output_cadence_and_geometric_records():
    grid = GridSpec(0, 1, 16)
    traj = run(presets.cylinder(grid), FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF,
                                                  output_every=10**6, record_rho_factor=0.5))
    rmin = np.array([s.rho.min() for s in traj])
    # every record after the first is triggered by a halving of min(rho)
    assert np.all(rmin[1:-1] <= 0.5 * rmin[:-2] * (1 + 1e-12))
    assert np.all(rmin[1:-1] >= 0.5 * rmin[:-2] * 0.9)


def test_max_steps_stops_running():
    traj = run(cyl(N=16), FlowConfig(t_end=1.0), max_steps=7)
    assert traj.steps == 7 and traj.status is Status.RUNNING


def test_dumbbell_pinches_at_center():
    grid = GridSpec(0, 1, 200)
    traj = run(presets.dumbbell(grid, 0.2, 0.12),
               FlowConfig(t_end=0.05, output_every=2000, stop_rho_min=8 * grid.dx))
    assert traj.status is Status.AXIS_CONTACT
    i = int(np.argmin(traj.final.rho))
    assert abs(grid.x[i] - 0.5) <= 2 * grid.dx


def test_dt_follows_rho_min_squared_near_pinch():
    # coarse grid: the reaction limit takes over once min(rho) < dx
    traj = run(cyl(N=16), FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF, record_rho_factor=0.7,
                                     output_every=10**6))
    late = [s for s in traj if s.rho.min() < 0.02 and s.dt_last > 0]
    assert len(late) >= 3
    ratio = np.array([s.dt_last / s.rho.min() ** 2 for s in late])
    # dt = 0.2 min(rho)^2/4 at the start of the step
    assert np.all((ratio > 0.04) & (ratio < 0.06))


def test_profile_time_offset():
    prof = RadialProfile(GridSpec(0, 1, 16), np.ones(17), time=0.25)
    traj = run(prof, FlowConfig(t_end=0.3))
    assert traj.final.t == 0.3
