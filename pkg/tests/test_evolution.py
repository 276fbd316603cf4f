import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose


@pytest.fixture(scope="module")
def sphere_run():
    from src.evolution.driver import evolve
    from src.geometry.cassini import CassiniShape
    return evolve(CassiniShape.from_lambda(0.0), 64)


@pytest.fixture(scope="module")
def pinch_run():
    from src.evolution.driver import evolve
    from src.geometry.cassini import CassiniShape
    return evolve(CassiniShape.from_lambda(0.96), 200)


def test_sphere_shrinks_round(sphere_run):
    from src.evolution.trace import Outcome
    report = sphere_run.report
    assert report.outcome is Outcome.SHRINKS_ROUND
    assert report.pinch_location is None
    assert_allclose(report.T_est, 0.25, rtol=0.02)


def test_sphere_trace_is_well_formed(sphere_run):
    trace = sphere_run.trace
    t = trace.column("t")
    assert np.all(np.diff(t) > 0.0)
    assert np.all(trace.column("dt") > 0.0)
    assert np.all(np.diff(trace.column("area")) <= 1e-12)
    assert trace.records[0].convex
    assert trace.last.R_max < 0.01


def test_snapshots_are_ordered_and_bounded(sphere_run):
    times = [c.t for c in sphere_run.snapshots]
    assert times[0] == 0.0
    assert np.all(np.diff(times) > 0.0)
    assert times[-1] == sphere_run.final.t
    assert len(times) <= 400


def test_sphere_stays_round(sphere_run):
    for curve in sphere_run.snapshots:
        if curve.t > 0.2:
            break
        r2 = curve.S ** 2 + curve.R ** 2
        assert_allclose(r2, 1.0 - 4.0 * curve.t, atol=2e-2)


def test_supercritical_dumbbell_pinches(pinch_run):
    from src.evolution.trace import Outcome
    report = pinch_run.report
    assert report.outcome is Outcome.CENTRAL_NECKPINCH
    assert abs(report.pinch_location) < 0.05
    assert pinch_run.trace.last.R_min < 1e-3
    assert report.T_est >= pinch_run.trace.last.t


def test_pinch_run_keeps_symmetry(pinch_run):
    assert pinch_run.final.symmetry_defect() < 1e-8


def test_neckpinch_respects_extinction_upper_bound(pinch_run):
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import extinction_bounds
    _, upper = extinction_bounds(cassini_profile(CassiniShape.from_lambda(0.96), 200))
    assert pinch_run.report.T_est <= upper


def test_step_preserves_symmetry():
    from src.evolution.control import StepControl
    from src.evolution.stepper import step
    from src.geometry.cassini import CassiniShape, cassini_profile
    curve = cassini_profile(CassiniShape.from_lambda(0.9), 200)
    control = StepControl.for_scale(1.0)
    for _ in range(50):
        curve, dt = step(curve, control)
        assert dt > 0.0
    assert curve.symmetry_defect() < 1e-9
    assert curve.t > 0.0


def test_step_collapse_raises():
    from src.evolution.control import StepControl
    from src.evolution.stepper import step
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.utils.errors import NumericalFailure, StepCollapseError
    curve = cassini_profile(CassiniShape.from_lambda(0.5), 64)
    with pytest.raises(StepCollapseError):
        step(curve, StepControl.for_scale(1.0, dt_min=1.0))
    assert issubclass(StepCollapseError, NumericalFailure)


def test_stable_dt_is_bounded_by_grid_spacing():
    from src.evolution.stepper import evaluate_flow, stable_dt
    from src.geometry.cassini import CassiniShape, cassini_profile
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 100)
    ev = evaluate_flow(curve.S, curve.R, curve.dtheta)
    dt = stable_dt(ev, float(np.max(curve.R)), curve.dtheta, 0.1)
    assert 0.0 < dt <= 0.1 * float(np.min(ev.g)) * curve.dtheta ** 2 * (1.0 + 1e-12)


def test_stable_dt_follows_the_neck_radius():
    from src.evolution.stepper import evaluate_flow, stable_dt
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.profile import neck_index
    curve = cassini_profile(CassiniShape.from_lambda(0.96), 200)
    ev = evaluate_flow(curve.S, curve.R, curve.dtheta)
    r_neck = float(curve.R[neck_index(curve.R)])
    assert_allclose(r_neck, np.sqrt(1.0 - 0.96 ** 2), rtol=5e-3)
    assert_allclose(stable_dt(ev, 1e-4, curve.dtheta, 0.1, 0.5), 0.1 * 0.5 * 1e-8)
    assert stable_dt(ev, r_neck, curve.dtheta, 0.1, 0.5) <= 0.05 * r_neck ** 2


def test_pole_mean_curvature_of_sphere():
    from src.evolution.stepper import pole_mean_curvature
    from src.geometry.cassini import CassiniShape, cassini_profile
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 200)
    assert_allclose(pole_mean_curvature(curve), 2.0, rtol=1e-3)
    assert_allclose(pole_mean_curvature(curve, "right"), 2.0, rtol=1e-3)


def test_step_limit_outcome():
    from src.evolution.control import StepControl
    from src.evolution.driver import evolve
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.5), 32, StepControl.for_scale(1.0, max_steps=25))
    assert result.report.outcome is Outcome.STEP_LIMIT
    assert result.report.steps == 25
    assert result.trace.last.t == result.final.t


def test_collapsing_step_is_a_numerical_failure():
    from src.evolution.control import StepControl
    from src.evolution.driver import evolve
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.5), 32, StepControl.for_scale(1.0, dt_min=1.0))
    assert result.report.outcome is Outcome.NUMERICAL_FAILURE
    assert "dt_min" in result.report.message
    assert result.report.steps == 0


def test_evolution_is_deterministic():
    from src.evolution.control import StepControl
    from src.evolution.driver import evolve
    from src.geometry.cassini import CassiniShape
    control = StepControl.for_scale(1.0, max_steps=300)
    first = evolve(CassiniShape.from_lambda(0.7), 48, control)
    second = evolve(CassiniShape.from_lambda(0.7), 48, control)
    pd.testing.assert_frame_equal(first.trace.to_frame(), second.trace.to_frame())
    assert np.array_equal(first.final.R, second.final.R)


def test_trace_rejects_non_increasing_time():
    from src.evolution.trace import FlowTrace, TraceRecord
    trace = FlowTrace()
    trace.append(TraceRecord(t=0.0, H_max=2.0, H_pole=2.0, R_min=1.0, R_max=1.0, convex=True, dt=1e-4))
    with pytest.raises(ValueError):
        trace.append(TraceRecord(t=0.0, H_max=2.0, H_pole=2.0, R_min=1.0, R_max=1.0, convex=True, dt=1e-4))


def test_trace_frame_roundtrip(sphere_run):
    from src.evolution.trace import TRACE_COLUMNS, FlowTrace
    frame = sphere_run.trace.to_frame()
    assert list(frame.columns) == TRACE_COLUMNS
    back = FlowTrace.from_frame(frame)
    assert len(back) == len(sphere_run.trace)
    assert_allclose(back.column("H_max"), sphere_run.trace.column("H_max"))


def test_termination_report_pinch_location():
    from src.evolution.trace import Outcome, TerminationReport
    with pytest.raises(ValueError):
        TerminationReport(outcome=Outcome.CENTRAL_NECKPINCH, T_est=0.1)
    with pytest.raises(ValueError):
        TerminationReport(outcome=Outcome.SHRINKS_ROUND, T_est=0.1, pinch_location=0.0)
    report = TerminationReport(outcome=Outcome.CENTRAL_NECKPINCH, T_est=0.1, pinch_location=0.0)
    assert report.as_dict()["outcome"] == "CentralNeckpinch"


@pytest.mark.parametrize("field,value", [("safety", 0.0), ("safety", 1.5), ("eps_pinch", -1.0),
                                         ("max_steps", 0), ("snapshot_growth", 1.0),
                                         ("trace_growth", 1.0), ("singular_fraction", 0.0),
                                         ("stall_ratio", 1.0)])
def test_step_control_validation(field, value):
    from src.evolution.control import StepControl
    from src.utils.errors import ConfigError
    with pytest.raises(ConfigError) as excinfo:
        StepControl(**{field: value})
    assert excinfo.value.field == field


def test_step_control_scales_with_b():
    from src.evolution.control import StepControl
    control = StepControl.for_scale(2.0)
    assert_allclose(control.eps_pinch, 2e-3)
    assert_allclose(control.eps_extinct, 2e-2)
    assert_allclose(control.a2_cap, 2.5e7)
    assert_allclose(control.dt_min, 4e-14)


@pytest.mark.slow
def test_sphere_oracle_at_desk_resolution():
    from src.evolution.driver import evolve
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.0), 400)
    assert result.report.outcome is Outcome.SHRINKS_ROUND
    assert_allclose(result.report.T_est, 0.25, rtol=0.01)
    for curve in result.snapshots:
        if curve.t <= 0.2:
            assert np.max(np.abs(curve.S ** 2 + curve.R ** 2 - (1.0 - 4.0 * curve.t))) < 5e-3


@pytest.mark.slow
def test_center_curvature_blows_up_at_type_one_rate():
    from src.analysis.fitting import fit_power, singularity_type
    from src.evolution.driver import evolve
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.96), 1000)
    assert result.report.outcome is Outcome.CENTRAL_NECKPINCH
    fit = fit_power(result.trace, "H_center", result.report.T_est)
    assert abs(fit.exponent + 0.5) < 0.1
    assert singularity_type(fit) == "I"


def test_trace_densifies_as_the_neck_closes(pinch_run):
    trace = pinch_run.trace
    R_min = trace.column("R_min")
    last_decade = R_min <= 10.0 * trace.last.R_min
    assert np.count_nonzero(last_decade) >= 20
    H = trace.column("H_max")[last_decade]
    assert np.all(H[1:] / H[:-1] < 1.1)


def test_convex_stalled_surface_shrinks_round(monkeypatch):
    import src.evolution.driver as driver
    from src.evolution.control import StepControl
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    real_stable_dt = driver.stable_dt
    monkeypatch.setattr(driver, "stable_dt", lambda *args: 1e-3 * real_stable_dt(*args))
    control = StepControl.for_scale(1.0, max_steps=5)
    result = driver.evolve(CassiniShape.from_lambda(0.5), 32, control)
    assert result.report.outcome is Outcome.SHRINKS_ROUND
    assert "stalled" in result.report.message
    assert result.report.steps == 0
    # a stalled dumbbell is not convex and runs into the step limit
    result = driver.evolve(CassiniShape.from_lambda(0.9), 32, control)
    assert result.report.outcome is Outcome.STEP_LIMIT


def test_default_step_limit_grows_with_grid_size():
    from src.evolution.control import StepControl
    from src.utils.config import Config
    assert StepControl().step_limit(48) == Config.STEP_BUDGET * 48 ** 2
    assert StepControl(max_steps=7).step_limit(48) == 7


def test_sphere_curvature_converges_at_second_order():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures
    errors = []
    for n in (50, 100):
        field = curvatures(cassini_profile(CassiniShape.from_lambda(0.0), n))
        errors.append(np.max(np.abs(field.H - 2.0)))
    order = np.log2(errors[0] / errors[1])
    assert abs(order - 2.0) < 0.2


def test_singular_time_converges_at_second_order():
    from src.analysis.fitting import fit_power
    from src.evolution.driver import evolve
    from src.geometry.cassini import CassiniShape
    errors = []
    for n in (64, 128):
        result = evolve(CassiniShape.from_lambda(0.0), n)
        fit = fit_power(result.trace, "H_max", result.report.T_est, t_tol=1e-10)
        errors.append(abs(fit.T - 0.25))
    assert np.log2(errors[0] / errors[1]) >= 1.8


@pytest.mark.slow
def test_neckpinch_singular_time_lies_beyond_the_trace():
    from src.analysis.fitting import fit_power
    from src.evolution.driver import evolve
    from src.evolution.trace import Outcome
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.96), 400)
    assert result.report.outcome is Outcome.CENTRAL_NECKPINCH
    assert result.report.T_est > result.trace.last.t
    fit = fit_power(result.trace, "H_center", result.report.T_est)
    assert abs(fit.exponent + 0.5) < 0.1


@pytest.mark.slow
def test_neckpinch_profile_matches_the_cylinder_asymptotics():
    from src.analysis.asymptotics import fit_generic_pinch
    from src.analysis.rescaling import neck_rescaled_radius
    from src.evolution.driver import evolve
    from src.geometry.cassini import CassiniShape
    result = evolve(CassiniShape.from_lambda(0.96), 1000)
    assert fit_generic_pinch(result.final).misfit < 0.1
    radius = neck_rescaled_radius(result.final, result.report.T_est)
    assert abs(radius - np.sqrt(2.0)) / np.sqrt(2.0) < 0.05
