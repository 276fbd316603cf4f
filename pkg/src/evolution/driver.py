"""Run the flow of a Cassini surface until it terminates and classify the outcome."""
from collections import deque
from typing import List, NamedTuple, Optional

import numpy as np

from src.analysis.fitting import fit_power, guess_singular_time
from src.evolution.control import StepControl
from src.evolution.stepper import advance, evaluate_flow, stable_dt
from src.evolution.trace import FlowTrace, Outcome, TerminationReport, TraceRecord
from src.geometry.cassini import CassiniShape, cassini_profile
from src.geometry.curvature import is_convex, surface_area
from src.geometry.profile import ProfileCurve, neck_index, pole_value
from src.utils.errors import FitError, NumericalFailure
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class EvolutionResult(NamedTuple):
    trace: FlowTrace
    report: TerminationReport
    final: ProfileCurve
    snapshots: List[ProfileCurve]


def estimate_singular_time(trace: FlowTrace, quantity: str = "H_max") -> float:
    """Refined singular time from the trace tail; the last trace time if no fit is possible."""
    if len(trace) < 2:
        return trace.last.t if len(trace) else 0.0
    try:
        guess = guess_singular_time(trace, quantity)
        fit = fit_power(trace, quantity, guess)
    except FitError as exc:
        logger.warning(f"T_est falls back to last trace time: {exc}")
        return trace.last.t
    return max(fit.T, trace.last.t)


def evolve(shape: CassiniShape, n: int, control: Optional[StepControl] = None) -> EvolutionResult:
    """Step the Cassini surface of ``shape`` on ``n`` nodes until termination.

    Termination, checked on the current state before each step:
      ShrinksRound      R_max < eps_extinct after the surface turned convex, or
                        a convex surface whose step stalled (see StepControl)
      CentralNeckpinch  neck radius < eps_pinch while R_max > 10·eps_pinch
      CurvatureBlowup   max|A|² > a2_cap, or extinction without convexity
      StepLimit         the step limit exhausted
      NumericalFailure  non-finite update or dt < dt_min
    """
    control = control if control is not None else StepControl.for_scale(shape.b)
    max_steps = control.step_limit(n)
    curve = cassini_profile(shape, n)
    S, R, t = curve.S.copy(), curve.R.copy(), 0.0
    dtheta = curve.dtheta

    trace = FlowTrace()
    snapshots = deque([curve], maxlen=control.max_snapshots)
    next_snap_t = control.snapshot_cadence
    next_snap_H: Optional[float] = None

    ever_convex = False
    convex = False
    outcome: Optional[Outcome] = None
    pinch_location: Optional[float] = None
    message = ""
    last_dt = float("nan")
    last_recorded_t = -np.inf
    last_recorded_H = np.inf
    last_recorded_neck = 0.0

    logger.info(f"Evolving lambda={shape.lam:.6g}, b={shape.b:.6g}, n={n}")

    steps = 0
    while True:
        ev = evaluate_flow(S, R, dtheta)
        i_neck = neck_index(R)
        R_neck = float(R[i_neck])
        dt = stable_dt(ev, R_neck, dtheta, control.safety, control.singular_fraction)
        H = ev.field.H
        a2_max = float(np.max(ev.field.A2))
        H_max = float(np.max(H))
        R_max = float(np.max(R))
        # step of a round sphere of radius R_max on this grid
        stalled = dt < control.stall_ratio * control.safety * (R_max * dtheta) ** 2

        if steps % control.convex_every == 0 or R_max < control.eps_extinct or stalled:
            convex = is_convex(ev.field)
            if convex and not ever_convex:
                logger.info(f"Surface convex at t={t:.6g}")
            ever_convex = ever_convex or convex

        if R_max < control.eps_extinct:
            if ever_convex:
                outcome = Outcome.SHRINKS_ROUND
            else:
                outcome = Outcome.CURVATURE_BLOWUP
                message = "extinct without turning convex"
        elif R_neck < control.eps_pinch and R_max > 10.0 * control.eps_pinch:
            outcome = Outcome.CENTRAL_NECKPINCH
            pinch_location = float(S[i_neck])
        elif a2_max > control.a2_cap:
            outcome = Outcome.CURVATURE_BLOWUP
            message = f"|A|^2 = {a2_max:.3e} exceeds cap"
        elif stalled and convex:
            outcome = Outcome.SHRINKS_ROUND
            message = f"convex with dt = {dt:.3e} stalled at R_max = {R_max:.4g}"
        elif steps >= max_steps:
            outcome = Outcome.STEP_LIMIT
            message = f"{steps} steps without termination"

        record = (
            outcome is not None
            or steps % control.trace_every == 0
            or H_max >= control.trace_growth * last_recorded_H
            or R_neck * control.trace_growth <= last_recorded_neck
        )
        if record and t > last_recorded_t:
            trace.append(
                TraceRecord(
                    t=t,
                    H_max=H_max,
                    H_pole=pole_value(H, "left"),
                    R_min=R_neck,
                    R_max=R_max,
                    convex=convex,
                    dt=dt if np.isfinite(dt) and dt > 0.0 else last_dt,
                    H_center=float(H[i_neck]),
                    area=surface_area(S, R, dtheta, ev.g),
                )
            )
            last_recorded_t = t
            last_recorded_H = H_max
            last_recorded_neck = R_neck

        if next_snap_H is None:
            next_snap_H = H_max * control.snapshot_growth
        elif outcome is None and (t >= next_snap_t or H_max >= next_snap_H):
            snapshots.append(ProfileCurve(S=S.copy(), R=R.copy(), t=t))
            next_snap_t = t + control.snapshot_cadence
            next_snap_H = H_max * control.snapshot_growth

        if outcome is not None:
            break

        try:
            S_new, R_new = advance(S, R, ev, dt, control)
        except NumericalFailure as exc:
            outcome = Outcome.NUMERICAL_FAILURE
            message = str(exc)
            logger.warning(f"Numerical failure at t={t:.6g}, step {steps}: {exc}")
            break

        S, R, t = S_new, R_new, t + dt
        last_dt = dt
        steps += 1

        if steps % control.log_every == 0:
            logger.info(f"step {steps}: t={t:.8g} dt={dt:.3e} H_max={H_max:.4g} R_neck={R_neck:.4g}")

    final = ProfileCurve(S=S, R=R, t=t)
    if snapshots[-1].t < t:
        snapshots.append(final)

    T_est = estimate_singular_time(trace)
    report = TerminationReport(
        outcome=outcome,
        T_est=T_est,
        pinch_location=pinch_location,
        steps=steps,
        message=message,
    )
    logger.info(f"Terminated: {outcome.value} after {steps} steps at t={t:.8g}, T_est={T_est:.8g}")
    return EvolutionResult(trace=trace, report=report, final=final, snapshots=list(snapshots))
