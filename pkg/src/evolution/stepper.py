"""Forward-Euler stepping of the reduced (R, S) mean curvature flow system."""
from typing import NamedTuple

import numpy as np

from src.evolution.control import StepControl
from src.geometry.curvature import CurvatureField, curvatures, curvatures_from_derivatives
from src.geometry.profile import Pole, ProfileCurve, centered_derivatives, neck_index, pole_value
from src.utils.errors import NumericalFailure, StepCollapseError


class FlowEvaluation(NamedTuple):
    dR: np.ndarray
    dS: np.ndarray
    field: CurvatureField
    g: np.ndarray

    @property
    def kappa_u(self) -> np.ndarray:
        return self.field.kappa_u

    @property
    def kappa_phi(self) -> np.ndarray:
        return self.field.kappa_phi


def evaluate_flow(S: np.ndarray, R: np.ndarray, dtheta: float) -> FlowEvaluation:
    """Right-hand sides of the planar evolution together with the curvatures.

        R_t =  S′(S′R″ − R′S″)/g² − S′²/(R g)
        S_t =  R′(R′S″ − S′R″)/g² + R′S′/(R g)

    with g = S′² + R′². Both collapse to the normal velocity −H along the
    outer normal (−R′, S′)/√g, which is how they are evaluated.
    """
    d = centered_derivatives(S, R, dtheta)
    kappa_u, kappa_phi, g, sqrt_g = curvatures_from_derivatives(d, R)
    field = CurvatureField(kappa_u=kappa_u, kappa_phi=kappa_phi)
    speed = field.H / sqrt_g
    return FlowEvaluation(dR=-d.S1 * speed, dS=d.R1 * speed, field=field, g=g)


def stable_dt(
    ev: FlowEvaluation, r_neck: float, dtheta: float, safety: float, singular_fraction: float = 1.0
) -> float:
    """safety · min(min g·Δθ², f/max|A|², f·R_min²) with f = ``singular_fraction``.

    ``r_neck`` is the interior minimum radius from ``neck_index``; the
    pole-adjacent nodes, where R = O(Δθ), are covered by the g·Δθ² term.
    Near a neckpinch dt ≈ 2·f·safety·(T − t), so f sets the number of steps
    per decade of T − t.
    """
    a2_max = float(np.max(ev.field.A2))
    singular = singular_fraction * min(1.0 / a2_max, r_neck ** 2)
    return safety * min(float(np.min(ev.g)) * dtheta ** 2, singular)


def advance(S: np.ndarray, R: np.ndarray, ev: FlowEvaluation, dt: float, control: StepControl) -> tuple:
    """Explicit update of raw arrays with a step already chosen; returns (S_new, R_new)."""
    if not np.isfinite(dt):
        raise NumericalFailure("non-finite time step")
    if dt < control.dt_min:
        raise StepCollapseError(f"dt = {dt:.3e} below dt_min = {control.dt_min:.3e}")
    S_new = S + dt * ev.dS
    R_new = R + dt * ev.dR
    if not np.isfinite(np.sum(S_new) + np.sum(R_new)):
        raise NumericalFailure("non-finite values after update")
    return S_new, R_new


def step(curve: ProfileCurve, control: StepControl) -> tuple:
    """Advance ``curve`` by one adaptive forward-Euler step.

    Returns the new curve and the step size used.
    """
    curve.require_regular()
    ev = evaluate_flow(curve.S, curve.R, curve.dtheta)
    r_neck = float(curve.R[neck_index(curve.R)])
    dt = stable_dt(ev, r_neck, curve.dtheta, control.safety, control.singular_fraction)
    S_new, R_new = advance(curve.S, curve.R, ev, dt, control)
    return ProfileCurve(S=S_new, R=R_new, t=curve.t + dt), dt


def pole_mean_curvature(curve: ProfileCurve, pole: Pole = "left") -> float:
    """Mean curvature at a pole by even extrapolation of H(θ).

    At the axis the surface is umbilic, so this also equals 2·κ_u there.
    """
    field = curvatures(curve)
    return pole_value(field.H, pole)
