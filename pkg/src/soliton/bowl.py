"""The rotationally symmetric translating ("bowl") soliton.

The generator is integrated in arclength-angle variables, tip at the origin,
opening towards +x:

    dx/ds = cos β,   dy/ds = sin β,   dβ/ds = cos β / y − c sin β

The meridian curvature −dβ/ds equals H − κ_φ with H = c·sin β and
κ_φ = cos β / y. The tip is a 0/0 point of the β equation, so integration
starts a short arclength δ away on the series x = (c/4)y² + (c³/128)y⁴.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from src.geometry.profile import ProfileCurve, cell_centers
from src.utils.errors import DomainError, SolverFailure
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

TOL_RANGE = (1e-12, 1e-6)
MAX_REFINEMENTS = 6
MAX_SAMPLES = 2_000_000

# sixth-order centred first-derivative stencil
_D1_STENCIL = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


@dataclass(frozen=True, eq=False)
class SolitonCurve:
    """Samples ordered by arclength from the tip; the tip sample is (0, 0, π/2)."""

    c: float
    x: np.ndarray
    y: np.ndarray
    beta: np.ndarray
    s: np.ndarray
    h: float

    @property
    def H(self) -> np.ndarray:
        return soliton_mean_curvature(self.beta, self.c)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "y": self.y, "beta": self.beta, "H": self.H})

    def __len__(self) -> int:
        return int(self.x.size)


class PlanarCurve(NamedTuple):
    x: np.ndarray
    y: np.ndarray


def soliton_mean_curvature(beta, c: float):
    """H = c·sin β for tangent angle β ∈ [0, π]."""
    b = np.asarray(beta, dtype=float)
    if np.any(b < 0.0) or np.any(b > np.pi):
        raise DomainError("beta must lie in [0, pi]")
    H = c * np.sin(b)
    return float(H) if H.ndim == 0 else H


def _rhs(state: np.ndarray, c: float) -> np.ndarray:
    _, y, beta = state
    cb, sb = np.cos(beta), np.sin(beta)
    return np.array([cb, sb, cb / y - c * sb])


def _rk4(state: np.ndarray, h: float, c: float) -> np.ndarray:
    k1 = _rhs(state, c)
    k2 = _rhs(state + 0.5 * h * k1, c)
    k3 = _rhs(state + 0.5 * h * k2, c)
    k4 = _rhs(state + h * k3, c)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _tip_start(c: float, y0: float) -> tuple:
    """(x, y, β, s) on the tip series at height y0."""
    x0 = 0.25 * c * y0 ** 2 + c ** 3 * y0 ** 4 / 128.0
    slope = 0.5 * c * y0 + c ** 3 * y0 ** 3 / 32.0  # dx/dy
    beta0 = np.arctan2(1.0, slope)
    s0 = y0 + c ** 2 * y0 ** 3 / 24.0
    return x0, y0, beta0, s0


def _integrate(c: float, x_extent: float, h: float, y0: float, tol: float) -> tuple:
    x0, _, beta0, s0 = _tip_start(c, y0)
    state = np.array([x0, y0, beta0])
    states = [state]
    worst = 0.0
    while state[0] < x_extent:
        if len(states) > MAX_SAMPLES:
            raise SolverFailure(f"more than {MAX_SAMPLES} samples before x reached {x_extent}")
        full = _rk4(state, h, c)
        half = _rk4(_rk4(state, 0.5 * h, c), 0.5 * h, c)
        err = float(np.max(np.abs(full - half)))
        worst = max(worst, err)
        if err > tol or not np.all(np.isfinite(full)):
            return None, worst
        state = full
        states.append(state)
    samples = np.array(states)
    s = s0 + h * np.arange(samples.shape[0])
    return (samples, s), worst


def solve_soliton(c: float, x_extent: float, tol: float = 1e-10) -> SolitonCurve:
    if not c > 0.0:
        raise DomainError(f"soliton speed must be positive, got {c}")
    if not x_extent > 0.0:
        raise DomainError(f"x_extent must be positive, got {x_extent}")
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise DomainError(f"tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {tol}")

    # series truncation ~ (c·y)^6 / c kept below tol/10
    y0 = (0.1 * tol) ** (1.0 / 6.0) / c
    h = y0
    for refinement in range(MAX_REFINEMENTS + 1):
        result, worst = _integrate(c, x_extent, h, y0, tol)
        if result is not None:
            break
        logger.debug(f"step-doubling error {worst:.3e} > tol at h={h:.3e}; halving")
        h *= 0.5
    else:
        raise SolverFailure(f"tolerance {tol:g} not met after {MAX_REFINEMENTS} refinements")

    samples, s = result
    x = np.concatenate(([0.0], samples[:, 0]))
    y = np.concatenate(([0.0], samples[:, 1]))
    beta = np.concatenate(([0.5 * np.pi], samples[:, 2]))
    s = np.concatenate(([0.0], s))

    if np.any(np.diff(y) <= 0.0) or np.any(np.diff(beta) >= 0.0):
        raise SolverFailure("soliton samples lost monotonicity in y or beta")

    return SolitonCurve(c=float(c), x=x, y=y, beta=beta, s=s, h=float(h))


def _uniform_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Sixth-order derivative on a uniform grid; NaN within three points of either end."""
    out = np.full(values.shape, np.nan)
    if values.size >= 7:
        out[3:-3] = np.convolve(values, _D1_STENCIL[::-1], mode="valid") / h
    return out


def beta_derivative(curve: SolitonCurve) -> np.ndarray:
    """dβ/ds from the samples alone (the tip sample is excluded from the stencil)."""
    out = np.full(curve.beta.shape, np.nan)
    out[1:] = _uniform_derivative(curve.beta[1:], curve.h)
    return out


def ode_residual(curve: SolitonCurve) -> np.ndarray:
    """Residual of the soliton equation in arclength form at interior samples.

    dβ/ds − (cos β / y − c sin β), with dβ/ds differenced from the samples;
    multiplying the graph form φφ″ − (1+φ′²)(1 − cφφ′) by cos³β / y gives
    this expression.
    """
    rhs = np.cos(curve.beta[1:]) / curve.y[1:] - curve.c * np.sin(curve.beta[1:])
    res = np.full(curve.beta.shape, np.nan)
    res[1:] = beta_derivative(curve)[1:] - rhs
    return res


def finite_difference_mean_curvature(curve: SolitonCurve) -> np.ndarray:
    """κ_u + κ_φ from sampled β (κ_u = −dβ/ds) and y; NaN where no stencil fits."""
    H = np.full(curve.beta.shape, np.nan)
    H[1:] = -beta_derivative(curve)[1:] + np.cos(curve.beta[1:]) / curve.y[1:]
    return H


def translate_snapshot(curve: SolitonCurve, t: float) -> PlanarCurve:
    """Generator at time t of the moving soliton.

    The bowl opens towards +x and travels that way with speed c, so the
    profile at time t is y(x, t) = φ(x − c·t).
    """
    return PlanarCurve(x=curve.x + curve.c * t, y=curve.y.copy())


def cap_profile(curve: SolitonCurve, n: int, x_cut: float) -> ProfileCurve:
    """Closed profile made of the soliton cap up to ``x_cut`` and its mirror image.

    The cap is reparametrised proportionally to arclength so the left pole sits
    at θ = 0; the mirrored half closes the curve at x = 2·x_cut with a corner
    at θ = π/2, far from the tip.
    """
    if x_cut > curve.x[-1]:
        raise DomainError(f"x_cut = {x_cut} beyond the sampled extent {curve.x[-1]}")
    s_cut = float(np.interp(x_cut, curve.x, curve.s))
    spline_x = CubicSpline(curve.s, curve.x)
    spline_y = CubicSpline(curve.s, curve.y)
    theta = cell_centers(n)
    left = theta < 0.5 * np.pi
    s = np.where(left, theta, np.pi - theta) * s_cut / (0.5 * np.pi)
    x = spline_x(s)
    y = spline_y(s)
    S = np.where(left, x, 2.0 * x_cut - x)
    return ProfileCurve(S=S, R=y, t=0.0)
