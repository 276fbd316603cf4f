"""Limiting neck profiles: generic cusp and degenerate (Hermite) neckpinch."""
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional

import numpy as np

from src.analysis.hermite import hermite_eval
from src.analysis.rescaling import RescaledCurve
from src.geometry.profile import ProfileCurve, neck_index
from src.utils.errors import DomainError, FitError

SQRT2 = np.sqrt(2.0)
HermiteVariable = Literal["physical", "similarity"]


@dataclass(frozen=True)
class AsymptoteParams:
    K: float
    m: int = 4
    T: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2 or self.m % 2:
            raise DomainError(f"Hermite order m must be an even integer >= 2, got {self.m}")


def degenerate_profile(
    params: AsymptoteParams,
    t: float,
    x_tilde: np.ndarray,
    variable: HermiteVariable = "physical",
) -> np.ndarray:
    """ỹ = √2 + K·Hm_m(x)·(T − t)^(m/2 − 1).

    With ``variable="physical"`` the Hermite argument is x = x̃·√(T − t);
    with ``"similarity"`` it is x̃ itself.
    """
    if params.m % 2:
        raise DomainError(f"m must be even, got {params.m}")
    if params.m < 4:
        raise DomainError(f"a degenerate neckpinch needs m >= 4, got {params.m}")
    if not t < params.T:
        raise DomainError(f"t = {t} must precede T = {params.T}")
    tau = params.T - t
    x_tilde = np.asarray(x_tilde, dtype=float)
    arg = x_tilde * np.sqrt(tau) if variable == "physical" else x_tilde
    return SQRT2 + params.K * hermite_eval(params.m, arg) * tau ** (params.m / 2 - 1)


class ProfileFit(NamedTuple):
    K: float
    misfit: float
    x: np.ndarray
    y: np.ndarray
    model: np.ndarray


def fit_degenerate(
    rc: RescaledCurve,
    T: float,
    m: int = 4,
    x_window: float = 2.0,
    variable: HermiteVariable = "physical",
) -> ProfileFit:
    """Least-squares K for the degenerate profile over |x̃| ≤ x_window.

    ``misfit`` is the RMS deviation of the fitted model from the data.
    """
    mask = np.abs(rc.x) <= x_window
    if np.count_nonzero(mask) < 3:
        raise FitError(f"fewer than 3 samples with |x| <= {x_window}")
    x, y = rc.x[mask], rc.y[mask]
    basis = degenerate_profile(AsymptoteParams(K=1.0, m=m, T=T), rc.source_time, x, variable) - SQRT2
    denom = float(np.dot(basis, basis))
    if denom == 0.0:
        raise FitError("degenerate basis vanishes on the fit window")
    K = float(np.dot(basis, y - SQRT2) / denom)
    model = SQRT2 + K * basis
    misfit = float(np.sqrt(np.mean((y - model) ** 2)))
    return ProfileFit(K=K, misfit=misfit, x=x, y=y, model=model)


def generic_pinch_profile(K: float, x) -> np.ndarray:
    """y = K|x| / √(log(1/|x|)) for 0 < |x| < 1; the limit 0 is returned at x = 0."""
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax >= 1.0):
        raise DomainError("generic pinch profile needs |x| < 1")
    out = np.zeros_like(ax)
    nz = ax > 0.0
    out[nz] = K * ax[nz] / np.sqrt(np.log(1.0 / ax[nz]))
    return out


def fit_generic_pinch(curve: ProfileCurve, x_hi: float = 0.1, x_lo: Optional[float] = None) -> ProfileFit:
    """Least-squares K of the cusp profile about the neck for x_lo ≤ |x| ≤ x_hi.

    ``x_lo`` defaults to twice the grid spacing at the neck. ``misfit`` is the
    RMS relative deviation.
    """
    i = neck_index(curve.R)
    x = curve.S - curve.S[i]
    if x_lo is None:
        lo, hi = max(i - 1, 0), min(i + 1, curve.n - 1)
        x_lo = float(np.max(np.abs(np.diff(curve.S[lo:hi + 1]))))
        x_lo *= 2.0
    mask = (np.abs(x) >= x_lo) & (np.abs(x) <= x_hi)
    if np.count_nonzero(mask) < 3:
        raise FitError(f"fewer than 3 samples with {x_lo:.3g} <= |x| <= {x_hi:.3g}")
    xs, ys = x[mask], curve.R[mask]
    basis = generic_pinch_profile(1.0, xs)
    K = float(np.dot(basis, ys) / np.dot(basis, basis))
    model = K * basis
    misfit = float(np.sqrt(np.mean(((ys - model) / ys) ** 2)))
    return ProfileFit(K=K, misfit=misfit, x=xs, y=ys, model=model)
