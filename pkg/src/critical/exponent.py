"""Scaling of the pole curvature near the critical shape parameter.

On the supercritical side the largest pole curvature reached before the
neck pinches follows H_pole_max ≈ Λ₀ (λ − λ_c)^(−n).
"""
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit

from src.analysis.fitting import FitResult, fit_log_log
from src.critical.classify import ClassifiedRun
from src.utils.errors import FitError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_SUPERCRITICAL_RUNS = 5
DEFAULT_SHIFTS = (-0.002, 0.0, 0.002)


@dataclass(frozen=True)
class JointFit:
    lambda_c: float
    exponent: float
    prefactor: float
    residual: float
    points: int

    def as_dict(self) -> dict:
        return {
            "lambda_c": self.lambda_c,
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "residual": self.residual,
            "points": self.points,
        }


def _supercritical(runs: Iterable[ClassifiedRun], lambda_c: float) -> List[ClassifiedRun]:
    return sorted(
        (r for r in runs
         if r.supercritical and r.lam > lambda_c and np.isfinite(r.H_pole_max) and r.H_pole_max > 0.0),
        key=lambda r: r.lam,
    )


def critical_exponent(runs: Sequence[ClassifiedRun], lambda_c: float,
                      min_runs: int = MIN_SUPERCRITICAL_RUNS) -> FitResult:
    """Fit log H_pole_max against log(λ − λ_c); the exponent reported is n = −slope."""
    usable = _supercritical(runs, lambda_c)
    if len(usable) < min_runs:
        raise FitError(f"need at least {min_runs} supercritical runs above lambda_c={lambda_c}, got {len(usable)}")
    lam = np.array([r.lam for r in usable])
    H = np.array([r.H_pole_max for r in usable])
    slope, prefactor, rms = fit_log_log(lam - lambda_c, H)
    return FitResult(
        exponent=-slope,
        prefactor=prefactor,
        residual=rms,
        window=(float(lam[0]), float(lam[-1])),
        points=int(lam.size),
    )


def exponent_sensitivity(runs: Sequence[ClassifiedRun], lambda_c: float,
                         shifts: Sequence[float] = DEFAULT_SHIFTS) -> pd.DataFrame:
    """Critical exponent refitted with λ_c displaced by each of ``shifts``."""
    rows = []
    for shift in shifts:
        fit = critical_exponent(runs, lambda_c + shift)
        rows.append({
            "lambda_c": lambda_c + shift,
            "shift": shift,
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "residual": fit.residual,
            "points": fit.points,
        })
    return pd.DataFrame(rows)


def joint_exponent_fit(runs: Sequence[ClassifiedRun], lambda_c_guess: float,
                       min_runs: int = MIN_SUPERCRITICAL_RUNS) -> JointFit:
    """Fit Λ₀, λ_c and n together by nonlinear least squares in log H."""
    usable = _supercritical(runs, -np.inf)
    if len(usable) < min_runs:
        raise FitError(f"need at least {min_runs} supercritical runs, got {len(usable)}")
    lam = np.array([r.lam for r in usable])
    logH = np.log([r.H_pole_max for r in usable])
    lam_floor = float(lam[0])
    guess_c = min(lambda_c_guess, lam_floor - 1e-6)

    def model(x, log_prefactor, lambda_c, n):
        return log_prefactor - n * np.log(np.maximum(x - lambda_c, 1e-300))

    try:
        start = critical_exponent(usable, guess_c, min_runs)
        p0 = (np.log(start.prefactor), guess_c, start.exponent)
    except FitError:
        p0 = (float(np.mean(logH)), guess_c, 1.0)
    try:
        params, _ = curve_fit(
            model, lam, logH, p0=p0,
            bounds=([-np.inf, -np.inf, 0.0], [np.inf, lam_floor - 1e-12, np.inf]),
        )
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"joint fit did not converge: {exc}") from exc
    log_prefactor, lambda_c, n = (float(p) for p in params)
    rms = float(np.sqrt(np.mean((logH - model(lam, *params)) ** 2)))
    logger.info(f"joint fit: lambda_c={lambda_c:.8g}, n={n:.4g}, Lambda0={np.exp(log_prefactor):.4g}")
    return JointFit(lambda_c=lambda_c, exponent=n, prefactor=float(np.exp(log_prefactor)),
                    residual=rms, points=int(lam.size))
