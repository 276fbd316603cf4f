"""Power-law fits in log-log space and singular-time refinement."""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from src.evolution.trace import FlowTrace
from src.utils.errors import FitError

FIT_QUANTITIES = ("H_max", "H_pole", "H_center")
MIN_FIT_RECORDS = 10
TYPE_I_EXPONENT = -0.5

# 1/phi
R_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FitResult:
    exponent: float
    prefactor: float
    residual: float
    window: Tuple[float, float]
    T: Optional[float] = None
    points: int = 0

    def __post_init__(self):
        if self.residual < 0.0:
            raise ValueError("residual must be non-negative")
        if not self.window[0] <= self.window[1]:
            raise ValueError("fit window is empty")

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "residual": self.residual,
            "window": list(self.window),
            "T": self.T,
            "points": self.points,
        }


def fit_log_log(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """Least-squares line through (log x, log y): returns (slope, prefactor, rms)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise FitError("log-log fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    rms = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(np.exp(intercept)), rms


def golden_section_minimize(func: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Minimum of a unimodal ``func`` on [lo, hi], to an interval of width ``tol``."""
    m1 = hi - R_GOLDEN * (hi - lo)
    m2 = lo + R_GOLDEN * (hi - lo)
    f1, f2 = func(m1), func(m2)
    while hi - lo > tol:
        if f1 < f2:
            hi, m2, f2 = m2, m1, f1
            m1 = hi - R_GOLDEN * (hi - lo)
            f1 = func(m1)
        else:
            lo, m1, f1 = m1, m2, f2
            m2 = lo + R_GOLDEN * (hi - lo)
            f2 = func(m2)
    return 0.5 * (lo + hi)


def guess_singular_time(trace: FlowTrace, quantity: str = "H_max", exponent: float = TYPE_I_EXPONENT) -> float:
    """Extrapolate T from the last two records assuming q ∝ (T − t)^exponent.

    From q̇ = −exponent·q/(T − t): T − t = −exponent·q/q̇.
    """
    if len(trace) < 2:
        raise FitError("need at least two trace records to extrapolate T")
    t = trace.column("t")[-2:]
    q = trace.column(quantity)[-2:]
    rate = (q[1] - q[0]) / (t[1] - t[0])
    if not (np.isfinite(rate) and rate > 0.0):
        # not blowing up (yet); fall back to one more step beyond the trace
        return float(t[1] + (t[1] - t[0]))
    return float(t[1] - exponent * q[1] / rate)


def _select_window(t: np.ndarray, T: float) -> np.ndarray:
    d = T - t
    positive = d > 0.0
    if not np.any(positive):
        raise FitError(f"T_est = {T} does not exceed any trace time")
    d_min = float(np.min(d[positive]))
    return positive & (d <= 10.0 * d_min)


def fit_power(
    trace: FlowTrace,
    quantity: str,
    T_est: float,
    refine: bool = True,
    min_records: int = MIN_FIT_RECORDS,
    t_tol: Optional[float] = None,
) -> FitResult:
    """Fit quantity ∝ (T − t)^p over the final decade before ``T_est``.

    With ``refine`` the singular time is re-estimated by golden-section
    minimisation of the fit residual over [t_last, t_last + 10·(T_est − t_last)],
    keeping the record window fixed.
    """
    if quantity not in FIT_QUANTITIES:
        raise FitError(f"unknown quantity {quantity!r}; expected one of {FIT_QUANTITIES}")
    t = trace.column("t")
    q = trace.column(quantity)
    if t.size < min_records:
        raise FitError(f"need at least {min_records} trace records, got {t.size}")
    if not T_est > t[-1]:
        raise FitError(f"T_est = {T_est} must exceed the last trace time {t[-1]}")

    mask = _select_window(t, T_est)
    tw, qw = t[mask], q[mask]
    if tw.size < min_records:
        raise FitError(f"only {tw.size} records in the final decade before T = {T_est:.6g}")
    if not np.all(np.isfinite(qw)) or np.any(qw <= 0.0):
        raise FitError(f"{quantity} must be positive and finite inside the fit window")

    def residual(T: float) -> float:
        return fit_log_log(T - tw, qw)[2]

    T = T_est
    if refine:
        t_last = float(t[-1])
        lo = t_last + 1e-12 * max(1.0, abs(t_last))
        hi = t_last + 10.0 * (T_est - t_last)
        tol = t_tol if t_tol is not None else 1e-3 * (hi - lo)
        T = golden_section_minimize(residual, lo, hi, tol)

    slope, prefactor, rms = fit_log_log(T - tw, qw)
    return FitResult(
        exponent=slope,
        prefactor=prefactor,
        residual=rms,
        window=(float(tw[0]), float(tw[-1])),
        T=float(T),
        points=int(tw.size),
    )


def singularity_type(fit: FitResult, tol: float = 0.1) -> str:
    """'I' if the blow-up rate is no faster than (T − t)^(−1/2) within ``tol``, else 'II'."""
    return "I" if fit.exponent >= TYPE_I_EXPONENT - tol else "II"


def blowup_sequence_index(trace: FlowTrace, T: float, k: int, quantity: str = "H_max") -> int:
    """Record index maximising H²·(T − 1/k − t) over records with t ≤ T − 1/k."""
    t = trace.column("t")
    q = trace.column(quantity)
    horizon = T - 1.0 / k
    admissible = np.flatnonzero(t <= horizon)
    if admissible.size == 0:
        raise FitError(f"no trace record before T - 1/k = {horizon:.6g}")
    score = q[admissible] ** 2 * (horizon - t[admissible])
    return int(admissible[np.argmax(score)])
