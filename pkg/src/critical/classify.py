"""Classification of single runs and parallel sweeps over the shape parameter."""
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from src.evolution.control import StepControl
from src.evolution.driver import evolve
from src.evolution.trace import Outcome
from src.geometry.cassini import CassiniShape
from src.utils.errors import DomainError, MonotonicityViolation, NeckflowError, NumericalFailure
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SWEEP_COLUMNS = ["lambda", "outcome", "H_pole_max", "T_est"]


@dataclass(frozen=True)
class ClassifiedRun:
    lam: float
    outcome: Outcome
    H_pole_max: float
    T_est: float
    error: Optional[str] = None

    @property
    def subcritical(self) -> bool:
        return self.outcome is Outcome.SHRINKS_ROUND

    @property
    def supercritical(self) -> bool:
        return self.outcome is Outcome.CENTRAL_NECKPINCH

    def as_row(self) -> dict:
        return {
            "lambda": self.lam,
            "outcome": self.outcome.value,
            "H_pole_max": self.H_pole_max,
            "T_est": self.T_est,
        }

    @classmethod
    def from_row(cls, row: dict) -> "ClassifiedRun":
        return cls(
            lam=float(row["lambda"]),
            outcome=Outcome(row["outcome"]),
            H_pole_max=float(row["H_pole_max"]),
            T_est=float(row["T_est"]),
        )


def classify(lam: float, n: int, control: Optional[StepControl] = None, b: float = 1.0) -> ClassifiedRun:
    """Evolve the Cassini surface of parameter ``lam`` and report its fate.

    ShrinksRound is the subcritical side, CentralNeckpinch the supercritical
    side; CurvatureBlowup and StepLimit are reported as they come.
    """
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"lambda must satisfy 0 <= lambda < 1, got {lam}")
    control = control if control is not None else StepControl.for_scale(b)
    result = evolve(CassiniShape.from_lambda(lam, b), n, control)
    report = result.report
    if report.outcome is Outcome.NUMERICAL_FAILURE:
        last = result.trace.last
        raise NumericalFailure(
            f"lambda={lam}: {report.message} (t={last.t:.6g}, H_max={last.H_max:.4g}, "
            f"R_min={last.R_min:.3g}, steps={report.steps})"
        )
    H_pole = result.trace.column("H_pole")
    return ClassifiedRun(
        lam=float(lam),
        outcome=report.outcome,
        H_pole_max=float(np.max(H_pole)),
        T_est=report.T_est,
    )


def _sweep_worker(args: tuple) -> ClassifiedRun:
    lam, n, control, b = args
    try:
        return classify(lam, n, control, b)
    except NeckflowError as exc:
        logger.warning(f"lambda={lam} failed: {exc}")
        return ClassifiedRun(
            lam=float(lam),
            outcome=Outcome.NUMERICAL_FAILURE,
            H_pole_max=float("nan"),
            T_est=float("nan"),
            error=str(exc),
        )


def run_many(lambdas: Iterable[float], n: int, control: StepControl, jobs: int = 1, b: float = 1.0) -> List[ClassifiedRun]:
    """Order-preserving classification of independent runs on up to ``jobs`` processes."""
    tasks = [(float(lam), n, control, b) for lam in lambdas]
    if jobs <= 1 or len(tasks) <= 1:
        return [_sweep_worker(task) for task in tasks]
    with Pool(processes=min(jobs, len(tasks))) as pool:
        return pool.map(_sweep_worker, tasks)


def sweep(lambdas: Iterable[float], n: int, control: Optional[StepControl] = None, jobs: int = 1, b: float = 1.0) -> List[ClassifiedRun]:
    lambdas = [float(lam) for lam in lambdas]
    bad = [lam for lam in lambdas if not 0.0 <= lam < 1.0]
    if bad:
        raise DomainError(f"sweep values outside [0, 1): {bad}")
    control = control if control is not None else StepControl.for_scale(b)
    logger.info(f"Sweeping {len(lambdas)} shape parameters at n={n} with {jobs} job(s)")
    runs = run_many(lambdas, n, control, jobs, b)
    logger.info(f"Sweep complete: {sum(r.supercritical for r in runs)} supercritical, "
                f"{sum(r.subcritical for r in runs)} subcritical")
    return runs


def sweep_frame(runs: Iterable[ClassifiedRun]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in runs], columns=SWEEP_COLUMNS)


def check_dichotomy(runs: Iterable[ClassifiedRun]) -> None:
    """Raise if some supercritical run has a smaller lambda than a subcritical one."""
    runs = list(runs)
    sub = [r.lam for r in runs if r.subcritical]
    sup = [r.lam for r in runs if r.supercritical]
    if sub and sup and min(sup) < max(sub):
        raise MonotonicityViolation(
            f"supercritical lambda={min(sup)} below subcritical lambda={max(sub)}",
            lambdas=(min(sup), max(sub)),
        )
