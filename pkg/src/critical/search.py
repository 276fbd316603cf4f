"""Bisection for the critical shape parameter."""
from dataclasses import dataclass, field
from typing import List, Optional

from src.critical.classify import ClassifiedRun, check_dichotomy, run_many
from src.evolution.control import StepControl
from src.evolution.trace import Outcome
from src.utils.errors import BracketError, DomainError, MonotonicityViolation, NumericalFailure
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_TOL_LAMBDA = 1e-5


@dataclass(frozen=True)
class CriticalEstimate:
    lambda_lo: float
    lambda_hi: float
    iterations: int
    n_grid: int
    runs: List[ClassifiedRun] = field(default_factory=list)

    def __post_init__(self):
        if not self.lambda_lo < self.lambda_hi:
            raise ValueError("lambda_lo must be below lambda_hi")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lambda_lo + self.lambda_hi)

    def as_dict(self) -> dict:
        return {
            "lambda_lo": self.lambda_lo,
            "lambda_hi": self.lambda_hi,
            "iterations": self.iterations,
            "n_grid": self.n_grid,
            "runs": [r.as_row() for r in self.runs],
        }


def _classify_all(lambdas: list, n: int, control: StepControl, jobs: int, b: float) -> List[ClassifiedRun]:
    runs = run_many(lambdas, n, control, jobs, b)
    for run in runs:
        if run.outcome is Outcome.NUMERICAL_FAILURE:
            raise NumericalFailure(run.error or f"lambda={run.lam}: numerical failure")
    return runs


def bisect_critical(
    lo: float,
    hi: float,
    tol_lambda: float,
    n: int,
    control: Optional[StepControl] = None,
    jobs: int = 1,
    b: float = 1.0,
) -> CriticalEstimate:
    """Bisect on the shrink/pinch dichotomy until hi − lo ≤ tol_lambda.

    A midpoint that neither shrinks nor pinches cleanly is resolved by its
    neighbours at mid ± tol_lambda/4. Agreeing neighbours move the bracket as
    their common class would and a shrink/pinch pair closes it. A pinch/shrink
    pair is a monotonicity violation.
    """
    if not 0.0 <= lo < hi < 1.0:
        raise DomainError(f"need 0 <= lo < hi < 1, got lo={lo}, hi={hi}")
    if tol_lambda < MIN_TOL_LAMBDA:
        raise DomainError(f"tol_lambda must be at least {MIN_TOL_LAMBDA:g}, got {tol_lambda}")
    control = control if control is not None else StepControl.for_scale(b)

    runs = _classify_all([lo, hi], n, control, jobs, b)
    run_lo, run_hi = runs
    if not (run_lo.subcritical and run_hi.supercritical):
        raise BracketError(
            f"endpoints do not bracket the transition: lambda={lo} -> {run_lo.outcome.value}, "
            f"lambda={hi} -> {run_hi.outcome.value}"
        )

    iterations = 0
    while hi - lo > tol_lambda:
        mid = 0.5 * (lo + hi)
        run = _classify_all([mid], n, control, 1, b)[0]
        runs.append(run)
        iterations += 1
        if run.subcritical:
            lo = mid
        elif run.supercritical:
            hi = mid
        else:
            logger.warning(f"lambda={mid:.8g} is a critical candidate ({run.outcome.value}); checking neighbours")
            below, above = _classify_all([mid - 0.25 * tol_lambda, mid + 0.25 * tol_lambda], n, control, jobs, b)
            runs.extend([below, above])
            if below.supercritical and above.subcritical:
                raise MonotonicityViolation(
                    f"pinch at {below.lam} but shrink at {above.lam}", lambdas=(below.lam, above.lam)
                )
            if below.subcritical and above.subcritical:
                lo = above.lam
            elif below.supercritical and above.supercritical:
                hi = below.lam
            elif below.subcritical or above.supercritical:
                if below.subcritical:
                    lo = below.lam
                if above.supercritical:
                    hi = above.lam
            else:
                raise BracketError(f"critical candidate at lambda={mid} could not be resolved by its neighbours")
        check_dichotomy(runs)
        logger.info(f"bisection {iterations}: [{lo:.8g}, {hi:.8g}]")

    return CriticalEstimate(lambda_lo=lo, lambda_hi=hi, iterations=iterations, n_grid=n, runs=runs)
