"""Diagnostics recorded along a flow and the classified outcome."""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

TRACE_COLUMNS = ["t", "H_max", "H_pole", "R_min", "R_max", "convex", "dt", "H_center", "area"]


class Outcome(str, Enum):
    SHRINKS_ROUND = "ShrinksRound"
    CENTRAL_NECKPINCH = "CentralNeckpinch"
    CURVATURE_BLOWUP = "CurvatureBlowup"
    STEP_LIMIT = "StepLimit"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class TraceRecord:
    t: float
    H_max: float
    H_pole: float
    R_min: float
    R_max: float
    convex: bool
    dt: float
    H_center: float = float("nan")
    area: float = float("nan")


@dataclass
class FlowTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records and not record.t > self.records[-1].t:
            raise ValueError(f"trace time must increase: {record.t} after {self.records[-1].t}")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def last(self) -> TraceRecord:
        return self.records[-1]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([r.__dict__ for r in self.records], columns=TRACE_COLUMNS)
        frame["convex"] = frame["convex"].astype(bool)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "FlowTrace":
        trace = cls()
        for row in frame.to_dict(orient="records"):
            values = {k: row[k] for k in TRACE_COLUMNS if k in row}
            values["convex"] = _as_bool(values["convex"])
            trace.records.append(TraceRecord(**values))
        return trace


def _as_bool(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("true", "1")
    return bool(value)


@dataclass(frozen=True)
class TerminationReport:
    outcome: Outcome
    T_est: float
    pinch_location: Optional[float] = None
    steps: int = 0
    message: str = ""

    def __post_init__(self):
        has_location = self.pinch_location is not None
        if has_location != (self.outcome is Outcome.CENTRAL_NECKPINCH):
            raise ValueError("pinch_location is set exactly for CentralNeckpinch outcomes")

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "T_est": self.T_est,
            "pinch_location": self.pinch_location,
            "steps": self.steps,
            "message": self.message,
        }
