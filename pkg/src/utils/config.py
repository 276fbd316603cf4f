"""Shared configuration management."""
import hashlib
import json
import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.utils.errors import ConfigError


class Config:
    """Environment-backed defaults for neckflow runs."""

    # Output
    OUTPUT_DIR = Path(os.getenv("NECKFLOW_OUT", "results"))
    LOG_LEVEL = os.getenv("NECKFLOW_LOG_LEVEL", "INFO")

    # Parallel runs
    JOBS = int(os.getenv("NECKFLOW_JOBS", "1"))

    # Grid and stepping
    GRID_POINTS = int(os.getenv("NECKFLOW_GRID_POINTS", "1000"))
    SAFETY = float(os.getenv("NECKFLOW_SAFETY", "0.1"))
    # step limit per squared grid size; the sphere needs about 2.4·n²
    STEP_BUDGET = int(os.getenv("NECKFLOW_STEP_BUDGET", "20"))

    # Near a singularity
    TRACE_GROWTH = 1.02
    SINGULAR_FRACTION = 0.5
    # convex runs stalling below this share of the round-sphere step end as ShrinksRound
    STALL_RATIO = 1e-2

    # Termination thresholds, in units of b
    EPS_PINCH = 1e-3
    EPS_EXTINCT = 1e-2
    A2_CAP = 1e8
    DT_MIN = 1e-14


class RunConfig(BaseModel):
    """Validated parameters of one evolution run.

    Thresholds left as ``None`` take the defaults of ``Config`` scaled by ``b``.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid", frozen=True)

    lam: float = Field(alias="lambda")
    b: float = 1.0
    n: int = Config.GRID_POINTS
    safety: float = Config.SAFETY
    eps_pinch: Optional[float] = None
    eps_extinct: Optional[float] = None
    a2_cap: Optional[float] = None
    dt_min: Optional[float] = None
    max_steps: Optional[int] = None
    trace_every: int = 10
    convex_every: int = 20
    log_every: int = 20000
    snapshot_cadence: float = 0.01
    snapshot_growth: float = 1.25
    max_snapshots: int = 400
    output_dir: Path = Config.OUTPUT_DIR
    deterministic: Literal[True] = True

    @field_validator("lam")
    @classmethod
    def _check_lambda(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError("must satisfy 0 <= lambda < 1")
        return v

    @field_validator("b")
    @classmethod
    def _check_b(cls, v: float) -> float:
        if not v > 0.0:
            raise ValueError("must be positive")
        return v

    @field_validator("n")
    @classmethod
    def _check_n(cls, v: int) -> int:
        if v < 16:
            raise ValueError("must be at least 16")
        return v

    @field_validator("safety")
    @classmethod
    def _check_safety(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError("must lie in (0, 1]")
        return v

    @field_validator("eps_pinch", "eps_extinct", "a2_cap", "dt_min", "snapshot_cadence")
    @classmethod
    def _check_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0.0:
            raise ValueError("must be positive")
        return v

    @field_validator("max_steps", "trace_every", "convex_every", "log_every", "max_snapshots")
    @classmethod
    def _check_count(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("snapshot_growth")
    @classmethod
    def _check_growth(cls, v: float) -> float:
        if not v > 1.0:
            raise ValueError("must exceed 1")
        return v

    @model_validator(mode="after")
    def _check_dt_min(self) -> "RunConfig":
        # dt_min must sit below the first CFL step on the initial grid scale
        if self.dt_min is not None:
            grid_scale = self.b * 3.141592653589793 / self.n
            if self.dt_min >= self.safety * grid_scale ** 2:
                raise ValueError("dt_min must be below safety * (b*pi/n)^2")
        return self

    @property
    def resolved_eps_pinch(self) -> float:
        return self.eps_pinch if self.eps_pinch is not None else Config.EPS_PINCH * self.b

    @property
    def resolved_eps_extinct(self) -> float:
        return self.eps_extinct if self.eps_extinct is not None else Config.EPS_EXTINCT * self.b

    @property
    def resolved_a2_cap(self) -> float:
        return self.a2_cap if self.a2_cap is not None else Config.A2_CAP / self.b ** 2

    @property
    def resolved_max_steps(self) -> int:
        return self.max_steps if self.max_steps is not None else Config.STEP_BUDGET * self.n ** 2

    @property
    def resolved_dt_min(self) -> float:
        return self.dt_min if self.dt_min is not None else Config.DT_MIN * self.b ** 2

    @classmethod
    def build(cls, **values) -> "RunConfig":
        """Validate ``values``, turning pydantic errors into ``ConfigError``."""
        try:
            return cls.model_validate(values)
        except ValidationError as exc:
            first = exc.errors()[0]
            field = str(first["loc"][0]) if first["loc"] else "config"
            if field == "lam":
                field = "lambda"
            raise ConfigError(field, first["msg"]) from exc

    def as_dict(self) -> dict:
        data = self.model_dump(by_alias=True, mode="json")
        data.pop("deterministic", None)
        return data

    def to_text(self) -> str:
        """Serialize to ``key = value`` lines; ``None`` fields are omitted."""
        lines = []
        for key, value in self.as_dict().items():
            if value is None:
                continue
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "RunConfig":
        """Parse ``key = value`` text; ``overrides`` (e.g. CLI flags) win over file values."""
        values = parse_key_values(text)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.build(**values)

    def content_hash(self) -> str:
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_key_values(text: str) -> dict:
    """Read flat ``key = value`` text with ``#`` comments."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        values[key] = value
    return values
