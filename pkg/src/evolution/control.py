"""Adaptive step policy and termination thresholds."""
from dataclasses import dataclass
from typing import Optional

from src.utils.config import Config, RunConfig
from src.utils.errors import ConfigError


@dataclass(frozen=True)
class StepControl:
    """Step policy for one run.

    ``max_steps`` left as ``None`` means ``Config.STEP_BUDGET·n²``. Besides
    every ``trace_every`` steps, the trace gains a record whenever H_max has
    grown, or the neck radius shrunk, by ``trace_growth`` since the last one.
    The curvature and neck-radius bounds on dt are scaled by
    ``singular_fraction``. A convex surface whose step falls below
    ``stall_ratio`` times the step of a round sphere of radius R_max is
    classified as shrinking round.
    """

    safety: float = Config.SAFETY
    dt_min: float = Config.DT_MIN
    eps_pinch: float = Config.EPS_PINCH
    eps_extinct: float = Config.EPS_EXTINCT
    a2_cap: float = Config.A2_CAP
    max_steps: Optional[int] = None
    trace_every: int = 10
    trace_growth: float = Config.TRACE_GROWTH
    singular_fraction: float = Config.SINGULAR_FRACTION
    stall_ratio: float = Config.STALL_RATIO
    convex_every: int = 20
    log_every: int = 20000
    snapshot_cadence: float = 0.01
    snapshot_growth: float = 1.25
    max_snapshots: int = 400

    def __post_init__(self):
        if not 0.0 < self.safety <= 1.0:
            raise ConfigError("safety", f"must lie in (0, 1], got {self.safety}")
        for name in ("dt_min", "eps_pinch", "eps_extinct", "a2_cap", "snapshot_cadence"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(name, f"must be positive, got {getattr(self, name)}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("max_steps", f"must be a positive integer, got {self.max_steps}")
        for name in ("trace_every", "convex_every", "log_every", "max_snapshots"):
            if getattr(self, name) < 1:
                raise ConfigError(name, f"must be a positive integer, got {getattr(self, name)}")
        for name in ("snapshot_growth", "trace_growth"):
            if not getattr(self, name) > 1.0:
                raise ConfigError(name, f"must exceed 1, got {getattr(self, name)}")
        if not 0.0 < self.singular_fraction <= 1.0:
            raise ConfigError("singular_fraction", f"must lie in (0, 1], got {self.singular_fraction}")
        if not 0.0 < self.stall_ratio < 1.0:
            raise ConfigError("stall_ratio", f"must lie in (0, 1), got {self.stall_ratio}")

    def step_limit(self, n: int) -> int:
        return self.max_steps if self.max_steps is not None else Config.STEP_BUDGET * n ** 2

    @classmethod
    def for_scale(cls, b: float = 1.0, **overrides) -> "StepControl":
        """Defaults with thresholds scaled to the length unit ``b``."""
        values = dict(
            dt_min=Config.DT_MIN * b ** 2,
            eps_pinch=Config.EPS_PINCH * b,
            eps_extinct=Config.EPS_EXTINCT * b,
            a2_cap=Config.A2_CAP / b ** 2,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def from_config(cls, config: RunConfig) -> "StepControl":
        return cls(
            safety=config.safety,
            dt_min=config.resolved_dt_min,
            eps_pinch=config.resolved_eps_pinch,
            eps_extinct=config.resolved_eps_extinct,
            a2_cap=config.resolved_a2_cap,
            max_steps=config.resolved_max_steps,
            trace_every=config.trace_every,
            convex_every=config.convex_every,
            log_every=config.log_every,
            snapshot_cadence=config.snapshot_cadence,
            snapshot_growth=config.snapshot_growth,
            max_snapshots=config.max_snapshots,
        )
