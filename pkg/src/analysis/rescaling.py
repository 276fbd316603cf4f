"""Blow-up rescalings of profile curves at a pole and at the neck."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.evolution.stepper import pole_mean_curvature
from src.geometry.curvature import curvatures
from src.geometry.profile import Pole, ProfileCurve, neck_index, pole_position
from src.soliton.bowl import SolitonCurve
from src.utils.errors import DomainError


@dataclass(frozen=True, eq=False)
class RescaledCurve:
    """A dilated and translated generator, with optional rescaled mean curvature."""

    x: np.ndarray
    y: np.ndarray
    scale: float
    source_time: float
    H: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.scale > 0.0:
            raise DomainError(f"rescaling factor must be positive, got {self.scale}")

    @classmethod
    def from_soliton(cls, sol: SolitonCurve) -> "RescaledCurve":
        return cls(x=sol.x.copy(), y=sol.y.copy(), scale=1.0, source_time=float("nan"), H=sol.H)

    def graph_part(self) -> "RescaledCurve":
        """Leading stretch on which x strictly increases (a horizontal graph y(x))."""
        increasing = np.concatenate(([True], np.diff(self.x) > 0.0))
        keep = np.logical_and.accumulate(increasing)
        H = self.H[keep] if self.H is not None else None
        return RescaledCurve(self.x[keep], self.y[keep], self.scale, self.source_time, H)


def pole_blowup(curve: ProfileCurve, pole: Pole = "left") -> RescaledCurve:
    """Dilate by ε = H(pole) about the pole so the rescaled tip curvature is 1.

    The right pole is handled on the mirrored curve, so either cap opens
    towards +x with its tip at the origin. The pole itself is prepended as
    the sample (0, 0).
    """
    work = curve if pole == "left" else curve.mirrored()
    eps = pole_mean_curvature(work, "left")
    if not eps > 0.0:
        raise DomainError(f"pole mean curvature must be positive, got {eps}")
    s_pole = pole_position(work, "left")
    x = np.concatenate(([0.0], eps * (work.S - s_pole)))
    y = np.concatenate(([0.0], eps * work.R))
    H = np.concatenate(([1.0], curvatures(work).H / eps))
    return RescaledCurve(x=x, y=y, scale=float(eps), source_time=curve.t, H=H)


def cylinder_rescale(curve: ProfileCurve, T: float) -> RescaledCurve:
    """Parabolic rescaling about the neck: x̃ = (S − S_neck)/√(T−t), ỹ = R/√(T−t)."""
    if not T > curve.t:
        raise DomainError(f"singular time T = {T} must exceed curve time t = {curve.t}")
    root = np.sqrt(T - curve.t)
    i = neck_index(curve.R)
    return RescaledCurve(
        x=(curve.S - curve.S[i]) / root,
        y=curve.R / root,
        scale=float(1.0 / root),
        source_time=curve.t,
    )


def neck_rescaled_radius(curve: ProfileCurve, T: float) -> float:
    rc = cylinder_rescale(curve, T)
    return float(rc.y[neck_index(curve.R)])
