"""Discretized generator curves on the cell-centred angular grid.

Node i (1-based) sits at θ_i = (i − 1/2)·π/n. The poles θ = 0 and θ = π lie on
cell faces, half-way between the first/last interior node and its ghost. The
ghosts follow the reflection relations S_0 = S_1, R_0 = −R_1 (and the mirrored
pair at θ = π), which make S even and R odd about each pole.
"""
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import pandas as pd

from src.utils.errors import ConstructionError, SingularCurveError

Pole = Literal["left", "right"]

_POLE_WEIGHTS = np.array([75.0 / 64.0, -25.0 / 128.0, 3.0 / 128.0])


def cell_centers(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) * np.pi / n


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """Sampled (S, R) generator curve at flow time ``t``."""

    S: np.ndarray
    R: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        R = np.array(self.R, dtype=float)
        if S.ndim != 1 or S.shape != R.shape:
            raise ConstructionError(f"S and R must be 1-D arrays of equal length, got {S.shape} and {R.shape}")
        if not (np.all(np.isfinite(S)) and np.all(np.isfinite(R))):
            raise ConstructionError("profile curve contains non-finite entries")
        S.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return int(self.S.size)

    @property
    def dtheta(self) -> float:
        return np.pi / self.n

    @property
    def theta(self) -> np.ndarray:
        return cell_centers(self.n)

    @property
    def is_regular(self) -> bool:
        return bool(np.all(self.R > 0.0))

    def require_regular(self) -> None:
        if not self.is_regular:
            i = int(np.argmin(self.R))
            raise SingularCurveError(f"R[{i}] = {self.R[i]:.3e} <= 0 at t = {self.t:.6g}")

    def scaled(self, factor: float) -> "ProfileCurve":
        """Parabolic rescaling: lengths by ``factor``, time by ``factor²``."""
        return ProfileCurve(S=self.S * factor, R=self.R * factor, t=self.t * factor ** 2)

    def mirrored(self) -> "ProfileCurve":
        """The reflection x → −x, re-ordered so S still increases with θ."""
        return ProfileCurve(S=-self.S[::-1], R=self.R[::-1].copy(), t=self.t)

    def symmetry_defect(self) -> float:
        return float(max(np.max(np.abs(self.R - self.R[::-1])), np.max(np.abs(self.S + self.S[::-1]))))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"theta": self.theta, "S": self.S, "R": self.R})

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, t: float = 0.0) -> "ProfileCurve":
        missing = {"S", "R"} - set(frame.columns)
        if missing:
            raise ConstructionError(f"profile table lacks columns {sorted(missing)}")
        return cls(S=frame["S"].to_numpy(), R=frame["R"].to_numpy(), t=t)


class Derivatives(NamedTuple):
    S1: np.ndarray
    R1: np.ndarray
    S2: np.ndarray
    R2: np.ndarray


def with_ghosts(S: np.ndarray, R: np.ndarray) -> tuple:
    """Pad with the fictitious points θ_0 and θ_{n+1}."""
    S_ext = np.concatenate(([S[0]], S, [S[-1]]))
    R_ext = np.concatenate(([-R[0]], R, [-R[-1]]))
    return S_ext, R_ext


def centered_derivatives(S: np.ndarray, R: np.ndarray, dtheta: float) -> Derivatives:
    """Second-order centred first and second θ-derivatives."""
    S_ext, R_ext = with_ghosts(S, R)
    inv2h = 0.5 / dtheta
    invh2 = 1.0 / dtheta ** 2
    S1 = (S_ext[2:] - S_ext[:-2]) * inv2h
    R1 = (R_ext[2:] - R_ext[:-2]) * inv2h
    S2 = (S_ext[2:] - 2.0 * S + S_ext[:-2]) * invh2
    R2 = (R_ext[2:] - 2.0 * R + R_ext[:-2]) * invh2
    return Derivatives(S1, R1, S2, R2)


def pole_value(values: np.ndarray, pole: Pole = "left") -> float:
    """Even extrapolation of a nodal quantity to a pole.

    Interpolates v as a quadratic in θ² (θ measured from the pole) through
    the three nodes nearest the pole and returns its value at θ = 0. The
    nodes sit at θ² = (1/4, 9/4, 25/4)·Δθ², so the Lagrange weights at the
    pole do not depend on Δθ.
    """
    v = np.asarray(values, dtype=float)
    near = v[:3] if pole == "left" else v[:-4:-1]
    return float(np.dot(_POLE_WEIGHTS, near))


def pole_position(curve: ProfileCurve, pole: Pole = "left") -> float:
    """Axial coordinate of the pole, from the even extension of S."""
    return pole_value(curve.S, pole)


def neck_index(R: np.ndarray) -> int:
    """Index of the neck: the smallest interior local minimum of R.

    Nodes adjacent to the poles are excluded; without any interior local
    minimum the central node is returned. This is the interior R_min of the
    trace and of the step-size bound.
    """
    inner = R[1:-1]
    is_min = (inner <= R[:-2]) & (inner <= R[2:])
    candidates = np.flatnonzero(is_min) + 1
    if candidates.size == 0:
        return R.size // 2
    return int(candidates[np.argmin(R[candidates])])
