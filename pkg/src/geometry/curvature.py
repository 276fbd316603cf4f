"""Pointwise and integral geometry of surfaces of revolution about the x-axis."""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd

from src.geometry.profile import Derivatives, ProfileCurve, centered_derivatives, pole_position

DIAMETER_SAMPLES = 512
SURFACE_DIMENSION = 2


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Principal curvatures and the quantities derived from them, per node."""

    kappa_u: np.ndarray
    kappa_phi: np.ndarray

    @cached_property
    def H(self) -> np.ndarray:
        return self.kappa_u + self.kappa_phi

    @cached_property
    def A2(self) -> np.ndarray:
        return self.kappa_u ** 2 + self.kappa_phi ** 2

    @property
    def Rsc(self) -> np.ndarray:
        return 2.0 * self.kappa_u * self.kappa_phi

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "kappa_u": self.kappa_u,
                "kappa_phi": self.kappa_phi,
                "H": self.H,
                "A2": self.A2,
                "Rsc": self.Rsc,
            }
        )


def curvatures_from_derivatives(d: Derivatives, R: np.ndarray) -> tuple:
    """Return (kappa_u, kappa_phi, g_uu, sqrt(g_uu)) from precomputed θ-derivatives."""
    g = d.S1 ** 2 + d.R1 ** 2
    sqrt_g = np.sqrt(g)
    kappa_u = (d.R1 * d.S2 - d.S1 * d.R2) / (g * sqrt_g)
    kappa_phi = d.S1 / (R * sqrt_g)
    return kappa_u, kappa_phi, g, sqrt_g


def principal_curvatures(S: np.ndarray, R: np.ndarray, dtheta: float) -> tuple:
    """Return (kappa_u, kappa_phi, g_uu) from raw arrays; no regularity check."""
    kappa_u, kappa_phi, g, _ = curvatures_from_derivatives(centered_derivatives(S, R, dtheta), R)
    return kappa_u, kappa_phi, g


def curvatures(curve: ProfileCurve) -> CurvatureField:
    curve.require_regular()
    kappa_u, kappa_phi, _ = principal_curvatures(curve.S, curve.R, curve.dtheta)
    return CurvatureField(kappa_u=kappa_u, kappa_phi=kappa_phi)


def scalar_curvature_defect(field: CurvatureField) -> float:
    """max |(H² − |A|²) − 2κ_uκ_φ|; zero up to rounding."""
    return float(np.max(np.abs(field.H ** 2 - field.A2 - field.Rsc)))


def curvature_frame(curve: ProfileCurve, field: Optional[CurvatureField] = None) -> pd.DataFrame:
    field = field if field is not None else curvatures(curve)
    return pd.concat([curve.to_frame(), field.to_frame()], axis=1)


def is_convex(field: CurvatureField, tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = 1e-10 * float(np.max(np.abs(field.H)))
    return bool(np.all(field.kappa_u >= -tol) and np.all(field.kappa_phi >= -tol))


class IntegralQuantities(NamedTuple):
    area: float
    volume: float
    diameter: float


def surface_area(S: np.ndarray, R: np.ndarray, dtheta: float, g: Optional[np.ndarray] = None) -> float:
    """2π ∫ R √g dθ; pass the metric ``g`` when it is already at hand."""
    if g is None:
        d = centered_derivatives(S, R, dtheta)
        g = d.S1 ** 2 + d.R1 ** 2
    return float(2.0 * np.pi * np.sum(R * np.sqrt(g)) * dtheta)


def diameter(curve: ProfileCurve) -> float:
    """Largest distance between two surface points, on a decimated profile.

    Two points of the surface at axial positions x₁, x₂ and radii y₁, y₂ are
    farthest apart on opposite meridians: √((x₁−x₂)² + (y₁+y₂)²). Both poles
    are included as points on the axis.
    """
    step = max(1, int(np.ceil(curve.n / DIAMETER_SAMPLES)))
    x = np.concatenate(([pole_position(curve, "left")], curve.S[::step], [pole_position(curve, "right")]))
    y = np.concatenate(([0.0], curve.R[::step], [0.0]))
    d2 = (x[:, None] - x[None, :]) ** 2 + (y[:, None] + y[None, :]) ** 2
    return float(np.sqrt(np.max(d2)))


def integral_quantities(curve: ProfileCurve) -> IntegralQuantities:
    curve.require_regular()
    d = centered_derivatives(curve.S, curve.R, curve.dtheta)
    area = surface_area(curve.S, curve.R, curve.dtheta, d.S1 ** 2 + d.R1 ** 2)
    volume = np.pi * np.sum(curve.R ** 2 * d.S1) * curve.dtheta
    return IntegralQuantities(area=area, volume=float(volume), diameter=diameter(curve))


def extinction_bounds(curve: ProfileCurve) -> tuple:
    """Lower and upper bounds on the extinction time: 2V²/A² ≤ T ≤ diam²/(8·2)."""
    q = integral_quantities(curve)
    t_lower = 2.0 * q.volume ** 2 / q.area ** 2
    t_upper = q.diameter ** 2 / (8.0 * SURFACE_DIMENSION)
    return t_lower, t_upper
