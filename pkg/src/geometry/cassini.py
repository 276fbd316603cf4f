"""Cassini-oval generator curves for the dumbbell family."""
from dataclasses import dataclass

import numpy as np

from src.geometry.profile import ProfileCurve, cell_centers
from src.utils.errors import ConstructionError, InvalidShapeError

MIN_GRID_POINTS = 16
CONVEXITY_THRESHOLD = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class CassiniShape:
    """Single-loop Cassini oval (x²+y²+a²)² − 4a²x² − b⁴ = 0.

    ``a`` is the focal half-distance and ``b`` the root of the distance
    product; the shape parameter is ``lam = a / b``.
    """

    a: float
    b: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.a) or not np.isfinite(self.b):
            raise InvalidShapeError(f"non-finite Cassini parameters a={self.a}, b={self.b}")
        if self.b <= 0.0:
            raise InvalidShapeError(f"b must be positive, got {self.b}")
        if self.a < 0.0:
            raise InvalidShapeError(f"a must be non-negative, got {self.a}")
        if self.a >= self.b:
            raise InvalidShapeError(
                f"lambda = {self.a / self.b:.6g} >= 1: the oval splits or pinches at the origin"
            )

    @classmethod
    def from_lambda(cls, lam: float, b: float = 1.0) -> "CassiniShape":
        if not 0.0 <= lam < 1.0:
            raise InvalidShapeError(f"lambda must satisfy 0 <= lambda < 1, got {lam}")
        return cls(a=lam * b, b=b)

    @property
    def lam(self) -> float:
        return self.a / self.b

    @property
    def x_max(self) -> float:
        return float(np.hypot(self.a, self.b))

    @property
    def waist_radius(self) -> float:
        return float(np.sqrt(self.b ** 2 - self.a ** 2))

    def quartic_residual(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        a2, b4 = self.a ** 2, self.b ** 4
        return (x ** 2 + y ** 2 + a2) ** 2 - 4.0 * a2 * x ** 2 - b4


def cassini_profile(shape: CassiniShape, n: int) -> ProfileCurve:
    """Sample the upper half of the oval on the cell-centred angular grid.

    Uses the chart S = −x_max·cos θ. The radius is evaluated in the factored
    form R² = x_max² sin²θ (b² + S² − a²) / (√(b⁴ + 4a²S²) + S² + a²), which
    equals √(b⁴+4a²S²) − S² − a² without cancellation at the poles.
    """
    if n < MIN_GRID_POINTS:
        raise InvalidShapeError(f"n must be at least {MIN_GRID_POINTS}, got {n}")

    theta = cell_centers(n)
    a2, b2 = shape.a ** 2, shape.b ** 2
    x_max = shape.x_max

    S = -x_max * np.cos(theta)
    S2 = S ** 2
    root = np.sqrt(b2 ** 2 + 4.0 * a2 * S2)
    R = x_max * np.sin(theta) * np.sqrt((b2 + S2 - a2) / (root + S2 + a2))

    # mirror so the reflection symmetry holds to rounding
    S = 0.5 * (S - S[::-1])
    R = 0.5 * (R + R[::-1])

    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(R))):
        raise ConstructionError(f"non-finite Cassini profile for lambda={shape.lam}")
    if np.any(R <= 0.0):
        raise ConstructionError(f"non-positive radius in Cassini profile for lambda={shape.lam}")

    return ProfileCurve(S=S, R=R, t=0.0)
