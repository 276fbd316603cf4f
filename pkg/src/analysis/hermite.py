"""Monic Hermite polynomials Hm_m(x) = H_m(x) / 2^m."""
import numpy as np
from numpy.polynomial import hermite as phys_hermite
from numpy.polynomial import polynomial as poly

from src.utils.errors import DomainError


def hermite(m: int) -> np.ndarray:
    """Monomial coefficients of Hm_m in ascending order; the x^m coefficient is 1."""
    if int(m) != m or m < 0:
        raise DomainError(f"Hermite order must be a non-negative integer, got {m}")
    m = int(m)
    selector = np.zeros(m + 1)
    selector[m] = 1.0
    coefficients = phys_hermite.herm2poly(selector) / 2.0 ** m
    return coefficients


def hermite_eval(m: int, x) -> np.ndarray:
    return poly.polyval(np.asarray(x, dtype=float), hermite(m))
