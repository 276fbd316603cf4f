"""Graph-form descriptions of the profile and of the reduced flow."""
import numpy as np

from src.geometry.profile import ProfileCurve


def horizontal_graph(curve: ProfileCurve) -> tuple:
    """(x, y) nodes where the profile is a graph y(x), i.e. where S increases."""
    S, R = curve.S, curve.R
    increasing = np.concatenate(([True], np.diff(S) > 0.0))
    keep = np.logical_and.accumulate(increasing)
    return S[keep].copy(), R[keep].copy()


def horizontal_graph_velocity(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """∂y/∂t = y″/(1 + y′²) − 1/y on a sampled horizontal graph."""
    y1 = np.gradient(y, x, edge_order=2)
    y2 = np.gradient(y1, x, edge_order=2)
    return y2 / (1.0 + y1 ** 2) - 1.0 / y


def vertical_graph_velocity(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """∂x/∂t = x″/(1 + x′²) + x′/y on a sampled vertical graph x(y)."""
    x1 = np.gradient(x, y, edge_order=2)
    x2 = np.gradient(x1, y, edge_order=2)
    return x2 / (1.0 + x1 ** 2) + x1 / y
