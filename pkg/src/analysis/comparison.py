"""Comparisons of rescaled flow profiles with the translating soliton."""
from typing import Iterable, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import PchipInterpolator

from src.analysis.rescaling import RescaledCurve, pole_blowup
from src.geometry.profile import Pole, ProfileCurve
from src.soliton.bowl import SolitonCurve, solve_soliton
from src.utils.errors import DomainError

COMPARISON_POINTS = 401


def _common_grid(rc: RescaledCurve, sol: SolitonCurve, x_window: float, points: int) -> tuple:
    graph = rc.graph_part()
    if graph.x.size < 4 or graph.x[0] > 0.0 or graph.x[-1] < x_window:
        raise DomainError(f"rescaled curve does not cover [0, {x_window}] as a graph")
    if sol.x[-1] < x_window:
        raise DomainError(f"soliton sampled only up to x = {sol.x[-1]:.3g} < {x_window}")
    xs = np.linspace(0.0, x_window, points)
    y_flow = PchipInterpolator(graph.x, graph.y)(xs)
    y_model = PchipInterpolator(sol.x, sol.y)(xs)
    return xs, y_flow, y_model


def compare_to_soliton(
    rc: RescaledCurve, sol: SolitonCurve, x_window: float, points: int = COMPARISON_POINTS
) -> Tuple[float, float]:
    """(max, RMS) of |y_flow − y_soliton| on a common grid over [0, x_window]."""
    _, y_flow, y_model = _common_grid(rc, sol, x_window, points)
    diff = np.abs(y_flow - y_model)
    return float(np.max(diff)), float(np.sqrt(np.mean(diff ** 2)))


def comparison_frame(
    rc: RescaledCurve, sol: SolitonCurve, x_window: float, points: int = COMPARISON_POINTS
) -> pd.DataFrame:
    xs, y_flow, y_model = _common_grid(rc, sol, x_window, points)
    return pd.DataFrame({"x": xs, "y_flow": y_flow, "y_model": y_model})


def distance_series(
    snapshots: Iterable[RescaledCurve], sol: SolitonCurve, x_window: float
) -> pd.DataFrame:
    """One ``t,Linf,L2`` row per rescaled snapshot."""
    rows = []
    for rc in snapshots:
        linf, l2 = compare_to_soliton(rc, sol, x_window)
        rows.append({"t": rc.source_time, "Linf": linf, "L2": l2})
    return pd.DataFrame(rows, columns=["t", "Linf", "L2"])


def mean_curvature_comparison(snapshots: Iterable[RescaledCurve], sol: SolitonCurve) -> pd.DataFrame:
    """Long table ``curve,t,x,H`` of H(x) per snapshot plus the soliton reference."""
    frames = []
    for k, rc in enumerate(snapshots):
        if rc.H is None:
            raise DomainError("mean curvature comparison needs rescaled curves carrying H")
        graph = rc.graph_part()
        frames.append(pd.DataFrame({"curve": f"snap_{k}", "t": rc.source_time, "x": graph.x, "H": graph.H}))
    frames.append(pd.DataFrame({"curve": "soliton", "t": np.nan, "x": sol.x, "H": sol.H}))
    return pd.concat(frames, ignore_index=True)


def tip_matched_comparison(
    curve: ProfileCurve, x_window: float, pole: Pole = "left", tol: float = 1e-10
) -> pd.DataFrame:
    """Unscaled pole cap against the soliton whose speed equals the tip mean curvature."""
    rc = pole_blowup(curve, pole)
    c = rc.scale
    sol = solve_soliton(c, x_extent=1.5 * x_window, tol=tol)
    unscaled = RescaledCurve(x=rc.x / c, y=rc.y / c, scale=1.0, source_time=rc.source_time)
    frame = comparison_frame(unscaled, sol, x_window)
    frame.insert(0, "c", c)
    return frame
