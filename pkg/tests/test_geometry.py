import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose


def test_sphere_profile_is_unit_circle():
    from src.geometry.cassini import CassiniShape, cassini_profile
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 200)
    assert_allclose(curve.S ** 2 + curve.R ** 2, 1.0, atol=1e-14)
    assert curve.t == 0.0
    assert curve.n == 200


@pytest.mark.parametrize("lam", [0.3, 0.7, 0.9, 0.96])
def test_cassini_profile_lies_on_quartic(lam):
    from src.geometry.cassini import CassiniShape, cassini_profile
    shape = CassiniShape.from_lambda(lam, b=1.5)
    curve = cassini_profile(shape, 300)
    assert_allclose(shape.quartic_residual(curve.S, curve.R), 0.0, atol=1e-12)
    assert np.all(curve.R > 0.0)
    assert np.all(np.diff(curve.S) > 0.0)


def test_cassini_profile_is_mirror_symmetric():
    from src.geometry.cassini import CassiniShape, cassini_profile
    curve = cassini_profile(CassiniShape.from_lambda(0.9), 257)
    assert curve.symmetry_defect() <= 1e-15


def test_waist_and_extent():
    from src.geometry.cassini import CassiniShape
    shape = CassiniShape.from_lambda(0.6, b=2.0)
    assert_allclose(shape.x_max, np.hypot(1.2, 2.0))
    assert_allclose(shape.waist_radius, np.sqrt(4.0 - 1.44))
    assert_allclose(shape.lam, 0.6)


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (1.2, 1.0), (-0.1, 1.0), (0.5, 0.0), (0.5, -1.0), (np.inf, 1.0)])
def test_invalid_cassini_parameters(a, b):
    from src.geometry.cassini import CassiniShape
    from src.utils.errors import InvalidShapeError
    with pytest.raises(InvalidShapeError):
        CassiniShape(a=a, b=b)


def test_lambda_at_or_above_one_is_rejected():
    from src.geometry.cassini import CassiniShape
    with pytest.raises(ValueError):
        CassiniShape.from_lambda(1.0)


def test_grid_too_coarse():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.utils.errors import InvalidShapeError
    with pytest.raises(InvalidShapeError):
        cassini_profile(CassiniShape.from_lambda(0.5), 8)


def test_profile_rejects_non_finite():
    from src.geometry.profile import ProfileCurve
    from src.utils.errors import ConstructionError
    with pytest.raises(ConstructionError):
        ProfileCurve(S=np.array([0.0, np.nan]), R=np.array([1.0, 1.0]))
    with pytest.raises(ConstructionError):
        ProfileCurve(S=np.zeros(3), R=np.ones(4))


def test_singular_curve_requires_positive_radius():
    from src.geometry.curvature import curvatures
    from src.geometry.profile import ProfileCurve
    from src.utils.errors import SingularCurveError
    curve = ProfileCurve(S=np.linspace(-1, 1, 20), R=np.concatenate((np.ones(10), [0.0], np.ones(9))))
    assert not curve.is_regular
    with pytest.raises(SingularCurveError):
        curvatures(curve)


def test_profile_frame_roundtrip():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.profile import ProfileCurve
    curve = cassini_profile(CassiniShape.from_lambda(0.8), 64)
    frame = curve.to_frame()
    assert list(frame.columns) == ["theta", "S", "R"]
    back = ProfileCurve.from_frame(frame, t=0.5)
    assert_allclose(back.S, curve.S)
    assert_allclose(back.R, curve.R)
    assert back.t == 0.5


def test_sphere_curvatures():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures, is_convex
    field = curvatures(cassini_profile(CassiniShape.from_lambda(0.0), 400))
    assert_allclose(field.kappa_u, 1.0, rtol=1e-3)
    assert_allclose(field.kappa_phi, 1.0, rtol=1e-3)
    assert_allclose(field.H, 2.0, rtol=1e-3)
    assert is_convex(field)


def test_sphere_evolution_velocity_is_normal():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.evolution.stepper import evaluate_flow
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 200)
    ev = evaluate_flow(curve.S, curve.R, curve.dtheta)
    assert_allclose(ev.dS, -2.0 * curve.S, atol=1e-3)
    assert_allclose(ev.dR, -2.0 * curve.R, atol=1e-3)


@pytest.mark.parametrize("lam,convex", [(0.3, True), (0.65, True), (0.70, True), (0.72, False),
                                        (0.8, False), (0.95, False)])
def test_convexity_threshold(lam, convex):
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures, is_convex
    field = curvatures(cassini_profile(CassiniShape.from_lambda(lam), 400))
    assert is_convex(field) is convex


def test_scalar_curvature_identity():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures, scalar_curvature_defect
    field = curvatures(cassini_profile(CassiniShape.from_lambda(0.9), 300))
    assert scalar_curvature_defect(field) < 1e-9 * float(np.max(field.H ** 2))


def test_curvature_frame_columns():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvature_frame
    frame = curvature_frame(cassini_profile(CassiniShape.from_lambda(0.5), 32))
    assert list(frame.columns) == ["theta", "S", "R", "kappa_u", "kappa_phi", "H", "A2", "Rsc"]
    assert len(frame) == 32


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.2, max_value=5.0))
def test_curvature_scales_inversely_with_length(factor):
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures
    curve = cassini_profile(CassiniShape.from_lambda(0.5), 64)
    H = curvatures(curve).H
    H_scaled = curvatures(curve.scaled(factor)).H
    assert_allclose(H_scaled * factor, H, rtol=1e-9, atol=1e-9)


def test_sphere_integral_quantities_and_bounds():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import extinction_bounds, integral_quantities
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 400)
    q = integral_quantities(curve)
    assert_allclose(q.area, 4.0 * np.pi, rtol=1e-3)
    assert_allclose(q.volume, 4.0 * np.pi / 3.0, rtol=1e-3)
    assert_allclose(q.diameter, 2.0, rtol=1e-3)
    lower, upper = extinction_bounds(curve)
    assert_allclose(lower, 2.0 / 9.0, rtol=2e-3)
    assert_allclose(upper, 0.25, rtol=2e-3)


def test_pole_value_extrapolates_even_functions():
    from src.geometry.profile import cell_centers, pole_value
    n = 200
    theta = cell_centers(n)
    assert_allclose(pole_value(np.cos(theta), "left"), 1.0, atol=1e-10)
    assert_allclose(pole_value(np.cos(theta), "right"), -1.0, atol=1e-10)
    assert_allclose(pole_value(np.sin(theta) ** 2 + 3.0, "left"), 3.0, atol=1e-9)


def test_pole_positions_of_sphere():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.profile import pole_position
    curve = cassini_profile(CassiniShape.from_lambda(0.0), 100)
    assert_allclose(pole_position(curve, "left"), -1.0, atol=1e-8)
    assert_allclose(pole_position(curve, "right"), 1.0, atol=1e-8)


def test_neck_index():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.profile import neck_index
    sphere = cassini_profile(CassiniShape.from_lambda(0.0), 100)
    assert neck_index(sphere.R) == 50
    dumbbell = cassini_profile(CassiniShape.from_lambda(0.9), 200)
    assert neck_index(dumbbell.R) in (99, 100)


def test_mirrored_profile_keeps_orientation():
    from src.geometry.profile import ProfileCurve
    curve = ProfileCurve(S=np.array([-2.0, -1.0, 0.5, 1.0]), R=np.array([0.1, 0.5, 0.4, 0.2]))
    mirror = curve.mirrored()
    assert np.all(np.diff(mirror.S) > 0.0)
    assert_allclose(mirror.R, [0.2, 0.4, 0.5, 0.1])


def test_graph_velocity_matches_parametric_flow():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.graph import horizontal_graph, horizontal_graph_velocity
    from src.evolution.stepper import evaluate_flow
    curve = cassini_profile(CassiniShape.from_lambda(0.5), 800)
    x, y = horizontal_graph(curve)
    assert x.size == curve.n
    ev = evaluate_flow(curve.S, curve.R, curve.dtheta)
    slope = np.gradient(y, x, edge_order=2)
    at_fixed_x = ev.dR - slope * ev.dS
    inner = slice(150, 650)
    assert_allclose(horizontal_graph_velocity(x, y)[inner], at_fixed_x[inner], rtol=1e-2, atol=1e-3)


def test_vertical_graph_velocity_of_sphere_cap():
    from src.geometry.graph import vertical_graph_velocity
    # the unit sphere's right cap x(y) = sqrt(1 - y^2) moves with speed -2 along the normal
    y = np.linspace(0.1, 0.6, 400)
    x = np.sqrt(1.0 - y ** 2)
    expected = -2.0 / x
    assert_allclose(vertical_graph_velocity(y, x)[5:-5], expected[5:-5], rtol=1e-3)


def test_waist_curvatures_of_dumbbell():
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import curvatures
    lam = 0.9
    curve = cassini_profile(CassiniShape.from_lambda(lam), 4001)
    field = curvatures(curve)
    waist = 2000
    assert_allclose(curve.theta[waist], 0.5 * np.pi)
    y0 = np.sqrt(1.0 - lam ** 2)
    assert_allclose(curve.R[waist], y0, rtol=1e-12)
    assert_allclose(field.kappa_phi[waist], 1.0 / y0, rtol=1e-4)
    assert_allclose(field.kappa_u[waist], (1.0 - 2.0 * lam ** 2) / y0, rtol=1e-4)


def test_dumbbell_volume_matches_quadrature():
    from scipy.integrate import quad
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import integral_quantities
    shape = CassiniShape.from_lambda(0.96)
    a2, b4 = shape.a ** 2, shape.b ** 4

    def y2(x):
        return max(np.sqrt(4.0 * a2 * x ** 2 + b4) - x ** 2 - a2, 0.0)

    exact = 2.0 * np.pi * quad(y2, 0.0, shape.x_max, limit=200)[0]
    q = integral_quantities(cassini_profile(shape, 1000))
    assert_allclose(q.volume, exact, rtol=1e-3)


@pytest.mark.parametrize("factor", [0.5, 2.0, 3.7])
def test_extinction_bounds_scale_with_length_squared(factor):
    from src.geometry.cassini import CassiniShape, cassini_profile
    from src.geometry.curvature import extinction_bounds
    curve = cassini_profile(CassiniShape.from_lambda(0.9), 200)
    lower, upper = extinction_bounds(curve)
    lower_s, upper_s = extinction_bounds(curve.scaled(factor))
    assert_allclose(lower_s, factor ** 2 * lower, rtol=1e-12)
    assert_allclose(upper_s, factor ** 2 * upper, rtol=1e-12)
