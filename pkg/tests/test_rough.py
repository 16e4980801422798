import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyrough.area import polygon_area, step_areas
from levyrough.fields import CallableField, constant_field, trig_field
from levyrough.levy import LevyModel, sample_path
from levyrough.paths import SamplePath
from levyrough.rough import (
    MultiplicativeFunctional2, check_pvar_bound, default_beta, enhance, read_enhanced, rough_integral_deg2,
    signature2_linear, solve_geometric_rough, write_enhanced,
)
from levyrough.solver import solve_geometric


def brownian(n, seed, d=2):
    return sample_path(LevyModel.brownian(d), 1.0, n, 1.0, seed)


def linear_form(A):
    """One-form ``theta(x) = A x`` from R^d to L(R^d, R^e); A has shape (e, d, d)."""
    A = np.asarray(A, dtype=float)
    e, d, _ = A.shape
    return CallableField(lambda ys: np.einsum("ejm,km->kej", A, ys),
                         lambda ys: np.broadcast_to(A, (ys.shape[0],) + A.shape),
                         e, d, state_dim=d)


def test_single_segment_signature():
    p = SamplePath(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [2.0, -1.0]]))
    s = signature2_linear(p)
    dx = np.array([2.0, -1.0])
    assert np.allclose(s.level2(0, 1), 0.5 * np.outer(dx, dx))
    assert np.allclose(s.area(0, 1), 0.0)


def test_square_loop_area():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    s = signature2_linear(SamplePath(np.linspace(0, 1, 5), pts))
    assert s.area(0, 4)[0, 1] == pytest.approx(1.0)
    assert np.allclose(s.level1(0, 4), 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 30))
def test_signature_is_multiplicative(seed, n):
    rng = np.random.default_rng(seed)
    p = SamplePath(np.linspace(0, 1, n), np.cumsum(rng.standard_normal((n, 3)), axis=0))
    assert signature2_linear(p).max_chen_residual() <= 1e-10


def test_path_then_reversal_has_trivial_signature():
    X = np.cumsum(np.random.default_rng(3).standard_normal((20, 2)), axis=0)
    loop = np.vstack([X, X[-2::-1]])
    s = signature2_linear(SamplePath(np.linspace(0, 1, loop.shape[0]), loop))
    N = loop.shape[0] - 1
    assert np.allclose(s.level1(0, N), 0.0, atol=1e-12)
    assert np.allclose(s.level2(0, N), 0.0, atol=1e-12)


def test_enhance_carries_given_areas():
    b = brownian(257, 4)
    coarse, areas = step_areas(b, 16)
    mf = enhance(coarse, areas)
    N = len(coarse) - 1
    assert np.allclose(mf.area(0, N), polygon_area(b.values), atol=1e-12)


def test_pvar_bound_zero_path():
    p = SamplePath(np.linspace(0, 1, 5), np.zeros((5, 2)))
    r = check_pvar_bound(signature2_linear(p))
    assert r["beta_min"] == 0.0 and r["beta_inverse"] == np.inf


def test_pvar_bound_linear_path_stable_under_refinement():
    vals = []
    for n in (9, 33, 129):
        t = np.linspace(0, 1, n)
        vals.append(check_pvar_bound(signature2_linear(SamplePath(t, np.outer(t, [1.0, 2.0])), p=2.5))["beta_min"])
    assert np.allclose(vals, vals[0], rtol=1e-9)
    assert check_pvar_bound(signature2_linear(SamplePath(np.linspace(0, 1, 9), np.zeros((9, 1)))), beta=1.0)["holds"]


def test_pvar_bound_finite_for_brownian():
    finite = 0
    for k in range(40):
        coarse, areas = step_areas(brownian(129, (5, k)), 4)
        finite += np.isfinite(check_pvar_bound(enhance(coarse, areas))["beta_min"])
    assert finite >= 0.95 * 40


def test_constant_form_is_linear():
    b = brownian(129, 6)
    mf = signature2_linear(b)
    C = np.array([[1.0, -2.0], [0.5, 3.0], [0.0, 1.0]])
    theta = CallableField(lambda ys: np.broadcast_to(C, (ys.shape[0],) + C.shape),
                          lambda ys: np.zeros((ys.shape[0], 3, 2, 2)), 3, 2, state_dim=2)
    out = rough_integral_deg2(theta, mf)
    assert np.allclose(out.values[-1], C @ (b.values[-1] - b.values[0]), atol=1e-12)


def test_identity_form_in_one_dimension():
    b = brownian(257, 7, d=1)
    out = rough_integral_deg2(linear_form(np.ones((1, 1, 1))), signature2_linear(b))
    x = b.values[:, 0]
    assert out.values[-1, 0] == pytest.approx(0.5 * (x[-1] ** 2 - x[0] ** 2), abs=1e-12)


def test_integration_by_parts_for_brownian():
    b = brownian(513, 8)
    coarse, areas = step_areas(b, 8)
    mf = enhance(coarse, areas)
    A = np.zeros((1, 2, 2))
    A[0, 0, 1] = A[0, 1, 0] = 1.0  # x2 dx1 + x1 dx2
    out = rough_integral_deg2(linear_form(A), mf)
    x = coarse.values
    assert out.values[-1, 0] == pytest.approx(x[-1, 0] * x[-1, 1] - x[0, 0] * x[0, 1], abs=1e-10)


def test_additivity_and_chen():
    b = brownian(257, 9)
    coarse, areas = step_areas(b, 4)
    mf = enhance(coarse, areas)
    theta = linear_form(np.random.default_rng(1).standard_normal((2, 2, 2)))
    N = len(mf) - 1
    whole = rough_integral_deg2(theta, mf)
    left = rough_integral_deg2(theta, mf, 0, 20)
    right = rough_integral_deg2(theta, mf, 20, N)
    assert np.allclose(left.values[-1] + right.values[-1], whole.values[-1], atol=1e-12)
    assert whole.max_chen_residual() <= 1e-10


def test_rescaling_a_linear_form():
    b = brownian(129, 10)
    mf = signature2_linear(b)
    theta = linear_form(np.random.default_rng(2).standard_normal((2, 2, 2)))
    one = rough_integral_deg2(theta, mf).values[-1]
    three = rough_integral_deg2(theta, mf.scaled(3.0)).values[-1]
    assert np.allclose(three, 9.0 * one, atol=1e-10)


def test_non_multiplicative_table_rejected():
    N, d = 4, 2
    l1 = np.zeros((N, N, d))
    l2 = np.zeros((N, N, d, d))
    l2[0, 3] = np.eye(2)  # breaks Chen for every triple through (0, 3)
    mf = MultiplicativeFunctional2(np.linspace(0, 1, N), np.zeros((N, d)), np.zeros((N - 1, d, d)), table=(l1, l2))
    with pytest.raises(ValueError, match="Chen"):
        rough_integral_deg2(linear_form(np.ones((1, 2, 2))), mf)


def test_rough_solver_constant_field():
    b = brownian(129, 11)
    coarse, areas = step_areas(b, 4)
    C = np.array([[1.0, 0.5], [-0.3, 2.0]])
    y = solve_geometric_rough(constant_field(C), coarse, [1.0, -1.0], 2.5, areas=areas).path.values
    assert np.allclose(y[-1], [1.0, -1.0] + C @ (coarse.values[-1] - coarse.values[0]), atol=1e-12)


def test_rough_solver_argument_checks():
    b = brownian(17, 12)
    with pytest.raises(ValueError):
        solve_geometric_rough(constant_field(np.eye(2)), b, [0, 0], 1.5, zero_area=True)
    with pytest.raises(ValueError, match="areas"):
        solve_geometric_rough(constant_field(np.eye(2)), b, [0, 0], 2.5)


def test_zero_area_agrees_with_young_solver_on_smooth_driver():
    t = np.linspace(0, 1, 2**11 + 1)
    X = np.stack([0.2 * np.sin(2 * np.pi * t), 0.2 * (np.cos(2 * np.pi * t) - 1)], axis=1)
    f = trig_field(2, 2, np.random.default_rng(13))
    y = solve_geometric(f, SamplePath(t, X), [0.2, -0.4], 1.5).path.values
    r = solve_geometric_rough(f, SamplePath(t, X), [0.2, -0.4], 2.5, zero_area=True).path.values
    assert np.max(np.abs(y - r)) <= 1e-5


def test_rough_flow_is_lipschitz():
    b = brownian(257, 14)
    coarse, areas = step_areas(b, 4)
    f = trig_field(2, 2, np.random.default_rng(15), scale=0.5)
    y1 = solve_geometric_rough(f, coarse, [0.0, 0.0], 2.5, areas=areas).path.values
    y2 = solve_geometric_rough(f, coarse, [1e-3, 0.0], 2.5, areas=areas).path.values
    ratio = np.max(np.linalg.norm(y1 - y2, axis=1)) / 1e-3
    assert 0 < ratio < 50


def test_enhanced_file_round_trip(tmp_path):
    coarse, areas = step_areas(brownian(161, 16), 16)  # 11 steps: clipped dyadic pieces
    mf = enhance(coarse, areas)
    side = write_enhanced(mf, tmp_path / "d.csv")
    back = read_enhanced(tmp_path / "d.csv")
    assert np.array_equal(back.values, mf.values) and np.array_equal(back.steps2, mf.steps2)
    entries = json.loads(side.read_text())["level2"]
    assert np.allclose(entries["0,0"], mf.level2(0, len(mf) - 1), atol=1e-14)
    assert np.allclose(entries["1,1"], mf.level2(8, 10), atol=1e-14)


def test_default_beta():
    mf = signature2_linear(brownian(33, 17))
    r = default_beta(mf)
    assert r["beta"] == 2 * check_pvar_bound(mf)["beta_min"]
    assert default_beta(mf, max_points=10)["beta"] is None
