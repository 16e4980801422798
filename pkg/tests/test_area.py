import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyrough.area import (
    AreaMatrix, PolygonAreas, area_by_levels, area_c0, area_dyadic, area_moment_check, area_norm,
    area_pvar_bound, area_pvar_constants, chen_compose, dyadic_cover, polygon_area, series_constant,
    step_areas, wedge,
)
from levyrough.levy import LevyMeasureSpec, LevyModel, eta_measure, sample_coupled_paths, sample_path
from levyrough.paths import SamplePath
from levyrough.verify import random_jump_path


def brownian(n, seed, d=2):
    return sample_path(LevyModel.brownian(d), 1.0, n, 1.0, seed)


def test_linear_path_has_zero_area():
    t = np.linspace(0, 1, 65)
    p = SamplePath(t, np.outer(t, [1.0, -2.0, 0.5]))
    assert np.allclose(area_dyadic(p, 0, 1, 6).matrix, 0.0, atol=1e-15)


def test_unit_square():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    assert polygon_area(pts)[0, 1] == pytest.approx(1.0)
    assert polygon_area(pts[::-1])[0, 1] == pytest.approx(-1.0)


def test_area_matrix_rejects_symmetric_input():
    with pytest.raises(ValueError, match="antisymmetric"):
        AreaMatrix((0, 1), np.eye(2))


def test_area_norm_bound():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 50, 3))
    lhs = area_norm(0.5 * wedge(a, b))
    assert np.all(lhs <= 0.5 * np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1) + 1e-14)


def test_polygon_areas_match_direct():
    X = np.cumsum(np.random.default_rng(1).standard_normal((40, 3)), axis=0)
    pa = PolygonAreas(X)
    for i, j in [(0, 39), (3, 17), (10, 11), (5, 5)]:
        assert np.allclose(pa(i, j), polygon_area(X[i : j + 1]) if j > i else 0.0, atol=1e-12)


def test_c0_product_measure():
    # independent coordinates: Q is diagonal
    spec = LevyMeasureSpec.alpha_stable(1.5, scale=0.5, dimension=2)
    q = 2 * 0.5 / (2 - 1.5)
    assert area_c0(spec) == pytest.approx(q * q, rel=1e-12)


def test_c0_degenerate_on_a_line():
    atoms = [[0.3, 0.3], [-0.5, -0.5], [0.1, 0.1]]
    spec = LevyMeasureSpec.compound_poisson(2.0, "point_masses", 2, atoms=atoms)
    assert area_c0(spec) == pytest.approx(0.0, abs=1e-15)


def test_c0_includes_gaussian_part():
    model = LevyModel(np.zeros(2), np.diag([2.0, 3.0]), LevyMeasureSpec.zero(2))
    assert area_c0(model) == pytest.approx(6.0)
    assert area_c0(model.levy_measure) == 0.0


def test_c0_eta_stable_under_quadrature_refinement():
    spec = eta_measure(m_max=5, dimension=2)
    assert area_c0(spec, rtol=1e-8) == pytest.approx(area_c0(spec, rtol=1e-12), rel=1e-7)


def test_series_constant():
    assert series_constant() == 1.0
    assert series_constant(1) == pytest.approx(0.5)
    assert series_constant(40) == pytest.approx(1.0, abs=1e-11)


def test_chen_identity_and_direct():
    p = brownian(257, 3, d=3)
    v = p.values
    a = area_dyadic(p, 0, 0.5, 7)
    b = area_dyadic(p, 0.5, 1, 7)
    whole = area_dyadic(p, 0, 1, 8)
    c = chen_compose(a, b, v[128] - v[0], v[256] - v[128])
    assert np.allclose(c.matrix, whole.matrix, atol=1e-12)
    zero = AreaMatrix((0.5, 0.5), np.zeros((3, 3)))
    assert np.array_equal(chen_compose(a, zero, v[128] - v[0], np.zeros(3)).matrix, a.matrix)


def test_chen_rejects_gap():
    z = AreaMatrix((0, 1), np.zeros((2, 2)))
    with pytest.raises(ValueError, match="abut"):
        chen_compose(z, AreaMatrix((2, 3), np.zeros((2, 2))), [0, 0], [0, 0])


def test_reversal_negates_area():
    X = np.cumsum(np.random.default_rng(2).standard_normal((30, 2)), axis=0)
    assert np.allclose(polygon_area(X[::-1]), -polygon_area(X), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(1, 256))
def test_cover_tiles_interval(a, length):
    b = min(256, a + length)
    if b <= a:
        return
    cov = dyadic_cover(a / 256, b / 256, 1.0, 8)
    bounds = cov.bounds()
    assert bounds[0, 0] == pytest.approx(a / 256) and bounds[-1, 1] == pytest.approx(b / 256)
    assert np.allclose(bounds[1:, 0], bounds[:-1, 1])
    assert all(v <= 2 for v in cov.per_level().values())


def test_single_dyadic_is_one_piece():
    assert dyadic_cover(0.25, 0.5, 1.0, 6).pieces == ((2, 1),)
    assert dyadic_cover(0.0, 1.0, 1.0, 6).pieces == ((0, 0),)


def test_cover_composition_matches_direct_area():
    p = brownian(1025, 4, d=2)
    v = p.values
    cov = dyadic_cover(37 / 1024, 901 / 1024, 1.0, 10)
    acc = None
    for lo, hi in cov.bounds():
        i, j = round(lo * 1024), round(hi * 1024)
        piece = area_dyadic(p, lo, hi, int(np.log2(j - i)))
        inc = v[j] - v[i]
        if acc is None:
            acc, start = piece, i
        else:
            acc = chen_compose(acc, piece, v[i] - v[start], inc)
    direct = polygon_area(v[37:902])
    assert np.allclose(acc.matrix, direct, atol=1e-10)


def test_levels_add_up():
    p = brownian(513, 5, d=3)
    rows = area_by_levels(p, 0, 1, 9)
    assert np.allclose(rows.sum(axis=0), area_dyadic(p, 0, 1, 9).matrix, atol=1e-12)
    v = p.values
    assert np.allclose(rows[0], 0.5 * wedge(v[256] - v[0], v[512] - v[256]), atol=1e-12)


def test_insufficient_resolution():
    p = brownian(9, 6)
    with pytest.raises(ValueError, match="insufficient resolution"):
        area_dyadic(p, 0, 1, 4)


def test_area_uses_left_limits():
    path = random_jump_path(np.random.default_rng(7), 17, 2, 2)
    assert np.allclose(area_dyadic(path, 0, path.horizon, 4).matrix,
                       polygon_area(path.left_values()), atol=1e-14)


def test_step_areas_compose_to_total():
    model = LevyModel(np.zeros(2), 0.5 * np.eye(2), LevyMeasureSpec.compound_poisson(8.0, "uniform_ball", 2, radius=0.5))
    path = sample_path(model, 1.0, 257, 1e-3, 8)
    coarse, areas = step_areas(path, 16)
    acc = np.zeros((2, 2))
    lv = coarse.left_values()
    v = coarse.values
    for k in range(len(coarse) - 1):
        # each step runs from the right value to the next left limit
        acc = acc + areas[k] + 0.5 * wedge(v[k] - v[0], lv[k + 1] - v[k])
        if k + 1 < len(coarse) and not np.array_equal(lv[k + 1], v[k + 1]):
            acc = acc + 0.5 * wedge(lv[k + 1] - v[0], v[k + 1] - lv[k + 1])
    _, pts, _ = path.skeleton()
    assert np.allclose(acc, polygon_area(pts), atol=1e-12)


def test_truncation_is_a_martingale_in_the_cutoff():
    model = LevyModel.pure_jump(LevyMeasureSpec.compound_poisson(30.0, "uniform_ball", 2, radius=1.0))
    diffs = []
    for k in range(2000):
        a, b = sample_coupled_paths(model, 1.0, 17, [0.6, 0.2], (9, k))
        diffs.append(area_dyadic(b, 0, 1, 4).matrix[0, 1] - area_dyadic(a, 0, 1, 4).matrix[0, 1])
    diffs = np.array(diffs)
    assert abs(diffs.mean()) <= 3 * diffs.std(ddof=1) / np.sqrt(diffs.size)


def test_moment_check_brownian_oracle():
    res = area_moment_check(LevyModel.brownian(2), 0.0, 1.0, 3000, seed=10, levels=6)
    assert res["C0"] == pytest.approx(1.0)
    assert res["pass"]
    assert abs(res["oracle_z"]) <= 4
    assert abs(res["mean_area"]) <= 4 * res["se_area"]


def test_moment_shrinks_by_four_when_interval_halves():
    m = LevyModel.brownian(2)
    a = area_moment_check(m, 0.0, 1.0, 3000, seed=11, levels=5)
    b = area_moment_check(m, 0.0, 0.5, 3000, seed=12, levels=5)
    ratio = a["mean"] / b["mean"]
    se = ratio * np.hypot(a["se"] / a["mean"], b["se"] / b["mean"])
    assert abs(ratio - 4.0) <= 4 * se


def test_moment_check_rejects_drift():
    with pytest.raises(ValueError):
        area_moment_check(LevyModel(np.ones(2), np.eye(2), LevyMeasureSpec.zero(2)), 0, 1, 10, 0)


def test_pvar_constants_validation():
    c1, c2 = area_pvar_constants(2.5, 2.0)
    assert c1 > 0 and c2 > 0
    with pytest.raises(ValueError):
        area_pvar_constants(2.0, 2.0)
    with pytest.raises(ValueError):
        area_pvar_constants(2.5, 1.5)


def test_pvar_bound_on_linear_path():
    t = np.linspace(0, 1, 257)
    res = area_pvar_bound(SamplePath(t, np.outer(t, [1.0, 1.0])), 2.5, 2.0, max_level=8, proposals=500)
    assert res["area_term"] == pytest.approx(0.0, abs=1e-20)
    assert res["lower"] <= 1e-20 and res["pass"]


def test_pvar_bound_dominates_search():
    res = area_pvar_bound(brownian(1025, 13), 2.5, 2.0, max_level=10, seed=1, proposals=3000)
    assert res["pass"] and res["lower"] > 0
