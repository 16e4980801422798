import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from levyrough.levy import LevyModel, sample_path
from levyrough.paths import Jump, SamplePath
from levyrough.young import riemann_stieltjes, young_constant, young_integral

T = np.linspace(0, 1, 2**12 + 1)


def smooth(fn):
    return SamplePath(T, fn(T))


def weierstrass(h, t, phase=0.0, terms=14):
    return sum(2.0 ** (-k * h) * np.sin(2.0**k * 2 * np.pi * t + phase * k) for k in range(terms))


def test_constant_integrand_telescopes():
    rng = np.random.default_rng(1)
    g = SamplePath(T, np.cumsum(rng.standard_normal(T.size)))
    f = SamplePath(T, np.ones(T.size))
    e = young_integral(f, g, 1.0, 2.1)
    for _, v in e.mesh_levels:
        assert v == pytest.approx(g.values[-1, 0] - g.values[0, 0], abs=1e-9)


def test_self_integral_within_bound():
    g = smooth(lambda t: np.sin(2 * np.pi * t) + t)
    e = young_integral(g, g, 1.0, 1.0)
    exact = 0.5 * (g.values[-1, 0] ** 2 - g.values[0, 0] ** 2)
    assert abs(e.value - exact) <= e.error_bound


def test_brownian_pair_rejected():
    b1 = sample_path(LevyModel.brownian(1), 1.0, 65, 1.0, 1)
    b2 = sample_path(LevyModel.brownian(1), 1.0, 65, 1.0, 2)
    with pytest.raises(ValueError, match="Young condition violated"):
        young_integral(b1, b2, 2.5, 2.5)


def test_common_jumps_rejected():
    t = np.linspace(0, 1, 4)
    x = np.array([0.0, 0.0, 1.0, 1.0])
    p = SamplePath(t, x, (Jump(2, [0.0], [1.0]),))
    with pytest.raises(ValueError, match="common discontinuities"):
        young_integral(p, p, 1.0, 1.0)


def test_constant_value():
    assert young_constant(1.0, 1.0) == pytest.approx(4 * np.pi**2 / 6)
    with pytest.raises(ValueError):
        young_constant(2.0, 2.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(-3, 3))
def test_linearity(seed, alpha):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 1, 65)
    f1, f2, g = (SamplePath(t, np.cumsum(rng.standard_normal((65, 2)), axis=0)) for _ in range(3))
    comb = SamplePath(t, alpha * f1.values + f2.values)
    i1, i2, i12 = (young_integral(f, g, 1.5, 1.5).value for f in (f1, f2, comb))
    assert np.allclose(i12, alpha * i1 + i2, atol=1e-12 * (1 + np.abs(i12).max()))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 63))
def test_additivity(seed, split):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 1, 65)
    f, g = (SamplePath(t, np.cumsum(rng.standard_normal(65))) for _ in range(2))
    whole = young_integral(f, g, 1.5, 1.5).value
    a = young_integral(f, g, 1.5, 1.5, interval=(0, split)).value
    b = young_integral(f, g, 1.5, 1.5, interval=(split, 64)).value
    assert a + b == pytest.approx(whole, abs=1e-12 * (1 + abs(whole)))


def test_refinement_rate_on_holder_paths():
    h = 0.75  # Hölder exponent, so p = q = 1/h and theta - 1 = 2h - 1
    f = smooth(lambda t: weierstrass(h, t, 0.3))
    g = smooth(lambda t: weierstrass(h, t, 1.1))
    e = young_integral(f, g, 1 / h, 1 / h)
    mesh = np.array([m for m, _ in e.mesh_levels])
    vals = np.array([v for _, v in e.mesh_levels])
    diffs = np.abs(np.diff(vals))[3:]
    slope = np.polyfit(np.log(mesh[4:]), np.log(diffs), 1)[0]
    assert slope >= (2 * h - 1) - 0.1


def test_smooth_case_matches_quadrature():
    f = smooth(lambda t: np.cos(3 * t))
    g = smooth(lambda t: np.sin(2 * t) + t**2)
    e = young_integral(f, g, 1.0, 1.0)
    ref = quad(lambda s: np.cos(3 * s) * (2 * np.cos(2 * s) + 2 * s), 0, 1, epsabs=1e-14)[0]
    assert abs(e.extrapolated - ref) <= 1e-8
    # the raw left sum converges at first order only
    assert abs(e.value - ref) > 1e-6


def test_riemann_stieltjes_rules():
    F = np.array([[1.0], [2.0], [3.0]])
    dX = np.array([[1.0], [1.0]])
    assert riemann_stieltjes(F, dX, "left")[-1] == pytest.approx(3.0)
    assert riemann_stieltjes(F, dX, "trapezoid")[-1] == pytest.approx(4.0)
    with pytest.raises(ValueError):
        riemann_stieltjes(F, dX, "midpoint")
