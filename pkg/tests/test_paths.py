import os
import tempfile

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyrough.paths import Jump, SamplePath, read_csv, write_csv


def jump_path():
    t = np.linspace(0, 1, 6)
    x = np.array([[0.0, 0], [0.1, 0], [1.1, 0.5], [1.0, 0.4], [0.0, 0.0], [0.2, 0.1]])
    return SamplePath(t, x, (Jump(2, [0.2, 0.0], x[2]), Jump(4, [0.9, 0.3], x[4])))


def test_registry_sorted_by_magnitude():
    p = jump_path()
    mags = [j.magnitude for j in p.jumps]
    assert mags == sorted(mags, reverse=True)
    assert p.jumps[0].index == 2  # |(0.9, 0.5)| > |(-0.9, -0.3)|


def test_registry_ties_go_to_earlier_time():
    t = np.linspace(0, 1, 4)
    x = np.array([0.0, 1.0, 2.0, 3.0])
    p = SamplePath(t, x, (Jump(3, [2.0], [3.0]), Jump(1, [0.0], [1.0])))
    assert [j.index for j in p.jumps] == [1, 3]


@pytest.mark.parametrize("bad", [
    dict(times=[0.0, 0.0], values=[0, 1]),
    dict(times=[0.1, 0.2], values=[0, 1]),
    dict(times=[0.0, 1.0], values=[0, 1, 2]),
])
def test_validation(bad):
    with pytest.raises(ValueError):
        SamplePath(np.asarray(bad["times"]), np.asarray(bad["values"], dtype=float))


def test_jump_must_match_value():
    with pytest.raises(ValueError):
        SamplePath(np.array([0.0, 1.0]), np.array([0.0, 1.0]), (Jump(1, [0.5], [2.0]),))


def test_skeleton_inserts_left_limits():
    p = jump_path()
    times, pts, right = p.skeleton()
    assert len(pts) == len(p) + 2
    assert np.array_equal(pts[right], p.values)
    assert np.array_equal(pts[right[2] - 1], [0.2, 0.0])
    assert times[right[2] - 1] == times[right[2]]


def test_value_at_moves_to_left_limit():
    p = jump_path()
    mid = 0.5 * (p.times[1] + p.times[2])
    assert np.allclose(p.value_at(mid), [0.15, 0.0])
    assert np.array_equal(p.value_at(p.times[2])[0], p.values[2])


def test_csv_round_trip(tmp_path):
    p = jump_path()
    f = tmp_path / "p.csv"
    write_csv(p, f)
    q = read_csv(f)
    assert np.array_equal(q.times, p.times) and np.array_equal(q.values, p.values)
    assert [(j.index, tuple(j.left)) for j in q.jumps] == [(j.index, tuple(j.left)) for j in p.jumps]


def test_csv_rejects_unordered_times(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("t,x1\n0,0\n0.5,1\n0.4,2\n")
    with pytest.raises(ValueError, match="strictly increasing"):
        read_csv(f)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=20))
def test_csv_round_trip_exact_floats(xs):
    p = SamplePath(np.arange(len(xs), dtype=float) / 3.0, np.asarray(xs))
    with tempfile.TemporaryDirectory() as d:
        f = os.path.join(d, "x.csv")
        write_csv(p, f)
        q = read_csv(f)
    assert np.array_equal(q.values, p.values) and np.array_equal(q.times, p.times)


def test_restrict_and_reverse():
    p = jump_path()
    r = p.restrict(1, 3)
    assert r.times[0] == 0 and [j.index for j in r.jumps] == [1]
    with pytest.raises(ValueError):
        p.reversed()
    c = SamplePath(np.linspace(0, 1, 3), np.array([0.0, 1.0, 3.0]))
    assert np.array_equal(c.reversed().values[:, 0], [3.0, 1.0, 0.0])
