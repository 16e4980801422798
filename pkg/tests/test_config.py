import json

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from levyrough._io import config_hash, dumps
from levyrough.config import ConfigError, RunConfig, from_dict, load_file, set_path


def test_defaults_validate_with_seed():
    cfg = RunConfig(seed=1).validate()
    assert cfg.numeric.p == 1.5 and cfg.model.grid_points == 1025


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown keys"):
        from_dict({"numeric": {"pp": 2}})
    with pytest.raises(ConfigError, match="unknown keys"):
        from_dict({"extra": 1})


@pytest.mark.parametrize("patch", [
    {"numeric": {"p": 3.5}},
    {"numeric": {"p": 0.5}},
    {"numeric": {"mode": "sideways"}},
    {"numeric": {"s": 1.0, "t": 0.5}},
    {"model": {"kind": "gaussian"}},
    {"model": {"eps": 0.0}},
    {"field": {"preset": "nonsense"}},
    {"output": {"format": "xml"}},
    {"seed": -1},
])
def test_out_of_range_values(patch):
    data = {"seed": 1, **patch}
    with pytest.raises(ConfigError):
        from_dict(data).validate()


def test_stochastic_commands_need_a_seed():
    with pytest.raises(ConfigError, match="seed"):
        from_dict({"command": "simulate"}).validate()
    from_dict({"command": "pvar", "input": "x.csv"}).validate()


def test_set_path_creates_sections():
    d = {}
    set_path(d, "numeric.p", 2.5)
    set_path(d, "seed", 3)
    assert d == {"numeric": {"p": 2.5}, "seed": 3}


def test_yaml_and_json_agree(tmp_path):
    data = {"command": "solve", "seed": 4, "numeric": {"p": 2.5, "mode": "forward"}}
    (tmp_path / "c.json").write_text(json.dumps(data))
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(data))
    assert load_file(tmp_path / "c.json") == load_file(tmp_path / "c.yaml") == data


def test_unparseable_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_file(f)
    with pytest.raises(ConfigError, match="cannot read"):
        load_file(tmp_path / "missing.yaml")


def test_build_model_levy_measure():
    cfg = from_dict({"seed": 1, "model": {"kind": "levy", "measure": {"kind": "compound_poisson", "rate": 2.0}}})
    m = cfg.build_model()
    assert m.levy_measure.kind == "compound_poisson" and m.dimension == 2
    bad = from_dict({"seed": 1, "model": {"kind": "brownian", "measure": {"kind": "zero"}}})
    with pytest.raises(ConfigError):
        bad.build_model()


def test_initial_length_checked():
    cfg = from_dict({"seed": 1, "field": {"state_dim": 3, "initial": [1.0, 2.0]}})
    with pytest.raises(ConfigError):
        cfg.initial()
    assert np.array_equal(from_dict({"seed": 1}).initial(), np.ones(2))


def test_field_is_reproducible_from_seed():
    cfg = from_dict({"seed": 9, "field": {"preset": "trig"}})
    y = np.array([[0.3, -0.1]])
    assert np.array_equal(cfg.build_field(2).eval_batch(y), cfg.build_field(2).eval_batch(y))


def test_dumps_is_deterministic_and_exact():
    obj = {"b": np.float64(0.1), "a": [np.int64(2), 2.0, np.nan, np.inf], "c": np.array([1e-300, 3.0])}
    s = dumps(obj)
    assert s == dumps(dict(reversed(list(obj.items()))))
    back = json.loads(s)
    assert back["a"] == [2, 2.0, "nan", "inf"] and isinstance(back["a"][1], float)
    assert back["b"] == 0.1 and back["c"][0] == 1e-300
    assert s.endswith("\n")


@settings(max_examples=100, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert json.loads(dumps({"x": x}))["x"] == x


def test_config_hash_tracks_content():
    a = RunConfig(seed=1).to_dict()
    b = RunConfig(seed=2).to_dict()
    assert config_hash(a) == config_hash(RunConfig(seed=1).to_dict())
    assert config_hash(a) != config_hash(b)
