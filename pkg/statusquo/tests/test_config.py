import pytest

from statusquo.config import Config, config_from_dict, load_config, parse_seeds
from statusquo.data.cache import config_hash
from statusquo.errors import ConfigValidationError


def test_empty_file_gives_ipd_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    config = load_config(path)
    assert config.experiment == "ipd"
    assert config.learners == ("sq", "sq")
    assert config.seeds == list(range(20))
    assert config.epochs == Config.MATRIX_EPOCHS
    assert config.sq.z == 10
    assert config.sq.gamma == 0.96
    assert config.sq.actor_step == 0.005
    assert config.sq.critic_step == 1.0
    assert config.sq.batch_size == 200
    assert config.env.episode_length == 200


def test_matching_pennies_uses_lower_gamma():
    assert config_from_dict({"experiment": "imp"}).sq.gamma == 0.9


def test_coin_defaults():
    config = config_from_dict({"experiment": "coin_sq"})
    assert config.environment == "coin"
    assert config.sq.critic_step == Config.COIN_CRITIC_STEP
    assert config.epochs == Config.COIN_EPOCHS


def test_exploitability_defaults_to_always_defect_opponent():
    config = config_from_dict({"experiment": "exploitability"})
    assert config.learners == ("sq", "always_defect")
    assert config.is_coin


def test_stationary_experiment_sets_eta():
    config = config_from_dict({"experiment": "stationary"})
    assert config.env.stationarity == Config.STATIONARY_ETA
    assert config.learners == ("sl", "sl")


def test_gamma_out_of_range_names_the_field():
    with pytest.raises(ConfigValidationError) as excinfo:
        config_from_dict({"sq": {"gamma": 1.2}})
    assert excinfo.value.field == "sq.gamma"


@pytest.mark.parametrize("raw,field", [
    ({"colour": "red"}, "colour"),
    ({"sq": {"delta": 0.1}}, "sq.delta"),
    ({"env": {"respawn": "never"}}, "env.respawn"),
    ({"distill": {"cluster_method": "dbscan"}}, "distill.cluster_method"),
    ({"experiment": "poker"}, "experiment"),
    ({"learners": ["sq", "lola"]}, "learners.1"),
    ({"sq": {"z": 0}}, "sq.z"),
    ({"sq": {"z": True}}, "sq.z"),
    ({"sq": {"beta": False}}, "sq.beta"),
    ({"epochs": True}, "epochs"),
    ({"z_values": [1, True]}, "z_values"),
    ({"env": {"stationarity": True}}, "env.stationarity"),
    ({"distill": {"dataset_size": True}}, "distill.dataset_size"),
    ({"epochs": 0}, "epochs"),
])
def test_invalid_values_are_named(raw, field):
    with pytest.raises(ConfigValidationError) as excinfo:
        config_from_dict(raw)
    assert excinfo.value.field == field


def test_coin_experiment_on_matrix_environment():
    with pytest.raises(ConfigValidationError):
        config_from_dict({"experiment": "coin_sq", "environment": "ipd"})


@pytest.mark.parametrize("value,expected", [
    ("0-3", [0, 1, 2, 3]),
    ("1,4,7", [1, 4, 7]),
    (5, [5]),
    ([2, 3], [2, 3]),
])
def test_parse_seeds(value, expected):
    assert parse_seeds(value) == expected


@pytest.mark.parametrize("value", ["3-1", "a,b", [1, "2"], True])
def test_parse_seeds_rejects(value):
    with pytest.raises(ConfigValidationError):
        parse_seeds(value)


def test_overrides_replace_file_values(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("experiment: ipd\nseeds: 0-9\nepochs: 50\n")
    config = load_config(path, {"seeds": "3,4", "output_dir": str(tmp_path / "out")})
    assert config.seeds == [3, 4]
    assert config.epochs == 50
    assert config.output_dir == str(tmp_path / "out")


def test_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("sq: [unclosed\n")
    with pytest.raises(ConfigValidationError):
        load_config(path)


def test_fingerprint_ignores_seeds_and_paths():
    first = config_from_dict({"seeds": "0-4", "output_dir": "a"})
    second = config_from_dict({"seeds": "5-9", "output_dir": "b"})
    changed = config_from_dict({"sq": {"z": 3}})
    assert config_hash(first.fingerprint()) == config_hash(second.fingerprint())
    assert config_hash(first.fingerprint()) != config_hash(changed.fingerprint())
