import pytest

import settings
from errors import InvalidConfig
from model_core import Mode, Variant
from simulate import IntegrationConfig


def test_defaults_match_descriptors():
    defaults = settings.get_default_settings()
    available = settings.get_available_settings()
    assert set(defaults) == set(available)
    for name, info in available.items():
        assert info["default"] == defaults[name]
        assert info["section"] in ("integration", "mapping", "output")


def test_environment_overrides():
    values, model = settings.load_settings(environ={
        "LV_GAME_WORKERS": "4",
        "LV_GAME_CSV_PRECISION": "10",
        "LV_GAME_OUTPUT_DIR": "/tmp/out",
        "LV_GAME_LOG_LEVEL": "",
    })
    assert values["workers"] == 4
    assert values["csv_precision"] == 10
    assert values["output_dir"] == "/tmp/out"
    assert values["log_level"] == "INFO"
    assert model == {}


def test_environment_values_are_checked():
    with pytest.raises(InvalidConfig, match="workers"):
        settings.load_settings(environ={"LV_GAME_WORKERS": "many"})
    with pytest.raises(InvalidConfig, match="maximum"):
        settings.load_settings(environ={"LV_GAME_CSV_PRECISION": "40"})


def test_config_file_beats_environment(fixture_path):
    values, model = settings.load_settings(fixture_path("competitive_case_a.ini"),
                                           environ={"LV_GAME_CSV_PRECISION": "9"})
    assert values["csv_precision"] == 6
    assert values["step"] == 0.01
    assert values["t_end"] == 100.0
    assert model["variant"] == "competitive"


def test_flags_apply_last(fixture_path):
    values, _ = settings.load_settings(fixture_path("competitive_case_a.ini"))
    values = settings.apply_overrides(values, {"step": "0.05", "seed": None})
    assert values["step"] == 0.05
    assert values["seed"] is None


@pytest.mark.parametrize("name, value", [
    ("step", "fast"),
    ("workers", "0"),
    ("scale", "-1"),
    ("exposure_weights", "1, x"),
    ("colour", "red"),
])
def test_convert_setting_rejects(name, value):
    with pytest.raises(InvalidConfig):
        settings.convert_setting(name, value, "integration")


def test_convert_setting_types():
    assert settings.convert_setting("workers", "3") == 3
    assert settings.convert_setting("blowup_threshold", "1e6") == 1e6
    assert settings.convert_setting("exposure_weights", "1, 2.5") == (1.0, 2.5)
    assert settings.convert_setting("seed", "none") is None


def test_unknown_section(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[plotting]\ncolour = red\n")
    with pytest.raises(InvalidConfig, match="plotting"):
        settings.load_settings(str(path))


def test_unknown_key_reports_section(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[integration]\nstepsize = 0.1\n")
    with pytest.raises(InvalidConfig, match=r"\[integration\] unknown key 'stepsize'"):
        settings.load_settings(str(path))


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("variant = competitive\n")
    with pytest.raises(InvalidConfig):
        settings.load_settings(str(path))


def test_parse_matrix():
    assert settings.parse_matrix("0, 0.5; 0.5, 0") == ((0.0, 0.5), (0.5, 0.0))
    assert settings.parse_matrix([[0, 1], [1, 0]]) == ((0.0, 1.0), (1.0, 0.0))


@pytest.mark.parametrize("model, variant, dimension", [
    ({"variant": "competitive", "a12": "0.5", "a21": "1.5"}, Variant.NONDIM, 2),
    ({"variant": "cooperative", "a12": "0.5", "a21": "0.5", "rho": "2"}, Variant.NONDIM, 2),
    ({"variant": "competitive2", "rho1": "1", "rho2": "1", "K1": "2", "K2": "3", "c1": "0.5", "c2": "0.2"},
     Variant.COMPETITIVE2, 2),
    ({"variant": "cooperative2", "rho1": "1", "rho2": "1", "K1": "2", "K2": "3", "c1": "0.1", "c2": "0.1"},
     Variant.COOPERATIVE2, 2),
    ({"variant": "Predator-Prey", "delta": "1", "epsilon": "0.5", "alpha": "0.5", "beta": "0.25"},
     Variant.PREDATOR_PREY, 2),
    ({"variant": "logistic", "rho": "1", "K": "10"}, Variant.LOGISTIC, 1),
    ({"variant": "nplayer", "rhos": "1,1", "Ks": "1,2", "matrix": "0,0.1;0.2,0"}, Variant.NPLAYER, 2),
    ({"variant": "NPlayer", "rho": "1,1,1", "K": "1,2,3", "C": "0,0.1,0;0.2,0,0;0,0,0"}, Variant.NPLAYER, 3),
    ({"variant": "Nondim", "a12": "0.5", "a21": "1.5"}, Variant.NONDIM, 2),
    ({"variant": "PredatorPrey", "delta": "1", "epsilon": "0.5", "alpha": "0.5", "beta": "0.25"},
     Variant.PREDATOR_PREY, 2),
    ({"variant": "Competitive2", "rho1": "1", "rho2": "1", "K1": "2", "K2": "3", "c1": "0.5", "c2": "0.2"},
     Variant.COMPETITIVE2, 2),
])
def test_model_from_config(model, variant, dimension):
    spec = settings.model_from_config(model)
    assert spec.variant is variant
    assert spec.dimension() == dimension


def test_nondimensional_defaults():
    spec = settings.model_from_config({"variant": "cooperative", "a12": "0.5", "a21": "0.5"})
    assert spec.params.rho == 1.0
    assert spec.mode is Mode.COOPERATIVE


def test_three_insurers_fixture(fixture_path):
    values, model = settings.load_settings(fixture_path("three_insurers.ini"))
    spec = settings.model_from_config(model)
    assert spec.params.n == 3
    assert spec.params.C[0] == (0.0, 0.5, 0.5)
    assert spec.mode is Mode.COMPETITIVE
    mapping = settings.premium_mapping(values)
    assert mapping.base == 100.0
    assert mapping.scale == 100.0
    assert mapping.exposure_weights == (1.0, 1.0, 1.0)


@pytest.mark.parametrize("model, message", [
    ({}, "variant"),
    ({"variant": "competitive", "a12": "0.5"}, "a21"),
    ({"variant": "competitive", "a12": "half", "a21": "0.5"}, "a12"),
    ({"variant": "nplayer", "rhos": "1,1", "Ks": "1,1"}, "'C'"),
    ({"variant": "nondim", "a12": "0.5", "a21": "0.5", "mode": "neutral"}, "mode"),
    ({"variant": "nplayer", "rhos": "1", "Ks": "1", "matrix": "0", "mode": "hostile"}, "mode"),
    ({"variant": "gompertz"}, "gompertz"),
])
def test_model_from_config_rejects(model, message):
    with pytest.raises(InvalidConfig, match=message):
        settings.model_from_config(model)


def test_integration_config():
    config = settings.integration_config(settings.get_default_settings())
    assert config == IntegrationConfig()
    values = settings.apply_overrides(settings.get_default_settings(), {"jitter": "0.1"})
    with pytest.raises(InvalidConfig):
        settings.integration_config(values)


def test_nondim_variant_takes_mode():
    spec = settings.model_from_config({"variant": "Nondim", "a12": "0.5", "a21": "0.5", "mode": "Cooperative"})
    assert spec.variant is Variant.NONDIM
    assert spec.mode is Mode.COOPERATIVE
    assert settings.model_from_config({"variant": "nondim", "a12": "0.5", "a21": "0.5"}).mode is Mode.COMPETITIVE


def test_nplayer_field_names_from_file(tmp_path):
    path = tmp_path / "game.ini"
    path.write_text("[model]\nvariant = NPlayer\nmode = cooperative\n"
                    "rho = 1, 2\nK = 4, 5\nC = 0, 0.1; 0.2, 0\n")
    _, model = settings.load_settings(str(path))
    spec = settings.model_from_config(model)
    assert spec.params.rho == (1.0, 2.0)
    assert spec.params.K == (4.0, 5.0)
    assert spec.params.C == ((0.0, 0.1), (0.2, 0.0))
    assert spec.mode is Mode.COOPERATIVE


def test_nplayer_alias_beats_field_name():
    spec = settings.model_from_config({"variant": "nplayer", "rho": "1,1", "rhos": "2,2", "K": "1,1", "C": "0,0;0,0"})
    assert spec.params.rho == (2.0, 2.0)
