"""
Run settings: defaults table, environment overrides and the INI model file.

Precedence is defaults < environment < config file < command-line flags;
the cli applies the flags last through apply_overrides().
"""
import configparser
import logging
import os
from typing import Dict, Mapping, Optional, Tuple

from errors import InvalidConfig
from model_core import (Competitive2Params, Cooperative2Params, LogisticParams, Mode, ModelSpec,
                        NondimParams, NPlayerParams, PredatorPreyParams, Variant)
from premium_game import PremiumMapping
from simulate import IntegrationConfig

logger = logging.getLogger('settings')

ENV_OVERRIDES = {
    "LV_GAME_LOG_LEVEL": "log_level",
    "LV_GAME_OUTPUT_DIR": "output_dir",
    "LV_GAME_WORKERS": "workers",
    "LV_GAME_CSV_PRECISION": "csv_precision",
}

# model names accepted by --model and the [model] variant key
MODEL_NAMES = ("competitive", "cooperative", "nondim", "competitive2", "cooperative2",
               "predator-prey", "logistic", "nplayer")


def get_default_settings():
    """Return the default run settings"""
    return {
        # integration
        "t_end": 100.0,
        "step": 1e-3,
        "blowup_threshold": 1e9,
        "seed": None,
        "jitter": 0.0,
        "residual_tol": 1e-10,
        "attractor_tol": 1e-3,
        "workers": 1,
        # mapping
        "base": 0.0,
        "scale": 300.0,
        "claim_base": 0.0,
        "claim_scale": 1.0,
        "exposure_weights": None,
        # output
        "csv_precision": 6,
        "output_dir": None,
        "log_level": "INFO",
    }


def get_available_settings():
    """Get a list of all available settings with descriptions"""
    return {
        "t_end": {
            "description": "Final integration time",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 100.0
        },
        "step": {
            "description": "Fixed RK4 step size",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 1e-3
        },
        "blowup_threshold": {
            "description": "State max-norm at which a trajectory is reported as blow-up",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 1e9
        },
        "seed": {
            "description": "PRNG seed for portrait jitter (required when jitter > 0)",
            "section": "integration",
            "type": "integer",
            "default": None
        },
        "jitter": {
            "description": "Half-width of the uniform jitter applied to portrait initial conditions",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 0.0
        },
        "residual_tol": {
            "description": "Max-norm residual under which a candidate counts as a fixed point",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 1e-10
        },
        "attractor_tol": {
            "description": "Distance within which a trajectory is said to settle on an equilibrium",
            "section": "integration",
            "type": "float",
            "min": 0,
            "default": 1e-3
        },
        "workers": {
            "description": "Worker threads for phase portraits",
            "section": "integration",
            "type": "integer",
            "min": 1,
            "max": 64,
            "default": 1
        },
        "base": {
            "description": "Currency offset of the premium map",
            "section": "mapping",
            "type": "float",
            "default": 0.0
        },
        "scale": {
            "description": "Currency per nondimensional state unit",
            "section": "mapping",
            "type": "float",
            "min": 0,
            "default": 300.0
        },
        "claim_base": {
            "description": "Currency offset of the claim exposure map",
            "section": "mapping",
            "type": "float",
            "default": 0.0
        },
        "claim_scale": {
            "description": "Claim currency per weighted state unit",
            "section": "mapping",
            "type": "float",
            "min": 0,
            "default": 1.0
        },
        "exposure_weights": {
            "description": "Per-player claim exposure weights (comma separated)",
            "section": "mapping",
            "type": "vector",
            "default": None
        },
        "csv_precision": {
            "description": "Significant digits written to CSV and JSON output",
            "section": "output",
            "type": "integer",
            "min": 1,
            "max": 17,
            "default": 6
        },
        "output_dir": {
            "description": "Directory for output files (stdout when unset)",
            "section": "output",
            "type": "string",
            "default": None
        },
        "log_level": {
            "description": "Logging level name",
            "section": "output",
            "type": "string",
            "default": "INFO"
        },
    }


def parse_vector(text, where: str = "") -> Tuple[float, ...]:
    """'1, 2.5, 3' -> (1.0, 2.5, 3.0)"""
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise InvalidConfig(f"{where}: cannot parse {text!r} as comma separated numbers")


def parse_matrix(text, where: str = "") -> Tuple[Tuple[float, ...], ...]:
    """'0,0.5;0.5,0' -> ((0.0, 0.5), (0.5, 0.0)); rows split on semicolons"""
    if isinstance(text, (list, tuple)):
        return tuple(tuple(float(v) for v in row) for row in text)
    return tuple(parse_vector(row, where) for row in str(text).split(";") if row.strip())


def convert_setting(name: str, value, section: Optional[str] = None):
    """Convert a raw value to the setting's type and check its bounds"""
    available = get_available_settings()
    if name not in available:
        raise InvalidConfig(f"[{section or '?'}] unknown key '{name}'")
    info = available[name]
    where = f"[{section or info['section']}] {name}"
    if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none", "null")):
        return None

    try:
        if info["type"] == "integer":
            converted = int(value)
        elif info["type"] == "float":
            converted = float(value)
        elif info["type"] == "vector":
            converted = parse_vector(value, where)
        else:
            converted = str(value)
    except ValueError:
        raise InvalidConfig(f"{where}: invalid {info['type']} value {value!r}")

    if "min" in info and converted < info["min"]:
        raise InvalidConfig(f"{where}: {converted} is below the minimum {info['min']}")
    if "max" in info and converted > info["max"]:
        raise InvalidConfig(f"{where}: {converted} is above the maximum {info['max']}")
    return converted


def apply_overrides(settings: Dict, overrides: Mapping, section: Optional[str] = None) -> Dict:
    """Return a copy of settings with every non-None override converted and applied"""
    updated = settings.copy()
    for name, value in overrides.items():
        if value is None:
            continue
        updated[name] = convert_setting(name, value, section)
        logger.debug(f"Setting {name} = {updated[name]!r} ({section or 'override'})")
    return updated


def read_config_file(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # parameter keys are case sensitive (K1, K2)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise InvalidConfig(f"cannot parse config file {path}: {e}")
    unknown = [s for s in parser.sections() if s not in ("model", "integration", "mapping", "output")]
    if unknown:
        raise InvalidConfig(f"unknown config section [{unknown[0]}] in {path}")
    logger.info(f"Loaded config file {path}")
    return parser


def load_settings(config_path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None):
    """
    Defaults, then environment overrides, then the config file.

    Returns (settings, model) where model holds the raw [model] section
    (empty when there is no config file).
    """
    environ = os.environ if environ is None else environ
    settings = get_default_settings()

    env_values = {key: environ[var] for var, key in ENV_OVERRIDES.items() if environ.get(var)}
    settings = apply_overrides(settings, env_values, "environment")

    model = {}
    if config_path:
        parser = read_config_file(config_path)
        for section in ("integration", "mapping", "output"):
            if parser.has_section(section):
                settings = apply_overrides(settings, dict(parser.items(section)), section)
        if parser.has_section("model"):
            model = dict(parser.items("model"))
    return settings, model


def integration_config(settings: Mapping) -> IntegrationConfig:
    return IntegrationConfig(
        t_end=settings["t_end"],
        step=settings["step"],
        blowup_threshold=settings["blowup_threshold"],
        seed=settings["seed"],
        jitter=settings["jitter"],
    )


def premium_mapping(settings: Mapping) -> PremiumMapping:
    return PremiumMapping(
        base=settings["base"],
        scale=settings["scale"],
        claim_base=settings["claim_base"],
        claim_scale=settings["claim_scale"],
        exposure_weights=settings["exposure_weights"],
    )


def model_number(model: Mapping, key: str, default=None) -> float:
    value = model.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        if default is None:
            raise InvalidConfig(f"[model] missing key '{key}'")
        return default
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidConfig(f"[model] {key}: invalid number {value!r}")


def parse_mode(model: Mapping, default: Mode = Mode.COMPETITIVE) -> Mode:
    value = model.get("mode")
    if value is None:
        return default
    try:
        return Mode(str(value).strip().lower())
    except ValueError:
        raise InvalidConfig(f"[model] mode: expected competitive or cooperative, got {value!r}")


# spellings of the variant key that name the same model
VARIANT_ALIASES = {
    "predatorprey": "predator-prey",
    "predator_prey": "predator-prey",
    "n-player": "nplayer",
}

# nplayer field and its alias; the alias is read first
NPLAYER_KEYS = (("rho", "rhos"), ("K", "Ks"), ("C", "matrix"))


def _nplayer_value(model: Mapping, field: str, alias: str):
    for key in (alias, field):
        value = model.get(key)
        if value is not None and not (isinstance(value, str) and not value.strip()):
            return value, key
    raise InvalidConfig(f"[model] missing key '{field}'")


def model_from_config(model: Mapping) -> ModelSpec:
    """
    Build a ModelSpec from [model] keys (config values and flags merged).

    Variant names are case insensitive. nondim takes a12, a21, rho
    (default 1) and mode; competitive / cooperative are the same game with
    the mode fixed. competitive2 / cooperative2 take rho1, rho2, K1, K2,
    c1, c2; predatorprey (or predator-prey) takes delta, epsilon, alpha,
    beta; logistic takes rho, K; nplayer takes rho, K, C and mode, with
    rhos, Ks and matrix accepted for the vectors.
    """
    name = model.get("variant")
    if not name:
        raise InvalidConfig("[model] missing key 'variant'")
    name = str(name).strip().lower()
    name = VARIANT_ALIASES.get(name, name)

    if name in ("competitive", "cooperative", "nondim"):
        params = NondimParams(
            a12=model_number(model, "a12"),
            a21=model_number(model, "a21"),
            rho=model_number(model, "rho", 1.0),
            mode=parse_mode(model) if name == "nondim" else Mode(name),
        )
        return ModelSpec(Variant.NONDIM, params)

    if name in ("competitive2", "cooperative2"):
        cls = Competitive2Params if name == "competitive2" else Cooperative2Params
        params = cls(**{key: model_number(model, key) for key in ("rho1", "rho2", "K1", "K2", "c1", "c2")})
        return ModelSpec(Variant(name), params)

    if name == "predator-prey":
        params = PredatorPreyParams(**{key: model_number(model, key) for key in ("delta", "epsilon", "alpha", "beta")})
        return ModelSpec(Variant.PREDATOR_PREY, params)

    if name == "logistic":
        return ModelSpec(Variant.LOGISTIC, LogisticParams(rho=model_number(model, "rho"), K=model_number(model, "K")))

    if name == "nplayer":
        (rho, rho_key), (K, K_key), (C, C_key) = (_nplayer_value(model, *keys) for keys in NPLAYER_KEYS)
        params = NPlayerParams(
            rho=parse_vector(rho, f"[model] {rho_key}"),
            K=parse_vector(K, f"[model] {K_key}"),
            C=parse_matrix(C, f"[model] {C_key}"),
            mode=parse_mode(model),
        )
        return ModelSpec(Variant.NPLAYER, params)

    raise InvalidConfig(f"[model] variant: unknown model {name!r}, expected one of {', '.join(MODEL_NAMES)}")
