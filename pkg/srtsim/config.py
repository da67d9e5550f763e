"""
YAML configuration loader.

Two kinds of configuration:
  - config.yaml at the project root: RunSettings defaults (trials, seed, ...)
  - run configs passed with --config / --gains-file: flat key-value maps
    (JSON or YAML) naming the system, channel and sweep parameters

Run-config values are merged with command-line flags (flags win) and then
resolved into the engines' types.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import yaml

from srtsim import notifier
from srtsim.errors import ConfigError, SrtError
from srtsim.models import (
    ChannelProfile,
    IidProfile,
    RunSettings,
    SystemConfig,
    mer_from_db,
    snr_from_power,
)

# Default path: config.yaml next to the project root
_DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.yaml"

GAIN_KEYS = ("sigma_sd2", "sigma_se2", "sigma_si2", "sigma_id2", "sigma_ie2")

ALLOWED_KEYS = frozenset(
    {
        "rate", "snr", "snr_db", "power", "noise", "mer", "mer_db", "n_relays",
        "delta", "p_int", "p_out", "trials", "seed", "workers", "confidence",
        "kind", "engines", "variable", "grid_min", "grid_max", "grid_points",
        "scheme", "p_out_max", "p_int_max", "n_max",
    }
    | set(GAIN_KEYS)
)

_SETTING_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
SETTING_KEYS = frozenset(
    {"log_level", "trials", "seed", "confidence", "workers", "output_format", "enumeration_cap"}
)


def load_config(path: str | Path | None = None) -> RunSettings:
    """
    Load run settings from the `settings` section of config.yaml.

    Falls back to defaults, with a warning, when the file does not exist.
    """
    config_path = Path(path) if path else _DEFAULT_CONFIG_PATH

    if not config_path.exists():
        notifier.print_warning(f"Config file not found at {config_path}, using defaults.")
        return RunSettings()

    raw = _read_mapping(config_path) or {}
    raw_settings = raw.get("settings", {}) or {}
    if not isinstance(raw_settings, dict):
        raise ConfigError(f"settings in {config_path} must be a key-value mapping")
    _check_known(raw_settings, SETTING_KEYS, f"{config_path} settings")
    defaults = RunSettings()

    def setting(key: str, convert):
        value = raw_settings.get(key)
        if value is None:
            return getattr(defaults, key)
        try:
            return convert(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"setting {key} in {config_path}: {exc}") from exc

    settings = RunSettings(
        log_level=setting("log_level", str).upper(),
        trials=setting("trials", lambda v: _positive_int(v, "trials")),
        seed=setting("seed", lambda v: _positive_int(v, "seed", minimum=0)),
        confidence=setting("confidence", _confidence),
        workers=setting("workers", lambda v: _positive_int(v, "workers")),
        output_format=setting("output_format", str),
        enumeration_cap=setting("enumeration_cap", lambda v: _positive_int(v, "enumeration_cap")),
    )
    if settings.log_level not in _SETTING_LEVELS:
        raise ConfigError(f"log_level must be one of {_SETTING_LEVELS}, got {settings.log_level!r}")
    if settings.output_format not in ("csv", "json"):
        raise ConfigError(f"output_format must be csv or json, got {settings.output_format!r}")
    return settings


def _positive_int(value: Any, name: str, minimum: int = 1) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError, OverflowError):
        number = None
    if isinstance(value, bool) or number is None or number != value or number < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return number


def _confidence(value: Any) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {value!r}")
    return value


def resolve_workers(requested: Any) -> int:
    """Worker count; None means one per CPU."""
    if requested is None:
        return os.cpu_count() or 1
    if isinstance(requested, (list, tuple)):
        requested = scalar({"workers": requested}, "workers")
    try:
        return _positive_int(requested, "workers")
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# ─── Run configs ──────────────────────────────────────────────


def _read_mapping(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a key-value mapping")
    return raw


def _check_known(values: Mapping[str, Any], allowed: Iterable[str], source: str) -> None:
    allowed = set(allowed)
    unknown = sorted(k for k in values if k not in allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {source}: {', '.join(unknown)}", unknown=unknown)


def load_run_config(path: str | Path) -> Dict[str, Any]:
    """Flat run-config map; unknown keys are errors."""
    values = _read_mapping(Path(path))
    _check_known(values, ALLOWED_KEYS, str(path))
    return values


def load_gains_file(path: str | Path) -> Dict[str, Any]:
    """Per-link average gains: scalars sigma_sd2/sigma_se2, arrays for the relay links."""
    values = _read_mapping(Path(path))
    _check_known(values, GAIN_KEYS, str(path))
    return values


def merge_values(*layers: Mapping[str, Any]) -> Dict[str, Any]:
    """Later layers override earlier ones; None means "not given"."""
    merged: Dict[str, Any] = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    return merged


def require_keys(values: Mapping[str, Any], groups: Sequence[Tuple[str, ...]]) -> None:
    """
    Each group is a tuple of alternative keys, one of which must be present.
    All missing groups are reported in one error.
    """
    missing = ["|".join(group) for group in groups if not any(k in values for k in group)]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}", missing=missing)


def _exclusive(values: Mapping[str, Any], *keys: str) -> None:
    given = [k for k in keys if k in values]
    if len(given) > 1:
        raise ConfigError(f"give only one of {', '.join(given)}")


def scalar(values: Mapping[str, Any], key: str) -> Any:
    """A single value; one-element lists collapse, longer lists are errors."""
    value = values[key]
    if isinstance(value, (list, tuple)):
        if len(value) != 1:
            raise ConfigError(f"{key} takes a single value here, got {len(value)}")
        value = value[0]
    return value


def as_list(values: Mapping[str, Any], key: str) -> List[Any]:
    value = values[key]
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _number(values: Mapping[str, Any], key: str) -> float:
    value = scalar(values, key)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number, got {value!r}") from exc


def _integer(values: Mapping[str, Any], key: str) -> int:
    value = _number(values, key)
    if value != int(value):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


# ─── Resolution ───────────────────────────────────────────────


def resolve_mer(values: Mapping[str, Any]) -> Optional[float]:
    """Linear MER from `mer` or `mer_db`; None when neither is given."""
    _exclusive(values, "mer", "mer_db")
    if "mer" in values:
        return _number(values, "mer")
    if "mer_db" in values:
        return _config_call(mer_from_db, _number(values, "mer_db"))
    return None


def resolve_snr(values: Mapping[str, Any]) -> Optional[float]:
    """Linear SNR from `snr`, `snr_db` or `power`/`noise`; None when absent."""
    forms = [k for k in ("snr", "snr_db", "power") if k in values]
    if len(forms) > 1:
        raise ConfigError(f"give only one of {', '.join(forms)}")
    if "snr" in values:
        return _number(values, "snr")
    if "snr_db" in values:
        return _config_call(mer_from_db, _number(values, "snr_db"))
    if "power" in values:
        require_keys(values, [("noise",)])
        return _config_call(snr_from_power, _number(values, "power"), _number(values, "noise"))
    return None


def resolve_system(values: Mapping[str, Any]) -> SystemConfig:
    """
    The system config from `rate` plus an SNR form, or from `delta` alone
    (unit SNR unless one is given).
    """
    _exclusive(values, "delta", "rate")
    snr = resolve_snr(values)
    if "delta" in values:
        return _config_call(SystemConfig.from_delta, _number(values, "delta"), 1.0 if snr is None else snr)
    require_keys(values, [("rate",), ("snr", "snr_db", "power")])
    return _config_call(SystemConfig, _number(values, "rate"), snr)


def resolve_profile(values: Mapping[str, Any]) -> ChannelProfile:
    """Explicit per-link gains when any sigma_* key is present, else an i.i.d. profile."""
    if any(k in values for k in GAIN_KEYS):
        require_keys(values, [(k,) for k in GAIN_KEYS])
        return _config_call(
            ChannelProfile,
            _number(values, "sigma_sd2"),
            _number(values, "sigma_se2"),
            tuple(as_list(values, "sigma_si2")),
            tuple(as_list(values, "sigma_id2")),
            tuple(as_list(values, "sigma_ie2")),
        )
    require_keys(values, [("mer", "mer_db"), ("n_relays",)])
    return resolve_iid(values).expand()


def resolve_iid(values: Mapping[str, Any]) -> IidProfile:
    require_keys(values, [("mer", "mer_db"), ("n_relays",)])
    return _config_call(IidProfile.from_mer, resolve_mer(values), _integer(values, "n_relays"))


def resolve_int(values: Mapping[str, Any], key: str) -> int:
    return _integer(values, key)


def resolve_float(values: Mapping[str, Any], key: str) -> float:
    return _number(values, key)


def _config_call(fn, *args):
    """Call a model constructor; its domain errors pass through unchanged."""
    try:
        return fn(*args)
    except SrtError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
