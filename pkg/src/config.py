"""
Config ingestion and unit conversions for the operating point.

Config documents are flat TOML: one `key = value` per line, `#` comments.
Numeric values may be plain numbers or strings carrying an SI suffix:

    rep_rate = "16 MHz"
    pulse_width = "11.7 ns"
    v_elec = "13 mSNU"
    atten_db = 2.04          # alternative to t_channel
    xi_b = 0.027             # total at Bob; alternative to xi_bq

Unknown keys are rejected. Absent keys take the reference-link defaults.
"""
import math
import os
import re
from pathlib import Path
from typing import Any

import tomli
from pydantic import ValidationError

from src.constants import BASE_UNITS, SI_PREFIXES, TOOL_NAME, TOOL_VERSION
from src.errors import ConfigError, ConfigFileNotFoundError, ParameterError
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

# Unit kind for every key that may be written with a suffix
UNIT_KINDS = {
    "rep_rate": "frequency",
    "filter_bw": "frequency",
    "linewidth_total": "frequency",
    "sample_rate": "frequency",
    "pulse_width": "time",
    "v_elec": "noise",
    "va": "noise",
    "xi_bq": "noise",
    "xi_b": "noise",
    "iq_full_scale": "noise",
    "atten_db": "attenuation",
    "er_top": "attenuation",
    "er_bottom": "attenuation",
    "er_carver": "attenuation",
    "er_voa_max": "attenuation",
}

# Alternative spellings: alias -> (target key, conversion)
_ALIASES = {
    "xi_b": ("xi_bq", lambda v: v / 2.0),
    "atten_db": ("t_channel", lambda v: db_to_transmittance(v)),
    "mean_photon_number": ("va", lambda v: 2.0 * v),
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*)?$")
_LINE_RE = re.compile(r"line (\d+)")


def db_to_transmittance(atten: float) -> float:
    """Power transmittance of a loss given in dB: 10^(-atten/10)."""
    if atten < 0 or math.isnan(atten):
        raise ParameterError(f"attenuation must be >= 0 dB, got {atten}")
    return 10.0 ** (-atten / 10.0)


def transmittance_to_db(t: float) -> float:
    """Loss in dB of a power transmittance t in (0,1]."""
    if not (0.0 < t <= 1.0):
        raise ParameterError(f"transmittance out of (0,1]: {t}")
    return -10.0 * math.log10(t)


def mean_photon_number(va: float) -> float:
    """Mean photon number of the Gaussian ensemble, <n> = V_A / 2."""
    if va < 0:
        raise ParameterError(f"va must be >= 0 SNU, got {va}")
    return va / 2.0


def parse_quantity(value: Any, kind: str) -> float:
    """
    Converts a config value to a float in base units.

    Numbers pass through. Strings are `<number> <prefix><unit>`, where the
    unit must belong to `kind` (see BASE_UNITS) and the prefix to SI_PREFIXES.
    """
    if isinstance(value, bool):
        raise ConfigError(f"expected a {kind} quantity, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a {kind} quantity, got {type(value).__name__}")

    match = _QUANTITY_RE.match(value)
    if not match:
        raise ConfigError(f"cannot parse quantity '{value}'")
    number = float(match.group(1))
    unit = (match.group(2) or "").strip()
    if not unit:
        return number

    for base in BASE_UNITS[kind]:
        if unit.endswith(base):
            prefix = unit[: -len(base)]
            if prefix in SI_PREFIXES:
                return number * SI_PREFIXES[prefix]
    raise ConfigError(f"unit '{unit}' is not a valid {kind} unit in '{value}'")


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=", re.MULTILINE)
    match = pattern.search(text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _normalize(raw: dict, text: str) -> dict:
    """Applies unit parsing and alias resolution to the parsed document."""
    values: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"'{key}' must be a scalar; nested tables and arrays are not supported",
                              line=_line_of(text, key))
        kind = UNIT_KINDS.get(key)
        try:
            values[key] = parse_quantity(value, kind) if kind else value
        except ConfigError as exc:
            raise ConfigError(f"{key}: {exc}", line=_line_of(text, key)) from exc

    for alias, (target, convert) in _ALIASES.items():
        if alias in values:
            if target in values:
                raise ConfigError(f"'{alias}' and '{target}' are mutually exclusive",
                                  line=_line_of(text, alias))
            try:
                values[target] = convert(values.pop(alias))
            except ParameterError as exc:
                raise ConfigError(str(exc), line=_line_of(text, alias)) from exc

    if "sample_rate" in values:
        rep_rate = values.get("rep_rate", SystemParams.model_fields["rep_rate"].default)
        ratio = values.pop("sample_rate") / rep_rate
        if "samples_per_symbol" in values and values["samples_per_symbol"] != round(ratio):
            raise ConfigError("sample_rate and samples_per_symbol disagree",
                              line=_line_of(text, "sample_rate"))
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ConfigError(f"sample_rate / rep_rate must be an integer, got {ratio}",
                              line=_line_of(text, "sample_rate"))
        values["samples_per_symbol"] = int(round(ratio))
    return values


def _validated(values: dict, text: str = "") -> SystemParams:
    try:
        return SystemParams(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = str(first["loc"][0]) if first["loc"] else None
        if first["type"] == "extra_forbidden":
            message = f"unknown key '{key}'"
        elif "error" in first.get("ctx", {}):
            message = str(first["ctx"]["error"])
        else:
            message = f"{key}: {first['msg']}"
        raise ConfigError(message, line=_line_of(text, key) if key and text else None) from exc


def load_config(text: str) -> SystemParams:
    """
    Parses and validates a config document.

    Raises ConfigError carrying the offending line number for syntax errors
    and for values that violate a parameter invariant.
    """
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        match = _LINE_RE.search(str(exc))
        raise ConfigError(f"parse error: {exc}", line=int(match.group(1)) if match else None) from exc

    values = _normalize(raw, text)
    params = _validated(values, text)
    logger.debug(f"[Config] loaded {len(values)} keys, seed={params.seed}")
    return params


def load_config_file(path: str | os.PathLike) -> SystemParams:
    """Reads a config file from disk; missing files raise ConfigFileNotFoundError."""
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigFileNotFoundError(config_path)
    logger.info(f"[Config] reading {config_path}")
    return load_config(config_path.read_text(encoding="utf-8"))


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def dumps_config(params: SystemParams) -> str:
    """Writes params as a flat TOML document that load_config reads back unchanged."""
    lines = [f"# {TOOL_NAME} {TOOL_VERSION} system parameters"]
    for key, value in params.model_dump().items():
        if value is None:
            continue
        lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


def with_overrides(params: SystemParams, **overrides: Any) -> SystemParams:
    """Copy of params with the non-None overrides applied and revalidated."""
    changes = {key: value for key, value in overrides.items() if value is not None}
    if not changes:
        return params
    logger.debug(f"[Config] overrides: {sorted(changes)}")
    return _validated({**params.model_dump(), **changes})
