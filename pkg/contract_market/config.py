"""
Engine configuration: JSON file with ${VAR} substitution, .env support
and direct environment overrides, validated with pydantic.
"""

import json
import logging
import os
import re
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import InputError

logger = logging.getLogger(__name__)

PACKAGE_ROOT = Path(__file__).resolve().parent.parent
CONFIG_ENV_VAR = "MARKET_ENGINE_CONFIG"

DEFAULT_VERIFIER_CAP = 12
DEFAULT_ORACLE_CAP = 16

_ENV_PATTERN = re.compile(r"\$\{([^}]+)\}")


class LoggingSettings(BaseModel):
    level: str = "INFO"
    file: str = "logs/market-engine.log"

    @field_validator("level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value


class LimitSettings(BaseModel):
    verifier_cap: int = Field(DEFAULT_VERIFIER_CAP, ge=0)
    oracle_cap: int = Field(DEFAULT_ORACLE_CAP, ge=0)
    da_step_cap: Optional[int] = Field(None, ge=1)


class DefaultSettings(BaseModel):
    strategy: Literal["full", "single", "random"] = "full"
    seed: int = Field(1, ge=0, lt=2**64)


class EngineConfig(BaseModel):
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    limits: LimitSettings = Field(default_factory=LimitSettings)
    defaults: DefaultSettings = Field(default_factory=DefaultSettings)
    source: Optional[str] = None

    def log_path(self) -> Path:
        path = Path(self.logging.file)
        if not path.is_absolute():
            path = PACKAGE_ROOT / path
        return path


def substitute_env(text: str) -> str:
    """Replace ${VAR} with its environment value; unknown variables stay as written"""
    return _ENV_PATTERN.sub(lambda match: os.getenv(match.group(1), match.group(0)), text)


def _candidate_files(explicit: Optional[str]) -> Tuple[Optional[Path], ...]:
    if explicit:
        return (Path(explicit),)
    from_env = os.getenv(CONFIG_ENV_VAR)
    if from_env:
        return (Path(from_env),)
    return (
        Path.home() / ".market-engine" / "config.json",
        PACKAGE_ROOT / "config" / "config.json",
        PACKAGE_ROOT / "config.json",
    )


def _load_dotenv() -> None:
    env_file = PACKAGE_ROOT / ".env"
    if env_file.exists():
        from dotenv import load_dotenv

        load_dotenv(env_file)
        logger.info(f"Loaded environment variables from {env_file}")


def _apply_env_overrides(raw: Dict) -> Dict:
    overrides = {
        "MARKET_ENGINE_LOG_LEVEL": ("logging", "level", str),
        "MARKET_ENGINE_VERIFIER_CAP": ("limits", "verifier_cap", int),
        "MARKET_ENGINE_ORACLE_CAP": ("limits", "oracle_cap", int),
    }
    for var_name, (block, key, cast) in overrides.items():
        value = os.getenv(var_name)
        if value is None:
            continue
        try:
            raw.setdefault(block, {})[key] = cast(value)
        except ValueError:
            raise InputError(f"cannot parse {value!r}", location=var_name)
        logger.info(f"Config override from {var_name}")
    return raw


def load_config(path: Optional[str] = None) -> EngineConfig:
    """Load the engine configuration, falling back to built-in defaults"""
    _load_dotenv()

    raw: Dict = {}
    source = None
    for candidate in _candidate_files(path):
        if candidate is not None and candidate.exists():
            text = substitute_env(candidate.read_text(encoding="utf-8"))
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as e:
                raise InputError(e.msg, location=f"{candidate}:{e.lineno}:{e.colno}")
            source = str(candidate)
            break
    else:
        if path or os.getenv(CONFIG_ENV_VAR):
            raise InputError("config file not found", location=str(path or os.getenv(CONFIG_ENV_VAR)))

    raw = _apply_env_overrides(raw)
    try:
        config = EngineConfig.model_validate({**raw, "source": source})
    except ValidationError as e:
        first = e.errors()[0]
        field_path = ".".join(str(part) for part in first["loc"])
        raise InputError(first["msg"], location=f"{source or 'config'}:{field_path}")

    if source:
        logger.info(f"Loaded config from: {source}")
    else:
        logger.info("No config file found, using built-in defaults")
    return config
