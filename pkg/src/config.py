"""Settings from flags, an optional config file and the environment"""
import logging
import os
from dataclasses import dataclass, fields
from typing import Dict, Mapping, Optional

from dotenv import dotenv_values

logger = logging.getLogger(__name__)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    """Effective settings; each field maps to a ``LOCI_<NAME>`` key."""

    seed: Optional[int] = None
    max_cond: Optional[int] = None
    batch_closure: bool = False
    strict_blocking: bool = False
    keep_wide_disjunctions: bool = False
    trials: int = 1000
    output_dir: str = "outputs"
    log_level: str = "INFO"
    workers: int = 1

    @staticmethod
    def env_key(name: str) -> str:
        return f"LOCI_{name.upper()}"


def load_settings(
    overrides: Optional[Mapping[str, object]] = None,
    config_file: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Settings:
    """Resolve settings: overrides > config file > environment > defaults.

    Args:
        overrides: Values from command-line flags; ``None`` entries are unset.
        config_file: A dotenv-style file using the same ``LOCI_*`` keys.
        environ: Environment to read, ``os.environ`` by default.

    Raises:
        ValueError: A value cannot be parsed; the message names its key.
    """
    environ = os.environ if environ is None else environ
    file_values: Dict[str, Optional[str]] = {}
    if config_file is not None:
        if not os.path.isfile(config_file):
            raise ValueError(f"config file not found: {config_file}")
        file_values = dotenv_values(config_file)
        logger.debug("Read %d keys from %s", len(file_values), config_file)

    overrides = overrides or {}
    values = {}
    for f in fields(Settings):
        key = Settings.env_key(f.name)
        if overrides.get(f.name) is not None:
            values[f.name] = overrides[f.name]
            continue
        raw = file_values.get(key)
        if raw is None:
            raw = environ.get(key)
        if raw is not None:
            values[f.name] = _parse(key, f.name, raw)

    settings = Settings(**values)
    _validate(settings)
    return settings


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _parse(key: str, name: str, raw: str):
    text = raw.strip()
    if name in ("batch_closure", "strict_blocking", "keep_wide_disjunctions"):
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"{key} must be a boolean, got {raw!r}")
    if name in ("seed", "max_cond", "trials", "workers"):
        if name in ("seed", "max_cond") and text.lower() in ("", "none"):
            return None
        try:
            return int(text)
        except ValueError:
            raise ValueError(f"{key} must be an integer, got {raw!r}") from None
    if name == "log_level":
        return text.upper()
    return text


def _validate(settings: Settings) -> None:
    if settings.max_cond is not None and settings.max_cond < 0:
        raise ValueError(f"LOCI_MAX_COND must be non-negative, got {settings.max_cond}")
    if settings.trials < 0:
        raise ValueError(f"LOCI_TRIALS must be non-negative, got {settings.trials}")
    if settings.workers < 1:
        raise ValueError(f"LOCI_WORKERS must be at least 1, got {settings.workers}")
    if settings.log_level not in _LOG_LEVELS:
        raise ValueError(f"LOCI_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}")
