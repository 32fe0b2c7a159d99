#!/usr/bin/env python3
"""
Runtime configuration for gptkit.
Values come from the environment (optionally a .env file) with safe defaults.
"""

import os
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS = {
    'GPTKIT_LOG_LEVEL': 'INFO',
    'GPTKIT_LOG_DIR': '',
    'GPTKIT_ENUMERATION_LIMIT': '1000000',
    'GPTKIT_PERMUTATION_NODE_LIMIT': '5000000',
    'GPTKIT_DEFAULT_SEED': '0',
}


@dataclass(frozen=True)
class Settings:
    """Resolved configuration values."""
    log_level: str
    log_dir: Optional[Path]
    enumeration_limit: int
    permutation_node_limit: int
    default_seed: int


def _int_setting(name: str) -> int:
    raw = os.getenv(name, DEFAULTS[name])
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigurationError(f"{name} must be non-negative, got {value}")
    return value


def load_settings(env_file: Optional[str] = None) -> Settings:
    """Load settings from the environment, reading .env first when present."""
    load_dotenv(env_file, override=False)

    log_dir = os.getenv('GPTKIT_LOG_DIR', DEFAULTS['GPTKIT_LOG_DIR']).strip()
    settings = Settings(
        log_level=os.getenv('GPTKIT_LOG_LEVEL', DEFAULTS['GPTKIT_LOG_LEVEL']).upper(),
        log_dir=Path(log_dir) if log_dir else None,
        enumeration_limit=_int_setting('GPTKIT_ENUMERATION_LIMIT'),
        permutation_node_limit=_int_setting('GPTKIT_PERMUTATION_NODE_LIMIT'),
        default_seed=_int_setting('GPTKIT_DEFAULT_SEED'),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, loaded once."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings():
    """Forget cached settings (tests change the environment)."""
    global _settings
    _settings = None
