#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Settings loaded from config.yaml, optionally overridden by a user YAML file.

config.yaml declares every option with a default, a description and a type. An override
file is a flat mapping of option names to values:

    eigensolver: jacobi
    translate_high: 255
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import BaseModel, Extra, ValidationError, validator

from infomeasures import ENTROPY_BASES
from symlinalg import EIGENSOLVERS

logger = logging.getLogger(__name__)

ROOT_DIR = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG = ROOT_DIR / "config.yaml"


class ConfigError(ValueError):
    """Raised when a configuration file cannot be read or fails validation."""


class Settings(BaseModel):
    """Validated runtime settings."""

    eigensolver: str
    entropy_base: str
    float_digits: int
    sweep_pixel: int
    table2_patron: str
    translate_patron: str
    translate_low: int
    translate_high: int

    class Config:
        """Pydantic config."""

        extra = Extra.forbid
        allow_mutation = False

    @validator("eigensolver")
    def validate_eigensolver(cls, eigensolver):  # noqa: N805  # pydantic wants 'cls' as first arg
        """Validate eigensolver."""
        if eigensolver not in EIGENSOLVERS:
            raise ValueError(f"invalid eigensolver: should be one of {EIGENSOLVERS}")
        return eigensolver

    @validator("entropy_base", pre=True)
    def validate_entropy_base(cls, base):  # noqa: N805
        """Validate entropy base; YAML may hand over the integer 2."""
        base = str(base)
        if base not in ENTROPY_BASES:
            raise ValueError(f"invalid entropy_base: should be one of {ENTROPY_BASES}")
        return base

    @validator("float_digits")
    def validate_float_digits(cls, digits):  # noqa: N805
        """Validate float_digits."""
        assert 1 <= digits <= 15, "float_digits must lie in [1, 15]"
        return digits

    @validator("sweep_pixel")
    def validate_sweep_pixel(cls, pixel):  # noqa: N805
        """Validate sweep_pixel."""
        assert pixel >= 0, "sweep_pixel must be non-negative"
        return pixel

    @validator("translate_low", "translate_high")
    def validate_gray(cls, gray):  # noqa: N805
        """Validate gray levels."""
        assert 0 <= gray <= 255, "gray levels must lie in [0, 255]"
        return gray

    @property
    def translate_patron_path(self) -> Path:
        """Return the translation patron path, resolved against the repository root."""
        path = Path(self.translate_patron)
        return path if path.is_absolute() else ROOT_DIR / path


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        content = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config file {path}") from e
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return content


def defaults(path: Path = DEFAULT_CONFIG) -> Dict[str, Any]:
    """Return the declared default of every option in config.yaml."""
    options = _read_yaml(path).get("options", {})
    return {name: spec.get("default") for name, spec in options.items()}


def load_settings(override: Optional[Union[str, Path]] = None) -> Settings:
    """Return settings from config.yaml defaults, updated by an optional override file.

    Raises:
        ConfigError: on unreadable files, unknown options or invalid values.
    """
    values = defaults()
    if override is not None:
        overrides = _read_yaml(Path(override))
        logger.info("config overrides from %s: %s", override, sorted(overrides))
        values.update(overrides)
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
