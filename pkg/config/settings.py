"""Application configuration module."""

from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CKP_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = Field(default="ckp-algebra", description="Application name")
    app_version: str = Field(default="0.1.0", description="Application version")
    debug: bool = Field(default=False, description="Debug mode")
    log_level: str = Field(default="WARNING", description="Logging level")

    # Computation
    default_cap: str = Field(
        default="4",
        description="Default weight cap, a non-negative half-integer such as 3 or 7/2",
    )
    workers: int = Field(
        default=1, description="Worker processes for verification suites", ge=1
    )
    seed: int = Field(default=0, description="Seed for random test points")
    pfhf_trials: int = Field(
        default=5, description="Random tuples per order in the pfhf suite", ge=1
    )

    # Output
    output_format: Literal["table", "json"] = Field(
        default="table", description="Report format"
    )
    odd_time_normalization: Literal["gamma", "vertex"] = Field(
        default="gamma",
        description=(
            "Convention for printed polynomials: 'gamma' (default) keeps the "
            "engine's exp(sum t_k J_k) normalization shared by every computation, "
            "'vertex' doubles every odd time"
        ),
    )
    settings_file: str | None = Field(
        default=None, description="Optional YAML file overriding these defaults"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v.upper()

    @field_validator("default_cap", mode="before")
    @classmethod
    def validate_default_cap(cls, v: Any) -> str:
        """Validate that the cap is a non-negative half-integer."""
        text = str(v).strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError("Cap must be an exact rational such as 4 or 7/2")
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"Invalid cap: {v!r}")
        if value < 0 or (2 * value).denominator != 1:
            raise ValueError("Cap must be a non-negative half-integer")
        return text

    @property
    def cap(self) -> Fraction:
        """Default cap as an exact rational."""
        return Fraction(self.default_cap)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "Settings":
        """Build settings from a YAML mapping; unknown keys are ignored."""
        from app.core.exceptions import ConfigurationError

        try:
            with open(path, encoding="utf-8") as handle:
                data: Any = yaml.safe_load(handle)
        except OSError as e:
            raise ConfigurationError(f"Cannot read settings file {path}", str(e))
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError(
                f"Settings file {path} must contain a mapping",
                f"got {type(data).__name__}",
            )
        return cls(**{str(k): v for k, v in data.items()})


# Global settings instance
settings = Settings()
