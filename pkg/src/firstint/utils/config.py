"""Process settings and document loading for firstint."""

import json
from pathlib import Path
from typing import Any, cast

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from firstint.utils.exceptions import ConfigurationError


class Settings(BaseSettings):
    """
    Process-level settings with environment variable support.

    Settings can be loaded from:
    1. Environment variables prefixed with FIRSTINT_ (highest priority)
    2. .env file
    3. Default values (lowest priority)
    """

    model_config = SettingsConfigDict(
        env_prefix="FIRSTINT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    threads: int = Field(default=0, ge=0, description="Worker cap for verification (0 = auto)")
    log_level: str = Field(default="WARNING", description="Logging level")
    json_logs: bool = Field(default=False, description="Render logs as JSON")


def load_document(path: str | Path) -> dict[str, Any]:
    """
    Load a system document from a JSON or YAML file.

    Args:
        path: Path to the document (.json, .yaml or .yml)

    Returns:
        Parsed document

    Raises:
        ConfigurationError: If the file doesn't exist or has an invalid format

    Example:
        >>> doc = load_document("specs/sys_3_2.json")
        >>> doc["kind"]
        'ode'
    """
    path = Path(path)

    if not path.exists():
        raise ConfigurationError(f"Document not found: {path}")

    try:
        with open(path, encoding="utf-8") as f:
            if path.suffix in [".yaml", ".yml"]:
                data = yaml.safe_load(f) or {}
            elif path.suffix == ".json":
                data = json.load(f)
            else:
                raise ConfigurationError(
                    f"Unsupported document format: {path.suffix}. Use .json, .yaml or .yml"
                )
    except ConfigurationError:
        raise
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML syntax in {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON syntax in {path}: {e}") from e
    except OSError as e:
        raise ConfigurationError(f"Error reading {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigurationError(f"Document root must be an object: {path}")
    return cast(dict[str, Any], data)


def get_settings() -> Settings:
    """
    Get the process settings.

    Returns:
        Settings instance with values from environment variables and .env file
    """
    return Settings()
