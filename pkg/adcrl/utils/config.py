"""
Configuration management.

Process settings come from the environment (optionally a .env file);
experiment settings come from `key = value` files with [agent] and [run]
sections and are validated by the pydantic models in adcrl.models.
"""
import configparser
import os
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import load_dotenv

from adcrl.utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

SECTIONS = ("agent", "run")


class Config:
    """Process-level configuration."""

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("LOG_FILE")

    # Experiments
    SEED: Optional[str] = os.getenv("ADC_SEED")
    OUTPUT_DIR: str = os.getenv("ADC_OUTPUT_DIR", "./runs")
    BASELINE_FILE: str = os.getenv("ADC_BASELINE_FILE", "./data/random_baselines.json")

    @classmethod
    def fallback_seed(cls) -> Optional[int]:
        """Seed taken from ADC_SEED, read at call time so tests can patch the environment."""
        raw = os.getenv("ADC_SEED", cls.SEED or "")
        if not raw:
            return None
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"ADC_SEED must be an integer, got {raw!r}", key="ADC_SEED")

    @classmethod
    def display(cls):
        """Display current configuration."""
        logger.info("Configuration:")
        logger.info("  Log level: %s", cls.LOG_LEVEL)
        logger.info("  Output dir: %s", cls.OUTPUT_DIR)
        logger.info("  Baseline file: %s", cls.BASELINE_FILE)
        logger.info("  Fallback seed: %s", cls.SEED if cls.SEED else "(none)")


def load_config_file(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """
    Read a `key = value` config file.

    Returns:
        {"agent": {...}, "run": {...}} with raw string values. Coercion and
        range checks happen in the pydantic models.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}", key=str(p))

    parser = configparser.ConfigParser(interpolation=None)
    # keep key case as written so diagnostics echo the user's spelling
    parser.optionxform = str
    try:
        parser.read(p, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {p}: {e}")

    sections: Dict[str, Dict[str, str]] = {name: {} for name in SECTIONS}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}] in {p}", key=name)
        sections[name] = dict(parser.items(name))
    return sections


def write_config_file(path: Union[str, Path], sections: Mapping[str, Mapping[str, Any]]) -> Path:
    """Write sections back out in the same `key = value` format."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for name in SECTIONS:
        values = sections.get(name)
        if not values:
            continue
        lines.append(f"[{name}]")
        for key, value in values.items():
            lines.append(f"{key} = {format_config_value(value)}")
        lines.append("")
    p.write_text("\n".join(lines), encoding="utf-8")
    return p


def format_config_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_config_value(v) for v in value)
    if value is None:
        return "none"
    return str(value)


if __name__ == "__main__":
    Config.display()
