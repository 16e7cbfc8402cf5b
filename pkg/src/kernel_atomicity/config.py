"""Configuration management for the kernel atomicity toolkit."""

import os
from dataclasses import dataclass, replace
from typing import Any

from kernel_atomicity.utils.errors import ConfigurationError

# Load environment variables from .env file if python-dotenv is available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass


@dataclass(frozen=True)
class AtomicityConfig:
    """Caps and switches shared by every verification entry point."""

    max_order: int = 10_000
    associativity_cap: int = 512
    associativity_samples: int = 10_000
    max_validate: int = 2048
    max_action_validate: int = 10_000_000
    max_enumeration: int = 1_000_000
    family_enumeration_cap: int = 4096
    brute_force_cap: int = 2 ** 20
    seed: int = 0
    allow_sampled: bool = False
    self_check: bool = True
    log_level: str = "WARNING"

    def with_overrides(self, **overrides: Any) -> "AtomicityConfig":
        """Return a copy with the given fields replaced; ``None`` values are ignored."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigurationError(f"{name} must be non-negative, got {value}")
    return value


def _env_bool(name: str, default: bool) -> bool:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return raw.lower() in ("true", "1", "yes")


def load_config() -> AtomicityConfig:
    """Load configuration from environment variables.

    Returns:
        AtomicityConfig: Caps and switches, defaults where a variable is unset

    Raises:
        ConfigurationError: If a numeric variable does not parse
    """
    return AtomicityConfig(
        max_order=_env_int("ATOMICITY_MAX_ORDER", 10_000),
        associativity_cap=_env_int("ATOMICITY_ASSOCIATIVITY_CAP", 512),
        associativity_samples=_env_int("ATOMICITY_ASSOCIATIVITY_SAMPLES", 10_000),
        max_validate=_env_int("ATOMICITY_MAX_VALIDATE", 2048),
        max_action_validate=_env_int("ATOMICITY_MAX_ACTION_VALIDATE", 10_000_000),
        max_enumeration=_env_int("ATOMICITY_MAX_ENUMERATION", 1_000_000),
        family_enumeration_cap=_env_int("ATOMICITY_FAMILY_ENUMERATION_CAP", 4096),
        brute_force_cap=_env_int("ATOMICITY_BRUTE_FORCE_CAP", 2 ** 20),
        seed=_env_int("ATOMICITY_SEED", 0),
        allow_sampled=_env_bool("ATOMICITY_ALLOW_SAMPLED", False),
        self_check=_env_bool("ATOMICITY_SELF_CHECK", True),
        log_level=os.environ.get("ATOMICITY_LOG_LEVEL", "WARNING").upper(),
    )
