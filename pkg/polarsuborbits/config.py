"""Run configuration: defaults, environment (.env via python-dotenv) and explicit overrides."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, List, Optional, TypeVar

from dotenv import load_dotenv

from .errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

ENV_PREFIX = "POLAR_SUBORBITS_"
ENV_KEYS = ("threads", "vertex_cap", "pair_cap", "group_cap", "seed")


@dataclass
class RunConfig:
    q: int = 3
    nu: int = 2
    delta: int = 2
    threads: int = 1
    vertex_cap: int = 20000
    pair_cap: int = 100000
    group_cap: int = 200000
    alt_cap: int = 20000
    output_format: str = "json"
    output_path: Optional[str] = None
    samples: int = 20
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        for name in ("vertex_cap", "pair_cap", "group_cap", "alt_cap", "samples", "seed"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.nu < 1:
            raise ConfigError(f"nu must be at least 1, got {self.nu}")
        if self.delta not in (0, 1, 2):
            raise ConfigError(f"delta must be 0, 1 or 2, got {self.delta}")
        return self

    def to_dict(self):
        return asdict(self)


def _env_int(key: str) -> Optional[int]:
    raw = os.getenv(ENV_PREFIX + key.upper())
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{ENV_PREFIX + key.upper()} must be an integer, got {raw!r}") from e


def load_config(**overrides) -> RunConfig:
    """Defaults < environment < explicit overrides (None means 'not given')."""
    load_dotenv()
    known = {f.name for f in fields(RunConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")

    values = {}
    for key in ENV_KEYS:
        env_value = _env_int(key)
        if env_value is not None:
            values[key] = env_value
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**values).validate()
    logger.debug("run configuration: %s", config)
    return config


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """func over items on at most `threads` workers; results keep the input order."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
