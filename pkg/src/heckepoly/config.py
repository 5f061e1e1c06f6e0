"""Run configuration: defaults, flat ``key = value`` files, environment, flags.

Precedence (lowest first): defaults, config file, HECKEPOLY_CACHE_DIR, command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from heckepoly.errors import InvalidArgument

CACHE_ENV = "HECKEPOLY_CACHE_DIR"


@dataclass
class RunConfig:
    weight: int = 12
    limit: int | None = None
    prime_bound: int = 10**4
    edge_prime_bound: int | None = None
    checkpoint_start: float = 3.0
    checkpoint_stop: float = 6.0
    checkpoints_per_decade: int = 8
    r: int = 2
    method: str = "sieve"
    poly: str = "alpha"
    out: str = "csv"
    cache_dir: str = ".heckepoly-cache"
    output_dir: str = "results"
    threads: int = 0

    @property
    def n_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def validate(self) -> None:
        if self.prime_bound < 100:
            raise InvalidArgument(f"prime_bound must be >= 100, got {self.prime_bound}")
        if self.out not in ("csv", "json"):
            raise InvalidArgument(f"out must be csv or json, got {self.out!r}")
        if self.method not in ("sieve", "lattice"):
            raise InvalidArgument(f"method must be sieve or lattice, got {self.method!r}")
        if self.threads < 0:
            raise InvalidArgument("threads must be >= 0")
        if self.limit is not None and self.limit < 1:
            raise InvalidArgument("limit must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if raw.lower() in ("none", ""):
        return None
    if kind.startswith("int"):
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    if kind.startswith("float"):
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise InvalidArgument(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = _convert(key, value)
        except ValueError as exc:
            raise InvalidArgument(f"config line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(config_file: str | None = None, overrides: dict | None = None,
                 environ: dict | None = None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = {}
    if config_file:
        values.update(parse_config_text(Path(config_file).read_text()))
    if environ.get(CACHE_ENV):
        values["cache_dir"] = environ[CACHE_ENV]
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg
