# pylint:disable=invalid-name
"""config.py

Run configuration. Precedence: defaults < ``key = value`` config file <
environment (ONTOPRED_THREADS) < command line flags.
"""

import dataclasses
import io
import math
import os
from dataclasses import dataclass

from dotenv.parser import parse_stream

from .const import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_DEPTH_CAP,
    DEFAULT_EPOCHS,
    DEFAULT_LAYERS,
    DEFAULT_LR,
    DEFAULT_SCORE_FLOOR,
    DEFAULT_SEED,
    MAX_LAYERS,
    THREADS_ENV,
    Namespace,
)
from .exceptions import ParseError, UsageError
from .utils import read_text

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    # inputs / outputs
    ontology: str = None
    annotations: str = None
    embeddings: str = None
    model: str = None
    predictions: str = None
    truth: str = None
    out: str = None
    curve_out: str = None
    # pipeline
    namespace: str = None
    experimental_only: bool = True
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    lr: float = DEFAULT_LR
    layers: int = DEFAULT_LAYERS
    seed: int = DEFAULT_SEED
    depth_cap: int = DEFAULT_DEPTH_CAP
    hidden_dim: int = 0  # 0: min(max depth, depth_cap)
    projection_relu: bool = False
    score_floor: float = DEFAULT_SCORE_FLOOR
    propagate_scores: bool = False
    threads: int = None

    def resolved(self) -> dict[str, str]:
        return {
            f.name: "" if getattr(self, f.name) is None else str(getattr(self, f.name))
            for f in dataclasses.fields(self)
        }


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_TYPES = {
    name: type(f.default) if f.default is not None else str
    for name, f in _FIELDS.items()
}
_TYPES["threads"] = int


def coerce(key: str, value: str):
    if key not in _FIELDS:
        raise UsageError(f"unknown configuration key {key!r}")
    kind = _TYPES[key]
    text = value.strip()
    if kind is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise UsageError(f"{key}: expected a boolean, got {value!r}")
    try:
        return kind(text)
    except ValueError as exc:
        raise UsageError(f"{key}: expected {kind.__name__}, got {value!r}") from exc


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse dotenv style `key = value` lines; `-` in keys reads as `_`."""
    values = {}
    for binding in parse_stream(io.StringIO(text)):
        if binding.error or (binding.key is not None and binding.value is None):
            raise UsageError(
                f"{source}:{binding.original.line}: expected 'key = value'"
            )
        if binding.key is None:
            continue
        key = binding.key.replace("-", "_")
        values[key] = coerce(key, binding.value)
    return values


def load_config_file(path) -> dict:
    try:
        text = read_text(path)
    except ParseError as err:
        raise UsageError(str(err)) from err
    return parse_config_text(text, source=str(path))


def write_config_file(path, config: RunConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in config.resolved().items():
            if value != "":
                f.write(f"{key} = {value}\n")


def build_config(file_values: dict, flag_values: dict) -> RunConfig:
    config = RunConfig(**file_values)
    env_threads = os.environ.get(THREADS_ENV, "")
    if env_threads:
        config.threads = coerce("threads", env_threads)
    for key, value in flag_values.items():
        if value is not None and key in _FIELDS:
            setattr(config, key, value)
    if config.threads is None:
        config.threads = default_threads()
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Range checks that would otherwise fail deep inside the pipeline."""
    for key in ("threads", "epochs", "batch_size", "depth_cap"):
        if getattr(config, key) < 1:
            raise UsageError(f"{key} must be at least 1")
    if config.hidden_dim < 0:
        raise UsageError("hidden_dim must be 0 (automatic) or positive")
    if not 1 <= config.layers <= MAX_LAYERS:
        raise UsageError(f"layers must be within 1..{MAX_LAYERS}")
    if not (math.isfinite(config.lr) and config.lr > 0):
        raise UsageError("lr must be a positive number")
    if not 0 <= config.seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if not 0.0 <= config.score_floor <= 1.0:
        raise UsageError("score_floor must be within [0, 1]")
    if config.namespace is not None:
        names = [ns.value for ns in Namespace]
        if str(config.namespace).upper() not in names:
            raise UsageError(
                f"unknown namespace {config.namespace!r}, expected one of "
                f"{', '.join(names)}"
            )
