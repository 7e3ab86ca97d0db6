import copy
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from prompts.budget import DSEA_MAX_SEQUENCE, DSPA_MAX_SEQUENCE, MIN_SEQUENCE, WHITESPACE

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(ROOT_DIR, "config", "drminer.yaml")
AUTH_TOKEN_ENV = "DRMINER_AUTH_TOKEN"

MODES = ("prompt_head", "baseline")
BACKEND_KINDS = ("remote", "scripted")


class ConfigError(ValueError):
    """Raised when the run configuration is incomplete or inconsistent."""


@dataclass
class BackendConfig:
    kind: str = "remote"
    base_url: Optional[str] = None
    auth_token: Optional[str] = None
    script: Optional[str] = None
    timeout: float = 60
    max_tokens: int = 16


@dataclass
class ModelPaths:
    dsea_head: Optional[str] = None
    dsea_baseline: Optional[str] = None
    dspa_baseline: Optional[str] = None


@dataclass
class Budgets:
    dsea_max: int = DSEA_MAX_SEQUENCE
    dspa_max: int = DSPA_MAX_SEQUENCE
    counter: str = WHITESPACE


@dataclass
class CleaningConfig:
    encoding: str = "cp1252"
    bot_authors: Optional[List[str]] = None
    bot_markers: Optional[List[str]] = None


@dataclass
class RunConfig:
    corpus_dir: str = "data/corpus"
    output_dir: str = "output"
    mode: str = "prompt_head"
    backend: BackendConfig = field(default_factory=BackendConfig)
    models: ModelPaths = field(default_factory=ModelPaths)
    budgets: Budgets = field(default_factory=Budgets)
    lexicon_path: Optional[str] = None
    seed: int = 13
    workers: Optional[int] = None
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    abbreviations: Optional[List[str]] = None
    log_level: str = "INFO"

    @property
    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1

    def validate(self, require_backend: bool = True) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.backend.kind not in BACKEND_KINDS:
            raise ConfigError(f"backend.kind must be one of {BACKEND_KINDS}, got {self.backend.kind!r}")

        if require_backend and self.mode == "prompt_head":
            if self.backend.kind == "scripted" and not self.backend.script:
                raise ConfigError("backend.script is required when backend.kind is scripted")
            if self.backend.kind == "remote" and not self.backend.base_url:
                raise ConfigError("backend.base_url is required in prompt_head mode")

        for name in ("dsea_max", "dspa_max"):
            value = getattr(self.budgets, name)
            if not isinstance(value, int) or value <= MIN_SEQUENCE:
                raise ConfigError(f"budgets.{name} must be an integer > {MIN_SEQUENCE}, got {value!r}")

        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        return self


# -----------------------------
# Loading
# -----------------------------

def _merge(base: Dict, override: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: str) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Config file {path} is not valid YAML/JSON: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a mapping")
    return data


def _build(cls, data: Dict, prefix: str = ""):
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"Unknown config field(s): {', '.join(prefix + k for k in sorted(unknown))}")

    nested = {
        "backend": BackendConfig,
        "models": ModelPaths,
        "budgets": Budgets,
        "cleaning": CleaningConfig,
    }
    kwargs = {}
    for key, value in data.items():
        if cls is RunConfig and key in nested:
            if value is None:
                value = {}
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must be a mapping")
            value = _build(nested[key], value, prefix=f"{key}.")
        kwargs[key] = value
    return cls(**kwargs)


def _apply_overrides(data: Dict, overrides: Optional[Dict[str, Any]]) -> Dict:
    """Aplica claves con puntos (p.ej. 'backend.base_url'); None no sobrescribe."""
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        target = data
        *parents, leaf = dotted.split(".")
        for part in parents:
            child = target.get(part)
            if not isinstance(child, dict):
                child = {}
                target[part] = child
            target = child
        target[leaf] = value
    return data


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    defaults_path: str = DEFAULT_CONFIG_PATH,
    require_backend: bool = True,
) -> RunConfig:
    """
    Valores por defecto (config/drminer.yaml) <- fichero --config <- flags.
    Solo el token del backend puede venir del entorno.
    """
    load_dotenv()

    data = _read_yaml(defaults_path) if os.path.isfile(defaults_path) else {}
    if path:
        data = _merge(data, _read_yaml(path))
    data = _apply_overrides(data, overrides)

    config = _build(RunConfig, data)

    token = os.getenv(AUTH_TOKEN_ENV)
    if token:
        config.backend.auth_token = token

    return config.validate(require_backend)
