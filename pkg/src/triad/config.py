"""YAML configuration: hyperparameters, KB/index locations, backend and prices."""

from __future__ import annotations

from pathlib import Path
from typing import Literal as Lit

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .kb.terms import RDFS_LABEL


class ConfigError(ValueError):
    pass


class RoleConfig(BaseModel):
    """Role hyperparameters; the first four default to 3 shots, K=2/2 and 3 retries."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_shots: int = Field(3, ge=0)
    k_entity: int = Field(2, ge=1)
    k_relation: int = Field(2, ge=1)
    retries: int = Field(3, ge=0)
    filter_pool: int = Field(10, ge=1)
    enumeration_cap: int = Field(50, ge=1)
    relation_pool_cap: int = Field(30, ge=1)
    connect_boost: bool = True
    reextract_on_final: bool = False
    retry_temperature: float = Field(0.7, ge=0.0, le=2.0)
    budget_s: float = Field(120.0, gt=0)


class PriceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    prompt_price_per_1k: float = Field(0.0, ge=0)
    completion_price_per_1k: float = Field(0.0, ge=0)


class BackendConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Lit["live", "replay"] = "live"
    model: str = "gpt-4"
    base_url: str | None = None
    max_in_flight: int = Field(4, ge=1)
    max_retries: int = Field(4, ge=0)
    timeout_s: float = Field(60.0, gt=0)
    max_tokens: int = Field(512, ge=1)
    strict_replay: bool = False
    transcript: Path | None = None


class EvalConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    concurrency: int = Field(1, ge=1)
    averaging: Lit["macro", "micro"] = "macro"
    repeat: int = Field(1, ge=1)


class TriadConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kb: Path | None = None
    kb_strict: bool = True
    index_snapshot: Path | None = None
    label_predicates: tuple[str, ...] = (RDFS_LABEL,)
    backend: BackendConfig = BackendConfig()
    prices: dict[str, PriceConfig] = {}
    roles: RoleConfig = RoleConfig()
    eval: EvalConfig = EvalConfig()

    def price_for(self, model: str | None = None) -> PriceConfig:
        return self.prices.get(model or self.backend.model, PriceConfig())


def _resolve(cfg: TriadConfig, base: Path) -> TriadConfig:
    def fix(p: Path | None) -> Path | None:
        return p if p is None or p.is_absolute() else (base / p)

    backend = cfg.backend.model_copy(update={"transcript": fix(cfg.backend.transcript)})
    return cfg.model_copy(update={"kb": fix(cfg.kb), "index_snapshot": fix(cfg.index_snapshot),
                                  "backend": backend})


def parse_config(data: dict | None, base_dir: str | Path = ".") -> TriadConfig:
    try:
        cfg = TriadConfig.model_validate(data or {})
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(x) for x in e['loc'])}: {e['msg']}" for e in exc.errors())
        raise ConfigError(f"invalid config: {problems}") from None
    return _resolve(cfg, Path(base_dir))


def load_config(path: str | Path) -> TriadConfig:
    """Read a YAML config; relative paths resolve against the file's directory."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return parse_config(data, path.parent)
