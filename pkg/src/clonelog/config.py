"""Run configuration: nested dataclasses loaded from JSON or YAML."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any

import yaml

from clonelog.clones import WEIGHT_KEYS, DetectorConfig
from clonelog.corpus import CorpusConfig
from clonelog.ingest import LEVELS, LwkConfig
from clonelog.lm.recurrent import PROFILES, LmHyperparams


class ConfigError(ValueError):
    pass


@dataclass
class LwkSection:
    receivers: list[str] = field(default_factory=lambda: ["log", "logger", "mylogger"])
    levels: list[str] = field(default_factory=lambda: list(LEVELS))
    bare_wrappers: list[str] = field(default_factory=list)

    def build(self) -> LwkConfig:
        return LwkConfig(tuple(self.receivers), tuple(self.levels), tuple(self.bare_wrappers))


@dataclass
class DetectorSection:
    threshold: float = 0.85
    weights: dict[str, float] = field(default_factory=lambda: {k: 1.0 / len(WEIGHT_KEYS) for k in WEIGHT_KEYS})
    sloc_ratio_filter: float = 3.0

    def build(self) -> DetectorConfig:
        return DetectorConfig(self.threshold, dict(self.weights), self.sloc_ratio_filter)


@dataclass
class CorpusSection:
    lowercase: bool = True
    min_count: int = 1
    keep_duplicates: bool = True

    def build(self) -> CorpusConfig:
        return CorpusConfig(self.lowercase, self.min_count, self.keep_duplicates)


@dataclass
class LmSection:
    model_kind: str = "lstm"  # or "ngram"
    profile: str = "desk"
    overrides: dict[str, Any] = field(default_factory=dict)
    ngram_k: float = 0.0

    def hyperparams(self, window: int, seed: int) -> LmHyperparams:
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown lm profile {self.profile!r}")
        unknown = set(self.overrides) - set(LmHyperparams.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown lm overrides: {sorted(unknown)}")
        return PROFILES[self.profile](**{**self.overrides, "window": window, "seed": seed})


@dataclass
class ExperimentSection:
    modes: list[str] = field(default_factory=lambda: ["raw", "si_only", "full"])
    variants: list[str] = field(default_factory=lambda: ["no_nlp", "nlp_1", "nlp_3"])
    detect_mode: str = "full"
    max_negatives: int | None = None


@dataclass
class RunConfig:
    include_globs: list[str] = field(default_factory=lambda: ["*.java"])
    project_id: str | None = None
    seed: int = 0
    lwk: LwkSection = field(default_factory=LwkSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    corpus: CorpusSection = field(default_factory=CorpusSection)
    lm: LmSection = field(default_factory=LmSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    def validate(self) -> "RunConfig":
        try:
            self.lwk.build()
            self.detector.build()
            self.corpus.build()
            self.lm.hyperparams(1, self.seed)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.lm.model_kind not in ("lstm", "ngram"):
            raise ConfigError(f"unknown model kind {self.lm.model_kind!r}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _build(cls, data: Any, where: str):
    if not is_dataclass(cls):
        return data
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'config'}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = known[name].default_factory() if callable(known[name].default_factory) else None
        sub = type(default) if is_dataclass(default) else None
        kwargs[name] = _build(sub, value, f"{where}.{name}".lstrip(".")) if sub else value
    return cls(**kwargs)


def from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data or {}, "").validate()


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig().validate()
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    return from_dict(data)
