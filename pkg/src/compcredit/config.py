"""Run configuration: built-in defaults, overridden by a JSON file, overridden by flags."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from compcredit.advantage import DEFAULT_BETA_KL, DEFAULT_CLIP_EPSILON, DEFAULT_EPSILON_STD, DEFAULT_W
from compcredit.scoring import DEFAULT_LEVELS, CompressionLevel, ScoringWeights


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    weights: ScoringWeights = ScoringWeights()
    level_table: tuple[CompressionLevel, ...] = DEFAULT_LEVELS
    w: float = DEFAULT_W
    clip_epsilon: float = DEFAULT_CLIP_EPSILON
    beta_kl: float = DEFAULT_BETA_KL
    epsilon_std: float = DEFAULT_EPSILON_STD
    seed: int = 0
    max_turns: int = 20
    top_k: int = 20
    noise_fraction: float = 0.0
    group_size: int = 8
    policies: tuple[str, ...] = ("explorer",)
    query_ids: tuple[str, ...] | None = None
    strict: bool = True
    corpus_path: Path | None = None
    stopwords_path: Path | None = None
    output_dir: Path = Path("out")
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.w < 0:
            raise ConfigError("w must be >= 0")
        if not 0 < self.clip_epsilon < 1:
            raise ConfigError("clip_epsilon must lie in (0, 1)")
        if self.beta_kl < 0 or self.epsilon_std < 0:
            raise ConfigError("beta_kl and epsilon_std must be >= 0")
        if self.max_turns < 1 or self.top_k < 1:
            raise ConfigError("max_turns and top_k must be >= 1")
        if not 0.0 <= self.noise_fraction <= 1.0:
            raise ConfigError("noise_fraction must lie in [0, 1]")
        if self.group_size < 2:
            raise ConfigError("group_size must be >= 2")
        if len(self.policies) not in (1, self.group_size):
            raise ConfigError("policies must list one name or one per rollout")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        highs = [lv.char_high for lv in self.level_table]
        if not self.level_table or highs != sorted(highs):
            raise ConfigError("levels must be non-empty and sorted by char_high")
        for p in (self.corpus_path, self.stopwords_path):
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"referenced file does not exist: {p}")
        return self

    @property
    def rollout_policies(self) -> list[str]:
        return list(self.policies) * (self.group_size if len(self.policies) == 1 else 1)


_SECTIONS = {
    "advantage": ("w", "clip_epsilon", "beta_kl", "epsilon_std"),
    "simulation": ("seed", "max_turns", "top_k", "noise_fraction", "group_size", "policies", "query_ids", "strict"),
    "paths": ("corpus_path", "stopwords_path", "output_dir"),
}


def _coerce(name: str, value, base: Path):
    if value is None:
        return None
    if name in ("policies", "query_ids"):
        return tuple(str(v) for v in value)
    if name.endswith("_path") or name == "output_dir":
        p = Path(value)
        return p if p.is_absolute() else base / p
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    if kind == "bool":
        return bool(value)
    return value


def config_from_dict(data: dict, base: Path = Path(".")) -> RunConfig:
    known = {"weights", "levels", *_SECTIONS}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {}
    try:
        if "weights" in data:
            kwargs["weights"] = ScoringWeights(**data["weights"])
        if "levels" in data:
            kwargs["level_table"] = tuple(CompressionLevel(**lv) for lv in data["levels"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    for section, names in _SECTIONS.items():
        body = data.get(section, {})
        extra = set(body) - set(names)
        if extra:
            raise ConfigError(f"unknown keys in '{section}': {sorted(extra)}")
        for name in names:
            if name in body:
                kwargs[name] = _coerce(name, body[name], base)
    return RunConfig(**kwargs)


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Defaults < file < explicit overrides (None overrides are ignored)."""
    if path is None:
        cfg = RunConfig()
    else:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
        cfg = config_from_dict(data, base=path.parent)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides).validate()
