"""Key=value configuration file handling and the analysis config hash."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .fusion import DEFAULT_THRESHOLDS, FusionWeights

API_TOKEN_ENV = "BLOOMGATE_API_TOKEN"


@dataclass(frozen=True)
class AppConfig:
    server_port: int = 8765
    cors_origin: str = ""
    require_auth: bool = False
    store_path: str = "./bloomgate-store"
    chat_base_url: str = ""
    chat_model: str = "default"
    chat_timeout_ms: int = 30000
    chat_max_retries: int = 2
    chat_temperature: float = 0.0
    embed_base_url: str = ""
    fusion_weights: FusionWeights = field(default_factory=FusionWeights)
    band_thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS
    max_questions_sync: int = 25
    provider_parallelism: int = 4
    max_body_bytes: int = 16 * 1024 * 1024
    lexical_saturation: float = 0.5

    @property
    def custom_thresholds(self) -> bool:
        return tuple(self.band_thresholds) != DEFAULT_THRESHOLDS


_KEY_SETTERS = {
    "server.port": ("server_port", int),
    "server.cors_origin": ("cors_origin", str),
    "server.require_auth": ("require_auth", None),  # bool, parsed below
    "store.path": ("store_path", str),
    "providers.chat.base_url": ("chat_base_url", str),
    "providers.chat.model": ("chat_model", str),
    "providers.chat.timeout_ms": ("chat_timeout_ms", int),
    "providers.chat.max_retries": ("chat_max_retries", int),
    "providers.chat.temperature": ("chat_temperature", float),
    "providers.embed.base_url": ("embed_base_url", str),
    "limits.max_questions_sync": ("max_questions_sync", int),
    "limits.provider_parallelism": ("provider_parallelism", int),
    "limits.max_body_bytes": ("max_body_bytes", int),
    "lexical.saturation": ("lexical_saturation", float),
}


def _parse_bool(value: str) -> bool:
    if value.lower() in ("true", "yes", "1", "on"):
        return True
    if value.lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load a key=value config file (# comments, dotted keys).

    Unknown keys are rejected so typos fail loudly. A missing path returns
    the defaults.
    """
    cfg = AppConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")

    weights = dict(cfg.fusion_weights.as_dict())
    weights_touched = False

    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if key in _KEY_SETTERS:
                attr, caster = _KEY_SETTERS[key]
                parsed = _parse_bool(value) if caster is None else caster(value)
                cfg = replace(cfg, **{attr: parsed})
            elif key.startswith("fusion.weights."):
                signal = key.removeprefix("fusion.weights.")
                if signal not in weights:
                    raise ConfigError(f"{path}:{line_no}: unknown fusion signal {signal!r}")
                weights[signal] = float(value)
                weights_touched = True
            elif key == "bands.thresholds":
                parts = [float(p.strip()) for p in value.split(",")]
                if len(parts) != 3 or not parts[0] < parts[1] < parts[2]:
                    raise ConfigError(
                        f"{path}:{line_no}: bands.thresholds needs three increasing values"
                    )
                cfg = replace(cfg, band_thresholds=(parts[0], parts[1], parts[2]))
            else:
                raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_no}: bad value for {key}: {exc}") from exc

    if weights_touched:
        try:
            cfg = replace(cfg, fusion_weights=FusionWeights(**weights))
        except ValueError as exc:
            raise ConfigError(f"{path}: invalid fusion weights: {exc}") from exc
    return cfg


def config_hash(
    cfg: AppConfig,
    lexicon_version: str,
    bank_version: str,
    prompt_version: str,
) -> str:
    """Stable digest of everything that shapes a score, so reports from
    different configurations are never silently compared."""
    payload = {
        "weights": cfg.fusion_weights.as_dict(),
        "thresholds": list(cfg.band_thresholds),
        "lexicon_version": lexicon_version,
        "bank_version": bank_version,
        "prompt_version": prompt_version,
        "lexical_saturation": cfg.lexical_saturation,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
