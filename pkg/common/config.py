"""
Configuration for models, synthetic data and training runs.

Config files are flat KEY=VALUE text (parsed with python-dotenv). Every key is the
lower-case name of a field of ModelConfig, DataConfig or TrainConfig; unknown keys
are errors. Precedence: defaults < config file < FINGERSPELL_<KEY> environment
variables < explicit overrides passed by the caller (CLI flags).
"""

import os
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Mapping, Optional, Tuple, get_type_hints

from dotenv import dotenv_values, load_dotenv

from common.errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "FINGERSPELL_"

# Feature extractor modes. "none" is the end-to-end MLP-feature model with no auto-encoder loss.
MODES = ("ae", "dae", "vae", "none")
CORRUPTION_KINDS = ("mask", "gaussian")
ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class ModelConfig:
    mode: str = "vae"
    image_size: int = 64
    hidden_units: int = 800
    latent_dim: int = 100
    lstm_hidden: int = 128
    embed_dim: int = 128
    attention_dim: int = 128
    learn_output_variance: bool = False
    logvar_clamp: float = 8.0
    # odd count of neighbouring frames whose features feed each encoder step
    feature_window: int = 1
    letters: str = ALPHABET

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("image_size", "hidden_units", "latent_dim", "lstm_hidden", "embed_dim", "attention_dim"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.latent_dim >= self.image_dim:
            raise ConfigError(f"latent_dim ({self.latent_dim}) must be smaller than image_dim ({self.image_dim})")
        if not self.letters or len(set(self.letters)) != len(self.letters):
            raise ConfigError(f"letters must be non-empty and unique, got {self.letters!r}")
        if self.logvar_clamp <= 0:
            raise ConfigError(f"logvar_clamp must be positive, got {self.logvar_clamp}")
        if self.feature_window < 1 or self.feature_window % 2 == 0:
            raise ConfigError(f"feature_window must be odd and >= 1, got {self.feature_window}")

    @property
    def image_dim(self) -> int:
        return self.image_size * self.image_size

    @property
    def has_ae_loss(self) -> bool:
        return self.mode != "none"


@dataclass(frozen=True)
class DataConfig:
    n_signers: int = 4
    words_per_signer: int = 100
    frames_per_letter: int = 4
    transition_frames: int = 2
    word_min_len: int = 3
    word_max_len: int = 8
    unlabeled_frames: int = 2000
    unlabeled_styles: int = 6
    data_seed: int = 0

    def __post_init__(self):
        if self.n_signers < 1 or self.words_per_signer < 1:
            raise ConfigError("n_signers and words_per_signer must be >= 1")
        if self.frames_per_letter < 1 or self.transition_frames < 0:
            raise ConfigError("frames_per_letter must be >= 1 and transition_frames >= 0")
        if not 1 <= self.word_min_len <= self.word_max_len:
            raise ConfigError(f"invalid word length range [{self.word_min_len}, {self.word_max_len}]")


@dataclass(frozen=True)
class TrainConfig:
    lambda_ae: float = 1.0
    batch_size: int = 8
    learning_rate: float = 0.001
    decay_factor: float = 0.9
    patience: int = 3
    lr_floor: float = 1e-5
    max_epochs: int = 50
    pretrain_epochs: int = 10
    adapt_epochs: int = 20
    seed: int = 0
    retain_p: float = 0.8
    clip_norm: float = 5.0
    joint: bool = True
    corruption_kind: str = "mask"
    corruption_strength: float = 0.25
    max_len: int = 20
    validate_beam_width: int = 1
    beam_widths: Tuple[int, ...] = (1, 3, 5)
    # frames of geometric replicates added to every labeled training set; 0 disables
    augment_frames: int = 0

    def __post_init__(self):
        if self.lambda_ae < 0:
            raise ConfigError(f"lambda_ae must be >= 0, got {self.lambda_ae}")
        if not 0.0 < self.decay_factor < 1.0:
            raise ConfigError(f"decay_factor must be in (0, 1), got {self.decay_factor}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.retain_p <= 1.0:
            raise ConfigError(f"retain_p must be in (0, 1], got {self.retain_p}")
        if self.corruption_kind not in CORRUPTION_KINDS:
            raise ConfigError(f"corruption_kind must be one of {CORRUPTION_KINDS}, got {self.corruption_kind!r}")
        if self.max_len < 1 or self.validate_beam_width < 1 or any(b < 1 for b in self.beam_widths):
            raise ConfigError("max_len and beam widths must be >= 1")
        if self.clip_norm < 0:
            raise ConfigError(f"clip_norm must be >= 0 (0 disables clipping), got {self.clip_norm}")
        if self.augment_frames < 0:
            raise ConfigError(f"augment_frames must be >= 0, got {self.augment_frames}")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    data: DataConfig = field(default_factory=DataConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def as_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for section in (self.model, self.data, self.train):
            for f in fields(section):
                out[f.name] = getattr(section, f.name)
        return out


_SECTIONS = {"model": ModelConfig, "data": DataConfig, "train": TrainConfig}


def _key_index() -> Dict[str, Tuple[str, type]]:
    """Map every config key to (section, declared type)."""
    index: Dict[str, Tuple[str, type]] = {}
    for section, cls in _SECTIONS.items():
        hints = get_type_hints(cls)
        for f in fields(cls):
            index[f.name] = (section, hints[f.name])
    return index


def _coerce(key: str, raw: Any, kind: type) -> Any:
    """Convert a raw string value to the declared field type."""
    if not isinstance(raw, str):
        return raw
    value = raw.strip()
    try:
        if kind is bool:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind is int:
            return int(value)
        if kind is float:
            return float(value)
        if kind is str:
            return value
        # Tuple[int, ...]
        return tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"Cannot parse value {raw!r} for config key '{key}'") from None


def _apply(values: Mapping[str, Any], source: str, sections: Dict[str, Dict[str, Any]]) -> None:
    index = _key_index()
    for raw_key, raw in values.items():
        key = raw_key.strip().lower()
        if key not in index:
            raise ConfigError(f"Unknown config key '{raw_key}' in {source}")
        if raw is None:
            raise ConfigError(f"Config key '{raw_key}' in {source} has no value")
        section, kind = index[key]
        sections[section][key] = _coerce(key, raw, kind)


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None,
                use_env: bool = True) -> ExperimentConfig:
    """
    Build an ExperimentConfig from defaults, a config file, environment and overrides.

    Raises:
        ConfigError: unknown key, unparsable value, or a value violating a field invariant.
    """
    sections: Dict[str, Dict[str, Any]] = {name: {} for name in _SECTIONS}

    if path:
        if not os.path.exists(path):
            raise ConfigError(f"Config file not found: {path}")
        _apply(dotenv_values(path), path, sections)
        logger.debug(f"Loaded config file {path}")

    if use_env:
        load_dotenv(override=False)
        env_values = {
            k[len(ENV_PREFIX):]: v for k, v in os.environ.items() if k.startswith(ENV_PREFIX)
        }
        if env_values:
            _apply(env_values, "environment", sections)

    if overrides:
        _apply({k: v for k, v in overrides.items() if v is not None}, "overrides", sections)

    return ExperimentConfig(
        model=ModelConfig(**sections["model"]),
        data=DataConfig(**sections["data"]),
        train=TrainConfig(**sections["train"]),
    )


def with_updates(config: ExperimentConfig, **changes: Any) -> ExperimentConfig:
    """Return a copy of config with the named keys replaced, routed to their sections."""
    index = _key_index()
    grouped: Dict[str, Dict[str, Any]] = {name: {} for name in _SECTIONS}
    for key, value in changes.items():
        if key not in index:
            raise ConfigError(f"Unknown config key '{key}'")
        grouped[index[key][0]][key] = value
    return ExperimentConfig(
        model=replace(config.model, **grouped["model"]),
        data=replace(config.data, **grouped["data"]),
        train=replace(config.train, **grouped["train"]),
    )
