"""
Tests for configuration loading
"""
import os

import pytest

from common.config import DataConfig, ModelConfig, TrainConfig, load_config, with_updates
from common.errors import ConfigError

TINY_ENV = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "configs", "tiny.env"))


@pytest.mark.unit
class TestLoadConfig:

    def test_defaults(self):
        config = load_config(use_env=False)
        assert config.model == ModelConfig()
        assert config.data == DataConfig()
        assert config.train == TrainConfig()

    def test_tiny_file(self):
        config = load_config(TINY_ENV, use_env=False)
        assert config.model.mode == "vae"
        assert config.model.image_dim == 64
        assert config.data.n_signers == 2
        assert config.train.retain_p == 1.0
        assert config.train.beam_widths == (1, 3)

    def test_precedence(self, monkeypatch):
        monkeypatch.setenv("FINGERSPELL_BATCH_SIZE", "6")
        monkeypatch.setenv("FINGERSPELL_MAX_LEN", "7")
        config = load_config(TINY_ENV, overrides={"max_len": 9, "seed": None})
        assert config.train.batch_size == 6
        assert config.train.max_len == 9
        assert config.train.seed == 0

    def test_environment_ignored_when_disabled(self, monkeypatch):
        monkeypatch.setenv("FINGERSPELL_BATCH_SIZE", "6")
        assert load_config(TINY_ENV, use_env=False).train.batch_size == 4

    def test_bool_values(self, tmp_path):
        path = tmp_path / "flags.env"
        path.write_text("joint=no\nlearn_output_variance=TRUE\n")
        config = load_config(str(path), use_env=False)
        assert config.train.joint is False
        assert config.model.learn_output_variance is True

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "absent.env"), use_env=False)

    @pytest.mark.parametrize("line", [
        "hidden_layers=3",
        "batch_size=four",
        "joint=maybe",
        "mode=gan",
        "retain_p=0",
        "decay_factor=1.0",
        "lambda_ae=-1",
        "latent_dim=5000",
    ])
    def test_invalid_entries(self, tmp_path, line):
        path = tmp_path / "bad.env"
        path.write_text(f"{line}\n")
        with pytest.raises(ConfigError):
            load_config(str(path), use_env=False)


@pytest.mark.unit
class TestWithUpdates:

    def test_routes_keys_to_sections(self):
        config = with_updates(load_config(use_env=False), mode="ae", n_signers=3, lambda_ae=0.5)
        assert (config.model.mode, config.data.n_signers, config.train.lambda_ae) == ("ae", 3, 0.5)

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            with_updates(load_config(use_env=False), depth=3)

    def test_as_dict_round_trip(self):
        config = load_config(TINY_ENV, use_env=False)
        assert with_updates(load_config(use_env=False), **config.as_dict()) == config
