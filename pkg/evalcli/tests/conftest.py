"""
Shared fixtures for evaluation and command-line tests
"""
import logging
import os

import pytest

from common.config import load_config
from evalcli import save_checkpoint
from seq2seq import init_params

TINY_ENV = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "configs", "tiny.env"))
PACKAGES = ("evalcli", "numcore", "features", "seq2seq", "decode", "datakit", "trainer")


@pytest.fixture(autouse=True)
def reset_package_loggers():
    """setup_logging detaches package loggers from the root; undo it after each test."""
    yield
    for name in PACKAGES:
        logger = logging.getLogger(name)
        for handler in logger.handlers:
            handler.close()
        logger.handlers = []
        logger.propagate = True


@pytest.fixture
def tiny_env():
    return TINY_ENV


@pytest.fixture
def tiny_config():
    return load_config(TINY_ENV, use_env=False)


@pytest.fixture
def tiny_checkpoint(tmp_path, tiny_config):
    path = str(tmp_path / "model.fspk")
    save_checkpoint(path, init_params(tiny_config.model, 0), tiny_config.model, seeds={"seed": 0})
    return path
