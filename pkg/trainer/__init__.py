"""
Training orchestration: unlabeled pretraining, multitask training, adaptation and protocols.
"""

from .report import EpochRecord, TrainReport, read_report, REPORT_NAME
from .training import (
    LabeledExample,
    load_examples,
    augmented_examples,
    fit_autoencoder,
    pretrain_unlabeled,
    train_labeled,
    adapt,
)
from .protocol import ProtocolResult, initial_params, run_protocol

__all__ = [
    "EpochRecord", "TrainReport", "read_report", "REPORT_NAME", "LabeledExample", "load_examples",
    "augmented_examples", "fit_autoencoder", "pretrain_unlabeled", "train_labeled", "adapt",
    "ProtocolResult", "initial_params", "run_protocol",
]
