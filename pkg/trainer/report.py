"""
Training reports: one record per completed epoch, optionally mirrored to a JSON-lines file.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

logger = logging.getLogger(__name__)

REPORT_NAME = "train_report.jsonl"


@dataclass
class EpochRecord:
    phase: str
    epoch: int
    loss: float
    learning_rate: float
    wall_clock: float
    val_accuracy: Optional[float] = None
    ae_loss: Optional[float] = None
    grad_norm: Optional[float] = None


@dataclass
class TrainReport:
    epochs: List[EpochRecord] = field(default_factory=list)
    checkpoint: Optional[str] = None
    stopped: Optional[str] = None
    ae_evaluations: int = 0
    path: Optional[str] = None

    def add(self, record: EpochRecord) -> None:
        self.epochs.append(record)
        if self.path:
            directory = os.path.dirname(os.path.abspath(self.path))
            os.makedirs(directory, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")

    def extend(self, other: "TrainReport") -> None:
        self.epochs.extend(other.epochs)
        self.ae_evaluations += other.ae_evaluations

    def phase(self, name: str) -> List[EpochRecord]:
        return [r for r in self.epochs if r.phase == name]

    def losses(self, phase: Optional[str] = None) -> List[float]:
        return [r.loss for r in (self.phase(phase) if phase else self.epochs)]

    def learning_rates(self, phase: Optional[str] = None) -> List[float]:
        return [r.learning_rate for r in (self.phase(phase) if phase else self.epochs)]


def read_report(path: str) -> List[EpochRecord]:
    with open(path, encoding="utf-8") as fh:
        return [EpochRecord(**json.loads(line)) for line in fh if line.strip()]
