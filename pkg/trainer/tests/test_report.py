"""
Tests for training reports
"""
import json

import pytest

from trainer import EpochRecord, TrainReport, read_report


def record(phase, epoch, loss, lr=0.001):
    return EpochRecord(phase=phase, epoch=epoch, loss=loss, learning_rate=lr, wall_clock=0.5)


@pytest.mark.unit
class TestTrainReport:

    def test_phase_views(self):
        report = TrainReport()
        report.add(record("pretrain", 1, 3.0))
        report.add(record("train", 1, 2.0))
        report.add(record("train", 2, 1.5, lr=0.0009))
        assert report.losses() == [3.0, 2.0, 1.5]
        assert report.losses("train") == [2.0, 1.5]
        assert report.learning_rates("train") == [0.001, 0.0009]
        assert report.phase("adapt") == []

    def test_jsonl_mirror(self, tmp_path):
        path = str(tmp_path / "nested" / "report.jsonl")
        report = TrainReport(path=path)
        report.add(record("train", 1, 2.25))
        report.add(EpochRecord("train", 2, 1.75, 0.001, 0.4, val_accuracy=0.5, ae_loss=0.1, grad_norm=2.0))
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[1])["val_accuracy"] == 0.5
        assert read_report(path) == report.epochs

    def test_in_memory_only(self, tmp_path):
        report = TrainReport()
        report.add(record("train", 1, 1.0))
        assert list(tmp_path.iterdir()) == []

    def test_extend(self):
        si, sa = TrainReport(ae_evaluations=4), TrainReport(ae_evaluations=2)
        si.add(record("train", 1, 1.0))
        sa.add(record("adapt", 1, 0.5))
        si.extend(sa)
        assert [r.phase for r in si.epochs] == ["train", "adapt"]
        assert si.ae_evaluations == 6
