"""
Experiment protocols: signer-dependent (SD), signer-independent (SI) and signer-adapted (SA).
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from common.config import ExperimentConfig, with_updates
from common.errors import DataError
from common.log_context import run_context
from datakit import PROTOCOLS, SD_FOLDS, FrameSource, WordInstance, make_splits
from evalcli.checkpoint import Checkpoint
from evalcli.evaluation import evaluate
from seq2seq import init_params
from .report import REPORT_NAME, TrainReport
from .training import adapt, load_examples, pretrain_unlabeled, train_labeled

logger = logging.getLogger(__name__)


@dataclass
class ProtocolResult:
    protocol: str
    # test LER (%) per run key, e.g. "signer=1/fold=3" or "target=4"
    ler: Dict[str, float] = field(default_factory=dict)
    # SA only: the unadapted SI model on the same SA test words
    unadapted_ler: Dict[str, float] = field(default_factory=dict)
    reports: Dict[str, TrainReport] = field(default_factory=dict)

    @property
    def mean_ler(self) -> float:
        return float(np.mean(list(self.ler.values())))

    @property
    def median_ler(self) -> float:
        return float(np.median(list(self.ler.values())))


def _report_path(out_dir: Optional[str], key: str) -> Optional[str]:
    if not out_dir:
        return None
    return os.path.join(out_dir, key.replace("/", "_"), REPORT_NAME)


def initial_params(config: ExperimentConfig, pool=None):
    """Fresh parameters, pretrained on the unlabeled pool when one is given."""
    params = init_params(config.model, config.train.seed)
    if pool is not None and config.model.has_ae_loss:
        params, _ = pretrain_unlabeled(pool, params, config)
    return params


def _test_ler(params, config: ExperimentConfig, instances: Sequence[WordInstance], source: FrameSource) -> float:
    examples = [(ex.frames, ex.word) for ex in load_examples(instances, source)]
    width = max(config.train.beam_widths)
    return evaluate(params, config.model, examples, beam_width=width, max_len=config.train.max_len).ler


def run_protocol(protocol: str, dataset: Sequence[WordInstance], config: ExperimentConfig, source: FrameSource,
                 *, pool=None, folds: Sequence[int] = SD_FOLDS, targets: Optional[Sequence[int]] = None,
                 out_dir: Optional[str] = None, augment_frames: Optional[int] = None) -> ProtocolResult:
    """
    Train and test every run of a protocol.

    SD: each signer x each fold configuration. SI: each target signer, trained on the others.
    SA: the SI model for each target, adapted on 20% of the target's data and tested on its 70%.
    Test LER uses beam search with the widest configured beam.
    augment_frames overrides config.train.augment_frames for every training and adaptation run.

    Raises:
        DataError: unknown protocol.
    """
    if protocol not in PROTOCOLS:
        raise DataError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    if augment_frames is not None:
        config = with_updates(config, augment_frames=augment_frames)
    seed = config.train.seed
    signers = sorted({inst.signer for inst in dataset})
    result = ProtocolResult(protocol)

    with run_context(protocol=protocol, seed=seed):
        if protocol == "SD":
            for signer in signers:
                for fold in folds:
                    key = f"signer={signer}/fold={fold}"
                    with run_context(fold=fold):
                        split = make_splits(dataset, "SD", fold, seed, signer=signer)
                        params, report = train_labeled(split, initial_params(config, pool), config, source,
                                                       report_path=_report_path(out_dir, key))
                        result.ler[key] = _test_ler(params, config, split.test, source)
                        result.reports[key] = report
        else:
            for target in (targets or signers):
                key = f"target={target}"
                with run_context(target=target):
                    si_split = make_splits(dataset, "SI", target, seed)
                    params, report = train_labeled(si_split, initial_params(config, pool), config, source,
                                                   report_path=_report_path(out_dir, key))
                    if protocol == "SI":
                        result.ler[key] = _test_ler(params, config, si_split.test, source)
                        result.reports[key] = report
                        continue
                    sa_split = make_splits(dataset, "SA", target, seed)
                    si_checkpoint = Checkpoint(model=config.model,
                                               params={n: t.data for n, t in params.items()})
                    adapted, adapt_report = adapt(si_checkpoint, sa_split, config, source,
                                                  report_path=_report_path(out_dir, f"{key}/adapt"))
                    report.extend(adapt_report)
                    result.unadapted_ler[key] = _test_ler(params, config, sa_split.test, source)
                    result.ler[key] = _test_ler(adapted, config, sa_split.test, source)
                    result.reports[key] = report
        for key, ler in result.ler.items():
            logger.info(f"{key}: LER {ler:.2f}%")

    logger.info(f"{protocol}: mean LER {result.mean_ler:.2f}% over {len(result.ler)} runs")
    return result
