"""
Training loops.

The curriculum is two-phase: pretrain_unlabeled fits the feature extractor on unlabeled
frames with the auto-encoder loss alone, then train_labeled minimizes the multitask loss
on labeled words. adapt warm-starts from a signer-independent checkpoint and continues
train_labeled on the target signer's adaptation data.

Gradients of a batch are summed in instance-index order and averaged, clipped by global
norm, then applied with Adam. The learning rate decays by decay_factor whenever the
monitored score (validation letter accuracy) has not improved for `patience` epochs;
training stops at max_epochs or once the rate falls below lr_floor.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

import numcore as nc
from common.config import ExperimentConfig
from common.errors import ConfigError, DataError
from common.log_context import run_context
from datakit import ExperimentSplit, FrameSource, WordInstance, make_augmented_set
from evalcli.checkpoint import Checkpoint, check_architecture, load_checkpoint, save_checkpoint
from evalcli.evaluation import evaluate
from features import CorruptionSpec, extract_features
from numcore import AdamState, Tape, Tensor, adam_step, backprop, clip_by_global_norm
from seq2seq import multitask_breakdown, param_groups
from .report import EpochRecord, TrainReport

logger = logging.getLogger(__name__)

Params = Dict[str, Tensor]

PRETRAIN_BATCH_FRAMES = 32


@dataclass(frozen=True)
class LabeledExample:
    index: int
    signer: int
    word: str
    frames: np.ndarray


def load_examples(instances: Sequence[WordInstance], source: FrameSource) -> List[LabeledExample]:
    """Fetch and flatten the frames of each instance."""
    return [
        LabeledExample(inst.index, inst.signer, inst.word, source.frames(inst).flat())
        for inst in instances
    ]


def augmented_examples(instances: Sequence[WordInstance], source: FrameSource, n_frames: int,
                       seed: int) -> List[LabeledExample]:
    """
    Scaled, shifted and rotated replicates of the instances, about n_frames frames in all.
    Replicates are indexed after the largest instance index so their dropout streams differ.
    """
    replicates = make_augmented_set([source.frames(inst) for inst in instances], n_frames, seed)
    offset = max(inst.index for inst in instances) + 1
    return [LabeledExample(offset + k, rep.signer, rep.word, rep.flat()) for k, rep in enumerate(replicates)]


def _corruption(config: ExperimentConfig) -> CorruptionSpec:
    return CorruptionSpec(config.train.corruption_kind, config.train.corruption_strength, config.train.seed)


def _batches(n: int, batch_size: int, seed: int, *labels) -> List[np.ndarray]:
    order = nc.rng_for(seed, "shuffle", *labels).permutation(n)
    return [np.sort(order[i:i + batch_size]) for i in range(0, n, batch_size)]


def _mean_grads(total: Dict[str, np.ndarray], count: int) -> Dict[str, np.ndarray]:
    return {name: g / count for name, g in total.items()}


def _apply_update(params: Params, grads: Dict[str, np.ndarray], state: AdamState,
                  clip_norm: float) -> Tuple[Params, float]:
    grads, norm = clip_by_global_norm(grads, clip_norm)
    params, _ = adam_step(params, grads, state)
    return params, norm


def fit_autoencoder(frames: np.ndarray, params: Mapping[str, Tensor], config: ExperimentConfig,
                    max_epochs: int, phase: str = "pretrain", report: Optional[TrainReport] = None
                    ) -> Tuple[Params, TrainReport]:
    """Minimize the auto-encoder loss over frames, updating only feature-extractor parameters."""
    model, train = config.model, config.train
    params = dict(params)
    report = report or TrainReport()
    trainable = param_groups(params)["features"]
    state = AdamState.create({n: params[n] for n in trainable}, lr=train.learning_rate)
    corruption = _corruption(config)

    with run_context(phase=phase):
        for epoch in range(1, max_epochs + 1):
            with run_context(epoch=epoch):
                started = time.perf_counter()
                losses, norm = [], 0.0
                for k, batch in enumerate(_batches(len(frames), PRETRAIN_BATCH_FRAMES, train.seed, phase, epoch)):
                    with Tape() as tape:
                        out = extract_features(frames[batch], params, model, seed=train.seed, training=True,
                                               retain_p=train.retain_p, corruption=corruption,
                                               compute_loss=True, label=f"{phase}/e{epoch}/b{k}")
                    report.ae_evaluations += out.ae_evaluations
                    grads = backprop(out.ae_loss, tape, {n: params[n] for n in trainable})
                    params, norm = _apply_update(params, grads, state, train.clip_norm)
                    losses.append(out.ae_loss.item())
                record = EpochRecord(phase=phase, epoch=epoch, loss=float(np.mean(losses)),
                                     learning_rate=state.lr, wall_clock=time.perf_counter() - started,
                                     ae_loss=float(np.mean(losses)), grad_norm=norm)
                report.add(record)
                logger.info(f"AE loss {record.loss:.4f} ({record.wall_clock:.1f}s)")
    return params, report


def pretrain_unlabeled(pool, params: Mapping[str, Tensor], config: ExperimentConfig,
                       max_epochs: Optional[int] = None, report_path: Optional[str] = None
                       ) -> Tuple[Params, TrainReport]:
    """
    First curriculum phase: auto-encoder loss only, over unlabeled frames.
    Sequence-model parameters are passed through untouched.

    Raises:
        ConfigError: the mode has no auto-encoder loss.
        DataError: empty pool.
    """
    if not config.model.has_ae_loss:
        raise ConfigError(f"mode {config.model.mode!r} has no auto-encoder loss to pretrain")
    frames = np.asarray(pool, dtype=np.float64)
    if frames.size == 0:
        raise DataError("unlabeled pool is empty")
    frames = frames.reshape(frames.shape[0], -1)
    epochs = config.train.pretrain_epochs if max_epochs is None else max_epochs
    logger.info(f"Pretraining on {len(frames)} unlabeled frames for {epochs} epochs")
    return fit_autoencoder(frames, params, config, epochs, report=TrainReport(path=report_path))


def _validation_accuracy(params: Params, config: ExperimentConfig, examples: Sequence[LabeledExample]) -> float:
    result = evaluate(params, config.model, [(ex.frames, ex.word) for ex in examples],
                      beam_width=config.train.validate_beam_width, max_len=config.train.max_len)
    return result.letter_accuracy


def _fit_sequence(examples: Sequence[LabeledExample], validation: Sequence[LabeledExample], params: Params,
                  config: ExperimentConfig, lambda_ae: float, trainable: Sequence[str], max_epochs: int,
                  phase: str, report: TrainReport) -> Params:
    model, train = config.model, config.train
    state = AdamState.create({n: params[n] for n in trainable}, lr=train.learning_rate)
    corruption = _corruption(config)
    best: Optional[float] = None
    stale = 0

    with run_context(phase=phase):
        for epoch in range(1, max_epochs + 1):
            with run_context(epoch=epoch):
                started = time.perf_counter()
                lr = state.lr
                losses, ae_losses, norm = [], [], 0.0
                for batch in _batches(len(examples), train.batch_size, train.seed, phase, epoch):
                    total: Dict[str, np.ndarray] = {}
                    for i in batch:
                        ex = examples[i]
                        with Tape() as tape:
                            parts = multitask_breakdown(ex.frames, ex.word, params, model, lambda_ae,
                                                        seed=train.seed, training=True, retain_p=train.retain_p,
                                                        corruption=corruption, label=f"{phase}/e{epoch}/i{ex.index}")
                        report.ae_evaluations += parts.ae_evaluations
                        grads = backprop(parts.total, tape, {n: params[n] for n in trainable})
                        for name, g in grads.items():
                            total[name] = total[name] + g if name in total else g
                        losses.append(parts.total.item())
                        if parts.ae is not None:
                            ae_losses.append(parts.ae.item())
                    params, norm = _apply_update(params, _mean_grads(total, len(batch)), state, train.clip_norm)

                epoch_loss = float(np.mean(losses))
                val_accuracy = _validation_accuracy(params, config, validation) if validation else None
                record = EpochRecord(phase=phase, epoch=epoch, loss=epoch_loss, learning_rate=lr,
                                     wall_clock=time.perf_counter() - started, val_accuracy=val_accuracy,
                                     ae_loss=float(np.mean(ae_losses)) if ae_losses else None, grad_norm=norm)
                report.add(record)
                logger.info(f"loss {epoch_loss:.4f}, val accuracy "
                            f"{'n/a' if val_accuracy is None else f'{val_accuracy:.3f}'}, lr {lr:.2e}")

                # Without validation data the training loss is monitored instead.
                score = val_accuracy if val_accuracy is not None else -epoch_loss
                if best is None or score > best:
                    best, stale = score, 0
                else:
                    stale += 1
                    if stale >= train.patience:
                        state.lr = state.lr * train.decay_factor
                        stale = 0
                        logger.warning(f"No improvement for {train.patience} epochs, learning rate -> {state.lr:.2e}")
                if state.lr < train.lr_floor:
                    report.stopped = "lr_floor"
                    logger.info(f"Learning rate {state.lr:.2e} below floor {train.lr_floor:.0e}, stopping")
                    break
    if report.stopped is None:
        report.stopped = "max_epochs"
    return params


def _finish(params: Params, config: ExperimentConfig, report: TrainReport, checkpoint_path: Optional[str],
            meta: Optional[Mapping[str, object]] = None) -> None:
    if checkpoint_path:
        seeds = {"seed": config.train.seed, "data_seed": config.data.data_seed}
        report.checkpoint = save_checkpoint(checkpoint_path, params, config.model, seeds=seeds, meta=meta)


def train_labeled(split: ExperimentSplit, params: Mapping[str, Tensor], config: ExperimentConfig,
                  source: FrameSource, *, instances: Optional[Sequence[WordInstance]] = None,
                  max_epochs: Optional[int] = None, joint: Optional[bool] = None, phase: str = "train",
                  report_path: Optional[str] = None, checkpoint_path: Optional[str] = None,
                  augment_frames: Optional[int] = None) -> Tuple[Params, TrainReport]:
    """
    Second curriculum phase: minimize the multitask loss over the split's training words.

    With augment_frames > 0 (config.train.augment_frames by default) geometric replicates
    of the training words, that many frames in total, join the training set.

    With joint=False (config.train.joint by default) the feature extractor is first fitted
    with the auto-encoder loss on the training frames, then frozen while the sequence model
    trains on the sequence loss alone.

    Raises:
        DataError: no training instances.
        ConfigError: two-stage training requested for a mode without an auto-encoder loss.
    """
    train = config.train
    instances = split.train if instances is None else list(instances)
    if not instances:
        raise DataError(f"{split.protocol} split has no training instances")
    joint = train.joint if joint is None else joint
    if not joint and not config.model.has_ae_loss:
        raise ConfigError(f"two-stage training needs an auto-encoder loss; mode is {config.model.mode!r}")

    examples = load_examples(instances, source)
    n_augment = train.augment_frames if augment_frames is None else augment_frames
    if n_augment > 0:
        extra = augmented_examples(instances, source, n_augment, train.seed)
        logger.info(f"Added {len(extra)} augmented replicates to {len(examples)} training words")
        examples += extra
    validation = load_examples(split.validation, source)
    epochs = train.max_epochs if max_epochs is None else max_epochs
    params = dict(params)
    report = TrainReport(path=report_path)
    groups = param_groups(params)
    logger.info(f"Training on {len(examples)} words ({len(validation)} validation), mode {config.model.mode}, "
                f"lambda_ae {train.lambda_ae}, {'joint' if joint else 'two-stage'}")

    if joint:
        params = _fit_sequence(examples, validation, params, config, train.lambda_ae,
                               groups["features"] + groups["sequence"], epochs, phase, report)
    else:
        frames = np.concatenate([ex.frames for ex in examples])
        params, _ = fit_autoencoder(frames, params, config, train.pretrain_epochs, phase=f"{phase}-features",
                                    report=report)
        params = _fit_sequence(examples, validation, params, config, 0.0, groups["sequence"], epochs,
                               phase, report)

    _finish(params, config, report, checkpoint_path, meta={"protocol": split.protocol, "phase": phase})
    return params, report


def adapt(checkpoint: Union[str, Checkpoint], split: ExperimentSplit, config: ExperimentConfig,
          source: FrameSource, *, max_epochs: Optional[int] = None, report_path: Optional[str] = None,
          checkpoint_path: Optional[str] = None) -> Tuple[Params, TrainReport]:
    """
    Warm-start from a signer-independent checkpoint and fine-tune every parameter on the
    split's adaptation words (the split's validation words drive the schedule). Only the
    target signer's instances are read.

    Raises:
        CheckpointMismatchError: checkpoint architecture differs from config.model.
        DataError: the split has no adaptation instances.
    """
    ckpt = load_checkpoint(checkpoint) if isinstance(checkpoint, str) else checkpoint
    check_architecture(ckpt, config.model)
    params = ckpt.tensors()
    epochs = config.train.adapt_epochs if max_epochs is None else max_epochs
    if not split.adaptation:
        raise DataError(f"{split.protocol} split has no adaptation instances")
    if epochs == 0:
        logger.info("Zero adaptation epochs, keeping checkpoint parameters")
        return params, TrainReport(path=report_path, stopped="max_epochs")
    return train_labeled(split, params, config, source, instances=split.adaptation, max_epochs=epochs,
                         joint=True, phase="adapt", report_path=report_path, checkpoint_path=checkpoint_path)
