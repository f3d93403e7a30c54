"""
Command-line entry point.

    python -m evalcli [--config FILE] [--seed N] [--checkpoint PATH] [--out-dir DIR] [--data DIR] COMMAND ...

Exit codes: 0 success, 1 usage or configuration error, 2 data or checkpoint error,
3 numeric failure.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence, Tuple

from common.config import MODES, ExperimentConfig, load_config, with_updates
from common.errors import CheckpointError, ConfigError, DataError, FingerspellError, NumericError
from common.log_context import run_context
from common.logging_config import setup_logging
from datakit import (
    PROTOCOLS,
    SD_FOLDS,
    FrameSequence,
    FrameSource,
    SignerStyle,
    WordInstance,
    create_frame_source,
    make_dataset,
    make_splits,
    make_unlabeled_pool,
    synth_generate,
    unlabeled_styles,
    write_dataset,
)
from decode import NeuralStepModel, beam_decode, decode_with_attention
from seq2seq import Vocabulary, init_params
from trainer import adapt, load_examples, pretrain_unlabeled, run_protocol, train_labeled, REPORT_NAME
from .checkpoint import load_checkpoint, save_checkpoint
from .evaluation import beam_width_study, evaluate
from .formatting import attention_export, confusion_export
from .gradsuite import gradcheck_suite
from .visualization import render_attention_png, render_confusion_png

logger = logging.getLogger("evalcli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

GRADCHECK_TOLERANCE = 1e-4


class UsageError(FingerspellError):
    """Invalid combination of command-line arguments."""


# --- Shared helpers ---

def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _require_checkpoint(args) -> str:
    if not args.checkpoint:
        raise UsageError(f"'{args.command}' needs --checkpoint")
    return args.checkpoint


def _dataset(args, config: ExperimentConfig) -> Tuple[List[WordInstance], FrameSource]:
    if args.data:
        source = create_frame_source("manifest", directory=args.data)
        if int(source.meta["size"]) != config.model.image_size:
            raise DataError(f"manifest frames are {source.meta['size']}px, model expects {config.model.image_size}px")
        return source.instances, source
    source = create_frame_source("synthetic", config=config.data, size=config.model.image_size)
    return make_dataset(config.data), source


def _split(args, config: ExperimentConfig, dataset):
    fold_or_target = args.fold if args.protocol == "SD" else args.target
    if fold_or_target is None:
        raise UsageError(f"protocol {args.protocol} needs {'--fold' if args.protocol == 'SD' else '--target'}")
    return make_splits(dataset, args.protocol, fold_or_target, config.train.seed,
                       signer=args.signer if args.protocol == "SD" else None)


def _load_params(args, config: ExperimentConfig, path: Optional[str] = None):
    return load_checkpoint(path or _require_checkpoint(args), expected=config.model).tensors()


def _selected_sequence(args, config: ExperimentConfig) -> FrameSequence:
    if args.word:
        style = SignerStyle.for_signer(args.signer or 1, config.data.data_seed)
        return synth_generate(args.word.upper(), style, config.data.frames_per_letter,
                              config.data.transition_frames, config.train.seed, config.model.image_size)
    dataset, source = _dataset(args, config)
    matches = [inst for inst in dataset if inst.index == args.instance]
    if not matches:
        raise DataError(f"no instance with index {args.instance}")
    return source.frames(matches[0])


def _split_examples(args, config: ExperimentConfig):
    dataset, source = _dataset(args, config)
    split = _split(args, config, dataset)
    instances = getattr(split, args.part)
    if not instances:
        raise DataError(f"{split.protocol} split has no {args.part} instances")
    return [(ex.frames, ex.word) for ex in load_examples(instances, source)]


def _unlabeled_pool(config: ExperimentConfig):
    n_signers = config.data.n_signers
    styles = unlabeled_styles(config.data.unlabeled_styles, n_signers + 1, config.data.data_seed)
    labeled = [SignerStyle.for_signer(s, config.data.data_seed) for s in range(1, n_signers + 1)]
    return make_unlabeled_pool(config.data.unlabeled_frames, styles, config.data.data_seed,
                               config.model.image_size, labeled=labeled)


def _with_augmentation(args, config: ExperimentConfig) -> ExperimentConfig:
    if args.augment_frames is None:
        return config
    return with_updates(config, augment_frames=args.augment_frames)


# --- Commands ---

def cmd_generate(args, config: ExperimentConfig) -> int:
    dataset, source = _dataset(args, config)
    path = write_dataset(args.out_dir, dataset, source, config.data, config.model.image_size,
                         store_frames=not args.no_frames)
    print(f"{len(dataset)} instances -> {path}")
    return EXIT_OK


def cmd_pretrain(args, config: ExperimentConfig) -> int:
    pool = _unlabeled_pool(config)
    params = init_params(config.model, config.train.seed)
    params, report = pretrain_unlabeled(pool, params, config, report_path=_out_path(args, REPORT_NAME))
    save_checkpoint(_require_checkpoint(args), params, config.model,
                    seeds={"seed": config.train.seed, "data_seed": config.data.data_seed},
                    meta={"phase": "pretrain"})
    print(f"pretrained {len(report.epochs)} epochs, final AE loss {report.epochs[-1].loss:.4f}")
    return EXIT_OK


def cmd_train(args, config: ExperimentConfig) -> int:
    if args.protocol == "SA":
        raise UsageError("use 'adapt' for the SA protocol")
    dataset, source = _dataset(args, config)
    config = _with_augmentation(args, config)
    split = _split(args, config, dataset)
    params = _load_params(args, config, args.init) if args.init else init_params(config.model, config.train.seed)
    with run_context(protocol=split.protocol, fold=split.fold, target=split.target):
        params, report = train_labeled(split, params, config, source, report_path=_out_path(args, REPORT_NAME),
                                       checkpoint_path=_require_checkpoint(args))
    print(f"trained {len(report.epochs)} epochs ({report.stopped}), checkpoint {report.checkpoint}")
    return EXIT_OK


def cmd_adapt(args, config: ExperimentConfig) -> int:
    if not args.init:
        raise UsageError("'adapt' needs --init pointing at a signer-independent checkpoint")
    if args.target is None:
        raise UsageError("'adapt' needs --target")
    config = _with_augmentation(args, config)
    dataset, source = _dataset(args, config)
    split = make_splits(dataset, "SA", args.target, config.train.seed)
    with run_context(protocol="SA", target=args.target):
        _, report = adapt(args.init, split, config, source, report_path=_out_path(args, REPORT_NAME),
                          checkpoint_path=_require_checkpoint(args))
    print(f"adapted {len(report.epochs)} epochs, checkpoint {report.checkpoint or args.init}")
    return EXIT_OK


def cmd_run_protocol(args, config: ExperimentConfig) -> int:
    dataset, source = _dataset(args, config)
    pool = _unlabeled_pool(config) if args.pretrain else None
    result = run_protocol(args.protocol, dataset, config, source, pool=pool, folds=args.folds or SD_FOLDS,
                          targets=args.targets, out_dir=args.out_dir, augment_frames=args.augment_frames)
    with open(_out_path(args, "protocol.csv"), "w", encoding="utf-8") as fh:
        fh.write("run,ler,unadapted_ler\n")
        for key, ler in result.ler.items():
            unadapted = result.unadapted_ler.get(key)
            cell = "" if unadapted is None else f"{unadapted:.4f}"
            fh.write(f"{key},{ler:.4f},{cell}\n")
    print(f"{args.protocol}\tmean LER {result.mean_ler:.2f}%\tmedian LER {result.median_ler:.2f}%\t"
          f"{len(result.ler)} runs")
    return EXIT_OK


def cmd_decode(args, config: ExperimentConfig) -> int:
    params = _load_params(args, config)
    seq = _selected_sequence(args, config)
    model = NeuralStepModel(params, config.model, seq.flat())
    for rank, hyp in enumerate(beam_decode(model, args.beam_width, config.train.max_len), start=1):
        print(f"{rank}\t{hyp.word(model.vocab)}\t{hyp.log_prob:.4f}")
    return EXIT_OK


def cmd_evaluate(args, config: ExperimentConfig) -> int:
    params = _load_params(args, config)
    examples = _split_examples(args, config)
    result = evaluate(params, config.model, examples, beam_width=args.beam_width, max_len=config.train.max_len)
    with open(_out_path(args, "confusion.csv"), "w", encoding="utf-8") as fh:
        fh.write(confusion_export(result.confusion))
    with open(_out_path(args, "outputs.csv"), "w", encoding="utf-8") as fh:
        fh.write("reference,hypothesis\n")
        fh.writelines(f"{ref},{hyp}\n" for hyp, ref in result.pairs)
    print(f"LER {result.ler:.2f}% over {len(result.pairs)} words")
    return EXIT_OK


def _attention(args, config: ExperimentConfig):
    params = _load_params(args, config)
    seq = _selected_sequence(args, config)
    word, alpha, top = decode_with_attention(seq.flat(), params, config.model, args.beam_width, config.train.max_len)
    vocab = Vocabulary(config.model.letters)
    return word, alpha, [vocab.symbol(i) for i in top.letters]


def cmd_dump_attention(args, config: ExperimentConfig) -> int:
    word, alphas, labels = _attention(args, config)
    path = _out_path(args, "attention.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(attention_export(alphas, labels))
    print(f"{word} -> {path}")
    return EXIT_OK


def cmd_gradcheck(args, config: ExperimentConfig) -> int:
    results = gradcheck_suite(args.modes or MODES, seed=config.train.seed)
    failed = False
    for mode, result in results.items():
        ok = result.passed(GRADCHECK_TOLERANCE)
        failed |= not ok
        print(f"{mode}\t{result.max_rel_error:.3e}\t{'ok' if ok else 'FAIL'}\t{result.worst}")
    if failed:
        raise NumericError(f"gradient check exceeded relative error {GRADCHECK_TOLERANCE}")
    return EXIT_OK


def cmd_beam_study(args, config: ExperimentConfig) -> int:
    params = _load_params(args, config)
    study = beam_width_study(params, config.model, _split_examples(args, config),
                             widths=args.widths or config.train.beam_widths, max_len=config.train.max_len)
    with open(_out_path(args, "beam_study.csv"), "w", encoding="utf-8") as fh:
        fh.write(",".join(["reference"] + [f"beam_{b}" for b in study.widths]) + "\n")
        for ref, hyps in study.outputs:
            fh.write(",".join([ref] + [hyps[b] for b in study.widths]) + "\n")
    for b in study.widths:
        print(f"beam {b}\tLER {study.ler[b]:.2f}%")
    return EXIT_OK


def cmd_render(args, config: ExperimentConfig) -> int:
    if args.kind == "attention":
        _, alphas, labels = _attention(args, config)
        png = render_attention_png(alphas, labels, args.font)
    else:
        params = _load_params(args, config)
        result = evaluate(params, config.model, _split_examples(args, config), beam_width=args.beam_width,
                          max_len=config.train.max_len)
        png = render_confusion_png(result.confusion, args.font)
    if png is None:
        raise DataError(f"nothing to render for {args.kind}")
    path = _out_path(args, f"{args.kind}.png")
    with open(path, "wb") as fh:
        fh.write(png)
    print(path)
    return EXIT_OK


# --- Parser ---

def _add_split_args(p: argparse.ArgumentParser, part: bool = True) -> None:
    p.add_argument("--protocol", choices=("SD", "SI", "SA"), default="SI", help="Experiment protocol")
    p.add_argument("--fold", type=int, help="SD fold configuration (1-8)")
    p.add_argument("--target", type=int, help="SI/SA target signer")
    p.add_argument("--signer", type=int, help="SD: restrict to one signer")
    if part:
        p.add_argument("--part", choices=("train", "validation", "test", "adaptation"), default="test",
                       help="Which part of the split to use")


def _add_augment_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--augment-frames", type=int,
                   help="Add this many frames of scaled/shifted/rotated replicates to the training words")


def _add_selection_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", type=int, default=0, help="Dataset instance index")
    p.add_argument("--word", help="Synthesize this word instead of reading an instance")
    p.add_argument("--signer", type=int, help="Signer style for --word")
    p.add_argument("--beam-width", type=int, default=1, help="Beam width")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fingerspell", description="Fingerspelling recognition pipeline")
    parser.add_argument("--config", help="KEY=VALUE config file")
    parser.add_argument("--seed", type=int, help="Training seed (overrides config)")
    parser.add_argument("--checkpoint", help="Checkpoint to read or write")
    parser.add_argument("--out-dir", default="out", help="Directory for artifacts and logs")
    parser.add_argument("--data", help="Dataset directory written by 'generate' (default: regenerate)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="Build the synthetic dataset and manifest")
    p.add_argument("--no-frames", action="store_true", help="Write the manifest only")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("pretrain", help="Auto-encoder pretraining on unlabeled frames")
    p.set_defaults(handler=cmd_pretrain)

    p = sub.add_parser("train", help="Multitask training (SD/SI)")
    _add_split_args(p, part=False)
    p.add_argument("--init", help="Start from this checkpoint (e.g. a pretrained one)")
    _add_augment_arg(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("adapt", help="SA: fine-tune an SI checkpoint on the target signer")
    p.add_argument("--target", type=int, help="Target signer")
    p.add_argument("--init", help="Signer-independent checkpoint")
    _add_augment_arg(p)
    p.set_defaults(handler=cmd_adapt)

    p = sub.add_parser("run-protocol", help="Train and test every run of SD, SI or SA")
    p.add_argument("--protocol", choices=PROTOCOLS, required=True)
    p.add_argument("--folds", type=int, nargs="+", help="SD fold configurations (default: 1-8)")
    p.add_argument("--targets", type=int, nargs="+", help="SI/SA target signers (default: all)")
    p.add_argument("--pretrain", action="store_true", help="Pretrain each run on the unlabeled pool")
    _add_augment_arg(p)
    p.set_defaults(handler=cmd_run_protocol)

    p = sub.add_parser("decode", help="Decode one word")
    _add_selection_args(p)
    p.set_defaults(handler=cmd_decode)

    p = sub.add_parser("evaluate", help="LER and confusion matrix over a split")
    _add_split_args(p)
    p.add_argument("--beam-width", type=int, default=1, help="Beam width")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("dump-attention", help="Attention table for one word")
    _add_selection_args(p)
    p.set_defaults(handler=cmd_dump_attention)

    p = sub.add_parser("gradcheck", help="Finite-difference check of the multitask loss")
    p.add_argument("--modes", nargs="+", choices=MODES, help="Modes to check (default: all)")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("beam-study", help="LER per beam width over a split")
    _add_split_args(p)
    p.add_argument("--widths", type=int, nargs="+", help="Beam widths (default: config beam_widths)")
    p.set_defaults(handler=cmd_beam_study)

    p = sub.add_parser("render", help="PNG heatmap of attention or letter confusions")
    p.add_argument("--kind", choices=("attention", "confusion"), required=True)
    p.add_argument("--font", help="TrueType font for labels")
    _add_split_args(p)
    p.add_argument("--instance", type=int, default=0, help="Dataset instance index (attention)")
    p.add_argument("--word", help="Synthesize this word instead of reading an instance (attention)")
    p.add_argument("--beam-width", type=int, default=1, help="Beam width")
    p.set_defaults(handler=cmd_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    setup_logging("evalcli", log_dir=args.out_dir)
    try:
        config = load_config(args.config, overrides={"seed": args.seed})
        with run_context(phase=args.command):
            return args.handler(args, config)
    except (ConfigError, UsageError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except (DataError, CheckpointError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_DATA
    except NumericError as e:
        logger.error(f"Numeric failure: {e}")
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
