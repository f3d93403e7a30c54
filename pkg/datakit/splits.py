"""
Experiment splits for the three protocols.

SD (signer-dependent): the data are cut into 10 subsets; fold configuration k
(1..8) tests on subset k, validates on subset k + 1 and trains on the other 8.
Configurations 9 and 10 are not run; those subsets stay available for adaptation
experiments. Proportions are 80/10/10.
SI (signer-independent): train and validate on every other signer, test on the target.
SA (signer-adapted): the target signer's data split 20% adaptation, 10% tuning
(validation) and 70% test; training data come from an SI checkpoint.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from common.errors import DataError
from numcore import rng_for
from .dataset import WordInstance

logger = logging.getLogger(__name__)

PROTOCOLS = ("SD", "SI", "SA")
NUM_SUBSETS = 10
SD_FOLDS = tuple(range(1, 9))
SI_VALIDATION_FRACTION = 0.1
SA_ADAPT_FRACTION = 0.2
SA_TUNE_FRACTION = 0.1


@dataclass(frozen=True)
class ExperimentSplit:
    protocol: str
    train: List[WordInstance] = field(default_factory=list)
    validation: List[WordInstance] = field(default_factory=list)
    test: List[WordInstance] = field(default_factory=list)
    adaptation: List[WordInstance] = field(default_factory=list)
    fold: Optional[int] = None
    target: Optional[int] = None

    def all_instances(self) -> List[WordInstance]:
        return self.train + self.validation + self.test + self.adaptation

    def signers(self, part: str) -> set:
        return {inst.signer for inst in getattr(self, part)}


def _shuffled(instances: Sequence[WordInstance], seed: int, *labels) -> List[WordInstance]:
    order = rng_for(seed, "split", *labels).permutation(len(instances))
    return [instances[i] for i in order]


def _signers(dataset: Sequence[WordInstance]) -> List[int]:
    return sorted({inst.signer for inst in dataset})


def _sd_split(dataset: Sequence[WordInstance], fold: int, seed: int, signer: Optional[int]) -> ExperimentSplit:
    if fold not in SD_FOLDS:
        raise DataError(f"SD fold must be in {SD_FOLDS[0]}..{SD_FOLDS[-1]}, got {fold}")
    pool = [inst for inst in dataset if signer is None or inst.signer == signer]
    if len(pool) < NUM_SUBSETS:
        raise DataError(f"SD needs at least {NUM_SUBSETS} instances, got {len(pool)}")
    shuffled = _shuffled(pool, seed, "SD", signer)
    subsets = [[shuffled[i] for i in chunk] for chunk in np.array_split(np.arange(len(shuffled)), NUM_SUBSETS)]
    test_index, val_index = fold - 1, fold % NUM_SUBSETS
    train = [inst for i, chunk in enumerate(subsets) if i not in (test_index, val_index) for inst in chunk]
    return ExperimentSplit("SD", train=train, validation=subsets[val_index], test=subsets[test_index],
                           fold=fold, target=signer)


def _si_split(dataset: Sequence[WordInstance], target: int, seed: int) -> ExperimentSplit:
    others = [inst for inst in dataset if inst.signer != target]
    shuffled = _shuffled(others, seed, "SI", target)
    n_val = int(round(SI_VALIDATION_FRACTION * len(shuffled)))
    return ExperimentSplit("SI", train=shuffled[n_val:], validation=shuffled[:n_val],
                           test=[inst for inst in dataset if inst.signer == target], target=target)


def _sa_split(dataset: Sequence[WordInstance], target: int, seed: int) -> ExperimentSplit:
    shuffled = _shuffled([inst for inst in dataset if inst.signer == target], seed, "SA", target)
    n_adapt = int(round(SA_ADAPT_FRACTION * len(shuffled)))
    n_tune = int(round(SA_TUNE_FRACTION * len(shuffled)))
    return ExperimentSplit("SA", adaptation=shuffled[:n_adapt], validation=shuffled[n_adapt:n_adapt + n_tune],
                           test=shuffled[n_adapt + n_tune:], target=target)


def make_splits(dataset: Sequence[WordInstance], protocol: str, fold_or_target: int, seed: int = 0,
                signer: Optional[int] = None) -> ExperimentSplit:
    """
    Partition a dataset for one protocol run.

    fold_or_target is the SD fold configuration (1..8) or the SI/SA target signer.
    For SD, signer restricts the split to one signer's data.

    Raises:
        DataError: unknown protocol, fold out of range, target signer absent, or fewer
            than two signers for SI/SA.
    """
    if protocol not in PROTOCOLS:
        raise DataError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    if protocol == "SD":
        split = _sd_split(dataset, fold_or_target, seed, signer)
    else:
        signers = _signers(dataset)
        if len(signers) < 2:
            raise DataError(f"{protocol} needs at least 2 signers, dataset has {signers}")
        if fold_or_target not in signers:
            raise DataError(f"target signer {fold_or_target} not in dataset signers {signers}")
        split = (_si_split if protocol == "SI" else _sa_split)(dataset, fold_or_target, seed)
    logger.debug(f"{protocol} split ({fold_or_target}): train={len(split.train)} val={len(split.validation)} "
                 f"test={len(split.test)} adapt={len(split.adaptation)}")
    return split
