"""
LSTM sequence encoder, additive-attention letter decoder, and the multitask objective.
"""

from .vocab import Vocabulary
from .model import (
    LstmState,
    DecoderState,
    AttentionMemory,
    StepOutput,
    init_params,
    init_sequence_params,
    sequence_param_shapes,
    param_shapes,
    param_groups,
    zero_state,
    lstm_step,
    encode_sequence,
    attention_memory,
    attend,
    decoder_step,
)
from .losses import (
    TeacherForcedResult,
    LossBreakdown,
    teacher_forced,
    sequence_nll,
    multitask_loss,
    multitask_breakdown,
)

__all__ = [
    "Vocabulary", "LstmState", "DecoderState", "AttentionMemory", "StepOutput",
    "init_params", "init_sequence_params", "sequence_param_shapes", "param_shapes", "param_groups", "zero_state", "lstm_step",
    "encode_sequence", "attention_memory", "attend", "decoder_step",
    "TeacherForcedResult", "LossBreakdown", "teacher_forced", "sequence_nll",
    "multitask_loss", "multitask_breakdown",
]
