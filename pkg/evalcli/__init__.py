"""
Metrics, exports, checkpoints and the command-line surface.

The command-line program lives in evalcli.cli (python -m evalcli).
"""

from .metrics import EditOps, ConfusionMatrix, edit_distance, letter_error_rate, confusion_matrix
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint, check_architecture
from .evaluation import EvaluationResult, BeamStudy, decode_word, evaluate, beam_width_study
from .formatting import attention_export, parse_attention_table, confusion_export

__all__ = [
    "EditOps", "ConfusionMatrix", "edit_distance", "letter_error_rate", "confusion_matrix",
    "Checkpoint", "save_checkpoint", "load_checkpoint", "check_architecture",
    "EvaluationResult", "BeamStudy", "decode_word", "evaluate", "beam_width_study",
    "attention_export", "parse_attention_table", "confusion_export",
]
