"""
Sequence encoder, attention and letter decoder.

Encoder: one-layer LSTM over the latent codes z_1..z_S from a zero state.
Decoder: one-layer LSTM fed the previous letter's embedding, starting from the final
encoder state. At each step
    alpha_t   = softmax(v^T tanh(W_h h_i + W_d d_t))
    d'_t      = sum_i alpha_it h_i
    p(y_t|.)  = softmax(W_o [d_t; d'_t] + b_o)
All sequence parameters live under the "seq." prefix.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import numcore as nc
from common.config import ModelConfig
from common.errors import DataError, ShapeError
from datakit.windowing import window_frames
from features import feature_param_shapes, init_feature_params
from numcore import Tensor
from .vocab import Vocabulary

logger = logging.getLogger(__name__)

Params = Mapping[str, Tensor]
GATES = ("i", "f", "o", "g")


@dataclass
class LstmState:
    h: Tensor
    c: Tensor


# The decoder state d_t is an LSTM state
DecoderState = LstmState


@dataclass
class AttentionMemory:
    """Encoder states with their attention projection W_h h_i computed once per sequence."""
    states: Tensor       # (S, hidden)
    projected: Tensor    # (S, attention_dim)

    @property
    def length(self) -> int:
        return self.states.shape[0]


@dataclass
class StepOutput:
    probs: Tensor
    log_probs: Tensor
    state: DecoderState
    alpha: Tensor


def _lstm_shapes(prefix: str, input_dim: int, hidden: int) -> Dict[str, Tuple[int, ...]]:
    shapes: Dict[str, Tuple[int, ...]] = {}
    for gate in GATES:
        shapes[f"{prefix}.wx_{gate}"] = (input_dim, hidden)
        shapes[f"{prefix}.wh_{gate}"] = (hidden, hidden)
        shapes[f"{prefix}.b_{gate}"] = (hidden,)
    return shapes


def sequence_param_shapes(config: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    vocab = Vocabulary(config.letters)
    hidden = config.lstm_hidden
    shapes: Dict[str, Tuple[int, ...]] = {}
    shapes.update(_lstm_shapes("seq.enc", config.latent_dim * config.feature_window, hidden))
    shapes.update(_lstm_shapes("seq.dec", config.embed_dim, hidden))
    shapes.update({
        "seq.att.v": (config.attention_dim,),
        "seq.att.w_h": (hidden, config.attention_dim),
        "seq.att.w_d": (hidden, config.attention_dim),
        "seq.out.w": (2 * hidden, vocab.size),
        "seq.out.b": (vocab.size,),
        "seq.embed": (vocab.size, config.embed_dim),
    })
    return shapes


def init_sequence_params(config: ModelConfig, seed: int) -> Dict[str, Tensor]:
    return {
        name: nc.zeros(shape, name=name) if name.rsplit(".", 1)[1].startswith("b") else nc.xavier_init(shape, seed, name=name)
        for name, shape in sequence_param_shapes(config).items()
    }


def param_shapes(config: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    """Name -> shape of every parameter init_params creates."""
    shapes = feature_param_shapes(config)
    shapes.update(sequence_param_shapes(config))
    return shapes


def init_params(config: ModelConfig, seed: int) -> Dict[str, Tensor]:
    """All parameters of the joint model: feature extractor ("ae.*") and sequence model ("seq.*")."""
    params = init_feature_params(config, seed)
    params.update(init_sequence_params(config, seed))
    logger.debug(f"Initialized {len(params)} parameter tensors "
                 f"({sum(t.size for t in params.values())} values) for mode {config.mode}")
    return params


def param_groups(params: Params) -> Dict[str, List[str]]:
    return {
        "features": sorted(n for n in params if n.startswith("ae.")),
        "sequence": sorted(n for n in params if n.startswith("seq.")),
    }


def zero_state(hidden: int) -> LstmState:
    return LstmState(h=Tensor(np.zeros(hidden)), c=Tensor(np.zeros(hidden)))


def lstm_step(params: Params, prefix: str, x, state: LstmState) -> LstmState:
    """
    Standard LSTM update:
        i, f, o = sigmoid(x W_x* + h W_h* + b_*), g = tanh(x W_xg + h W_hg + b_g)
        c' = f * c + i * g,  h' = o * tanh(c')
    """
    x = nc.constant(x)
    wx = params[f"{prefix}.wx_i"]
    if x.shape != (wx.shape[0],) or state.h.shape != (wx.shape[1],) or state.c.shape != state.h.shape:
        raise ShapeError(f"{prefix}: input {x.shape} / state {state.h.shape} do not match weights {wx.shape}")

    def gate(g: str) -> Tensor:
        pre = nc.add(nc.matmul(x, params[f"{prefix}.wx_{g}"]), nc.matmul(state.h, params[f"{prefix}.wh_{g}"]))
        return nc.add(pre, params[f"{prefix}.b_{g}"])

    i = nc.sigmoid(gate("i"))
    f = nc.sigmoid(gate("f"))
    o = nc.sigmoid(gate("o"))
    g = nc.tanh(gate("g"))
    c = nc.add(nc.mul(f, state.c), nc.mul(i, g))
    h = nc.mul(o, nc.tanh(c))
    return LstmState(h=h, c=c)


def encode_sequence(params: Params, latents) -> Tuple[Tensor, LstmState]:
    """
    Run the encoder LSTM left to right over z_1..z_S from a zero state.

    When the encoder input is wider than one latent vector, each step sees the window of
    neighbouring latents centred on it (edges replicated); the window size follows from
    the encoder weight shape.

    Returns (states stacked as an (S, hidden) tensor, final state).

    Raises:
        DataError: empty sequence.
        ShapeError: latent width does not divide the encoder input width.
    """
    shape = latents.shape if isinstance(latents, Tensor) else np.shape(latents)
    if len(shape) != 2 or shape[0] < 1:
        raise DataError(f"encode_sequence needs a non-empty (S, latent) sequence, got shape {shape}")
    latents = nc.constant(latents)
    width = params["seq.enc.wx_i"].shape[0]
    if width % shape[1]:
        raise ShapeError(f"latent width {shape[1]} does not divide encoder input width {width}")
    if width > shape[1]:
        latents = window_frames(latents, width // shape[1])
    state = zero_state(params["seq.enc.wh_i"].shape[0])
    outputs = []
    for t in range(latents.shape[0]):
        state = lstm_step(params, "seq.enc", nc.lookup(latents, t), state)
        outputs.append(state.h)
    return nc.stack(outputs), state


def attention_memory(params: Params, states: Tensor) -> AttentionMemory:
    return AttentionMemory(states=states, projected=nc.matmul(states, params["seq.att.w_h"]))


def attend(params: Params, states, d_t, memory: Optional[AttentionMemory] = None) -> Tuple[Tensor, Tensor]:
    """
    Additive attention over encoder states.

    Returns (alpha over the S states, context d'_t = sum_i alpha_i h_i).
    """
    if memory is None:
        memory = attention_memory(params, nc.constant(states))
    d_t = nc.constant(d_t)
    if d_t.shape != (params["seq.att.w_d"].shape[0],):
        raise ShapeError(f"attend: decoder state shape {d_t.shape} does not match W_d {params['seq.att.w_d'].shape}")
    energy = nc.tanh(nc.add(memory.projected, nc.matmul(d_t, params["seq.att.w_d"])))
    alpha = nc.softmax(nc.matmul(energy, params["seq.att.v"]))
    context = nc.matmul(alpha, memory.states)
    return alpha, context


def decoder_step(params: Params, prev_letter: int, state: DecoderState, memory: AttentionMemory,
                 vocab: Vocabulary) -> StepOutput:
    """
    One decoding step: embed the previous letter, advance the decoder LSTM, attend, and
    return the distribution over the vocabulary with the attention column.

    Raises:
        DataError: prev_letter is outside the vocabulary.
    """
    prev_letter = vocab.check(prev_letter)
    embedded = nc.lookup(params["seq.embed"], prev_letter)
    state = lstm_step(params, "seq.dec", embedded, state)
    alpha, context = attend(params, memory.states, state.h, memory)
    logits = nc.add(nc.matmul(nc.concat([state.h, context]), params["seq.out.w"]), params["seq.out.b"])
    return StepOutput(probs=nc.softmax(logits), log_probs=nc.log_softmax(logits), state=state, alpha=alpha)
