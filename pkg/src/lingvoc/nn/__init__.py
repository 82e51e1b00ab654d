"""Minimal dense-tensor layer library with hand-coded gradients.

Activations travel as plain float64 ndarrays shaped (batch, time, channels);
every layer verifies against central finite differences (see gradcheck).
"""

from .attention import AttentionBlock, FeedForward, MultiHeadAttention
from .checkpoint import CheckpointError, load_params, read_tensors, save_params
from .gradcheck import check_gradients, max_relative_error, numeric_gradient
from .layers import Conv1d, Dropout, LayerNorm, Linear, TransposedConv1d, relu, relu_backward
from .losses import softmax_xent, softmax_xent_rows
from .module import Module, Param, ShapeError, as_f64, assert_finite, glorot_uniform
from .recurrent import (
    GruCell,
    LstmCell,
    backprop_gru,
    backprop_lstm,
    unroll_gru,
    unroll_lstm,
)

__all__ = [
    "AttentionBlock",
    "CheckpointError",
    "Conv1d",
    "Dropout",
    "FeedForward",
    "GruCell",
    "LayerNorm",
    "Linear",
    "LstmCell",
    "Module",
    "MultiHeadAttention",
    "Param",
    "ShapeError",
    "TransposedConv1d",
    "as_f64",
    "assert_finite",
    "backprop_gru",
    "backprop_lstm",
    "check_gradients",
    "glorot_uniform",
    "load_params",
    "max_relative_error",
    "numeric_gradient",
    "read_tensors",
    "relu",
    "relu_backward",
    "save_params",
    "softmax_xent",
    "softmax_xent_rows",
    "unroll_gru",
    "unroll_lstm",
]
