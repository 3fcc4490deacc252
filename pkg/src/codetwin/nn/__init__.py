"""Minimal deterministic tensor/parameter engine for the encoder models.

The LSTM inner loops run in a compiled Cython kernel when the extension
built successfully; otherwise a pure-numpy fallback with identical
operation order is used.  ``active_backend()`` reports which one is live.
"""

from .core import (
    ParamStore,
    adam_update,
    gradient_check,
    init_uniform,
    sigmoid,
    softmax_xent,
    softmax_xent_rows,
)
from .kernels import active_backend, lstm_backward, lstm_forward, lstm_step
from .rng import derive_seed, make_rng

__all__ = [
    "ParamStore", "adam_update", "gradient_check", "init_uniform",
    "sigmoid", "softmax_xent", "softmax_xent_rows",
    "active_backend", "lstm_forward", "lstm_backward", "lstm_step",
    "derive_seed", "make_rng",
]
