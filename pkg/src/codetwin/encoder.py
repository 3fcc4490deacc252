"""Token-id sequences to fixed-size embedding vectors.

A token embedding lookup feeds a single-layer LSTM; the final hidden state
is the embedding of the code sample.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptySequence, IdOutOfRange
from .nn import ParamStore, init_uniform
from .nn.kernels import lstm_backward, lstm_forward

EMBED = "enc.embed"
WX = "enc.lstm.Wx"
WH = "enc.lstm.Wh"
BIAS = "enc.lstm.b"


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    embed_dim: int = 64
    hidden_dim: int = 128
    max_len: int = 500

    def __post_init__(self):
        if min(self.vocab_size, self.embed_dim, self.hidden_dim) < 1:
            raise ValueError("all dimensions must be >= 1")
        if self.max_len < 3:
            raise ValueError("max_len must be >= 3")


def init_encoder_params(cfg: EncoderConfig, rng: np.random.Generator,
                        store: ParamStore | None = None) -> ParamStore:
    """Uniform(-1/sqrt(fan_in)) weights; biases zero except forget gate at 1."""
    store = store or ParamStore()
    hd = cfg.hidden_dim
    store.add(EMBED, init_uniform(rng, (cfg.vocab_size, cfg.embed_dim), cfg.embed_dim))
    store.add(WX, init_uniform(rng, (4 * hd, cfg.embed_dim), cfg.embed_dim))
    store.add(WH, init_uniform(rng, (4 * hd, hd), hd))
    bias = np.zeros(4 * hd, dtype=store.dtype)
    bias[hd:2 * hd] = 1.0  # open forget gates at init
    store.add(BIAS, bias)
    return store


def _check_ids(cfg, ids):
    if len(ids) == 0:
        raise EmptySequence("cannot encode an empty token sequence")
    for tok in ids:
        if not 0 <= tok < cfg.vocab_size:
            raise IdOutOfRange(f"token id {tok} outside vocabulary of {cfg.vocab_size}")


def encode_forward(store: ParamStore, cfg: EncoderConfig, ids):
    """Forward pass returning (final hidden state, cache for backward)."""
    _check_ids(cfg, ids)
    dtype = store.dtype
    idx = np.asarray(ids, dtype=np.intp)
    X = store[EMBED][idx]
    hd = cfg.hidden_dim
    h0 = np.zeros(hd, dtype)
    c0 = np.zeros(hd, dtype)
    H, cache = lstm_forward(store[WX], store[WH], store[BIAS], X, h0, c0)
    return H[-1], (idx, cache, cfg, store[EMBED].shape)


def encode_backward(ctx, dh_last, dc_last=None) -> dict[str, np.ndarray]:
    """Gradients of the encoder parameters given d(final hidden state)."""
    idx, cache, cfg, embed_shape = ctx
    dX, dWx, dWh, db, _, _ = lstm_backward(cache, dH=None, dh_last=dh_last,
                                           dc_last=dc_last)
    dembed = np.zeros(embed_shape, dtype=dX.dtype)
    np.add.at(dembed, idx, dX)
    return {EMBED: dembed, WX: dWx, WH: dWh, BIAS: db}


def encode(store: ParamStore, cfg: EncoderConfig, ids) -> np.ndarray:
    """Embedding vector of a token-id sequence (the LSTM's final hidden state)."""
    h, _ = encode_forward(store, cfg, ids)
    return h


def encode_batch(store: ParamStore, cfg: EncoderConfig, batch,
                 threads: int = 1) -> list[np.ndarray]:
    """Elementwise map of encode over a batch; order preserved.

    Errors from individual items are re-raised annotated with the item index.
    """

    def one(item):
        i, ids = item
        try:
            return encode(store, cfg, ids)
        except (EmptySequence, IdOutOfRange) as exc:
            raise type(exc)(f"batch item {i}: {exc}") from exc

    items = list(enumerate(batch))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, items))
    return [one(item) for item in items]
