"""Autoencoder pre-training: a decoder LSTM with an output projection is
trained (teacher-forced) to reproduce the input token sequence, then thrown
away; only the encoder weights are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import BIAS, EMBED, WH, WX, EncoderConfig
from .errors import EmptySequence
from .nn import ParamStore, adam_update, init_uniform, softmax_xent_rows
from .nn.kernels import lstm_backward, lstm_forward

DEC_WX = "dec.lstm.Wx"
DEC_WH = "dec.lstm.Wh"
DEC_BIAS = "dec.lstm.b"
DEC_PROJ_W = "dec.proj.W"
DEC_PROJ_B = "dec.proj.b"

DECODER_PREFIX = "dec."


@dataclass(frozen=True)
class PretrainConfig:
    epochs: int = 20
    batch_size: int = 16
    learning_rate: float = 1e-3
    teacher_forcing: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("invalid pretraining configuration")


def init_decoder_params(cfg: EncoderConfig, rng: np.random.Generator,
                        store: ParamStore) -> ParamStore:
    """Decoder LSTM (same hidden size as the encoder) plus vocab projection.

    The token embedding table is shared with the encoder.
    """
    hd = cfg.hidden_dim
    store.add(DEC_WX, init_uniform(rng, (4 * hd, cfg.embed_dim), cfg.embed_dim))
    store.add(DEC_WH, init_uniform(rng, (4 * hd, hd), hd))
    bias = np.zeros(4 * hd, dtype=store.dtype)
    bias[hd:2 * hd] = 1.0
    store.add(DEC_BIAS, bias)
    store.add(DEC_PROJ_W, init_uniform(rng, (cfg.vocab_size, hd), hd))
    store.add(DEC_PROJ_B, np.zeros(cfg.vocab_size, dtype=store.dtype))
    return store


def _forward(store: ParamStore, cfg: EncoderConfig, ids):
    if len(ids) < 2:
        raise EmptySequence("autoencoder needs at least [SOS, EOS]")
    dtype = store.dtype
    idx = np.asarray(ids, dtype=np.intp)
    hd = cfg.hidden_dim
    zeros = np.zeros(hd, dtype)

    X_enc = store[EMBED][idx]
    H_enc, enc_cache = lstm_forward(store[WX], store[WH], store[BIAS],
                                    X_enc, zeros, zeros)
    h_enc = H_enc[-1]
    c_enc = enc_cache[6][-1]  # final cell state

    dec_idx = idx[:-1]  # teacher-forced inputs; targets are idx[1:]
    X_dec = store[EMBED][dec_idx]
    H_dec, dec_cache = lstm_forward(store[DEC_WX], store[DEC_WH], store[DEC_BIAS],
                                    X_dec, h_enc, c_enc)
    logits = H_dec @ store[DEC_PROJ_W].T + store[DEC_PROJ_B]
    return idx, enc_cache, dec_cache, H_dec, logits


def autoencoder_loss(store: ParamStore, cfg: EncoderConfig, ids) -> float:
    """Mean per-token cross-entropy of reconstructing ``ids`` from itself."""
    idx, _, _, _, logits = _forward(store, cfg, ids)
    loss, _ = softmax_xent_rows(logits, idx[1:])
    return float(loss)


def autoencoder_loss_and_grads(store: ParamStore, cfg: EncoderConfig, ids):
    """Loss plus gradients for every encoder and decoder parameter."""
    idx, enc_cache, dec_cache, H_dec, logits = _forward(store, cfg, ids)
    loss, dlogits = softmax_xent_rows(logits, idx[1:])

    dW_proj = dlogits.T @ H_dec
    db_proj = dlogits.sum(axis=0)
    dH_dec = dlogits @ store[DEC_PROJ_W]

    dX_dec, dWx_d, dWh_d, db_d, dh_enc, dc_enc = lstm_backward(dec_cache, dH=dH_dec)
    dX_enc, dWx_e, dWh_e, db_e, _, _ = lstm_backward(enc_cache, dh_last=dh_enc,
                                                     dc_last=dc_enc)
    dembed = np.zeros(store[EMBED].shape, dtype=dX_enc.dtype)
    np.add.at(dembed, idx, dX_enc)
    np.add.at(dembed, idx[:-1], dX_dec)
    grads = {
        EMBED: dembed, WX: dWx_e, WH: dWh_e, BIAS: db_e,
        DEC_WX: dWx_d, DEC_WH: dWh_d, DEC_BIAS: db_d,
        DEC_PROJ_W: dW_proj, DEC_PROJ_B: db_proj,
    }
    return float(loss), grads


def pretrain_epoch(store: ParamStore, cfg: EncoderConfig, pcfg: PretrainConfig,
                   corpus: list, rng: np.random.Generator) -> float:
    """One pass over the corpus; returns the mean sample loss.

    Gradients are averaged within each batch and applied with one Adam
    update per batch.
    """
    order = rng.permutation(len(corpus))
    total = 0.0
    for start in range(0, len(order), pcfg.batch_size):
        batch = order[start:start + pcfg.batch_size]
        acc: dict[str, np.ndarray] = {}
        for i in batch:
            loss, grads = autoencoder_loss_and_grads(store, cfg, corpus[i])
            total += loss
            for name, g in grads.items():
                if name in acc:
                    acc[name] += g
                else:
                    acc[name] = g
        for name in acc:
            acc[name] /= len(batch)
        adam_update(store, acc, lr=pcfg.learning_rate)
    return total / len(corpus)


def reconstruction_accuracy(store: ParamStore, cfg: EncoderConfig, corpus) -> float:
    """Teacher-forced greedy-argmax token accuracy over all target positions."""
    hits = 0
    positions = 0
    for ids in corpus:
        idx, _, _, _, logits = _forward(store, cfg, ids)
        pred = logits.argmax(axis=1)
        hits += int((pred == idx[1:]).sum())
        positions += len(idx) - 1
    return hits / positions


def strip_decoder(store: ParamStore) -> ParamStore:
    """Drop every decoder-prefixed parameter in place; idempotent.

    Optimizer state (Adam moments and step counter) is reset as well, so the
    following fine-tuning stage starts fresh -- carrying the autoencoder's
    second-moment estimates into the Siamese stage would scale its encoder
    updates down by orders of magnitude.  Parameter values are untouched.
    """
    for name in [n for n in store.names() if n.startswith(DECODER_PREFIX)]:
        store.drop(name)
    for name in store.names():
        store.adam_m[name][:] = 0.0
        store.adam_v[name][:] = 0.0
    store.t = 0
    return store
