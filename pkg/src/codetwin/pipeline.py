"""End-to-end workflows shared by the CLI and the experiment suite:
corpus -> SBT -> vocabulary -> pre-training -> Siamese training -> scoring.
"""

from __future__ import annotations

import numpy as np

from . import pretrain as pt
from . import siamese as sm
from .baseline import bag_of_tokens, baseline_similarity
from .corpus import LabeledCorpus
from .encoder import EncoderConfig, encode, init_encoder_params
from .nn import ParamStore, make_rng
from .sbt import sbt_serialize
from .vocab import (DEFAULT_COVERAGE, DEFAULT_MAX_LEN, Vocabulary, build_vocab,
                    count_tokens, encode_sequence)


def corpus_sbts(corpus: LabeledCorpus) -> list[list[str]]:
    return [sbt_serialize(ast) for ast in corpus.asts()]


def vocab_from_corpus(corpus: LabeledCorpus,
                      coverage: float = DEFAULT_COVERAGE) -> Vocabulary:
    return build_vocab(count_tokens(corpus_sbts(corpus)), coverage)


def ast_to_ids(vocab: Vocabulary, ast, max_len: int = DEFAULT_MAX_LEN) -> list[int]:
    return encode_sequence(vocab, sbt_serialize(ast), max_len)


def init_model(cfg: EncoderConfig, seed: int, with_decoder: bool = False,
               with_calibration: bool = True) -> ParamStore:
    store = init_encoder_params(cfg, make_rng(seed, "init.encoder"))
    if with_decoder:
        pt.init_decoder_params(cfg, make_rng(seed, "init.decoder"), store)
    if with_calibration:
        sm.init_calibration(store)
    return store


def pretrain_encoder(store: ParamStore, cfg: EncoderConfig,
                     pcfg: pt.PretrainConfig, corpus_ids: list,
                     log=None) -> list[float]:
    """Run the autoencoder epochs; returns the per-epoch mean losses."""
    losses = []
    for epoch in range(pcfg.epochs):
        rng = make_rng(pcfg.seed, f"pretrain.epoch{epoch}")
        loss = pt.pretrain_epoch(store, cfg, pcfg, corpus_ids, rng)
        losses.append(loss)
        if log:
            log(f"pretrain epoch {epoch + 1}/{pcfg.epochs} loss={loss:.4f}")
    return losses


def train_siamese(store: ParamStore, cfg: EncoderConfig, tcfg: sm.TrainConfig,
                  corpus: LabeledCorpus, vocab: Vocabulary,
                  log=None) -> list[float]:
    """Siamese epochs with freshly sampled balanced pairs each epoch."""
    to_ids = lambda ast: ast_to_ids(vocab, ast, cfg.max_len)
    losses = []
    for epoch in range(tcfg.epochs):
        pair_rng = make_rng(tcfg.seed, f"train.pairs{epoch}")
        pairs = sm.sample_pairs(corpus, tcfg.pairs_per_epoch, pair_rng, to_ids)
        loss = sm.train_epoch(store, cfg, tcfg, pairs,
                              make_rng(tcfg.seed, f"train.epoch{epoch}"))
        losses.append(loss)
        if log:
            log(f"siamese epoch {epoch + 1}/{tcfg.epochs} loss={loss:.4f}")
    return losses


def siamese_scorer(store: ParamStore, cfg: EncoderConfig, vocab: Vocabulary):
    """AST-pair similarity via the trained encoder (cosine of embeddings)."""

    def score(ast_a, ast_b) -> float:
        v1 = encode(store, cfg, ast_to_ids(vocab, ast_a, cfg.max_len))
        v2 = encode(store, cfg, ast_to_ids(vocab, ast_b, cfg.max_len))
        return sm.cosine_similarity(v1, v2)

    return score


def baseline_scorer(vocab: Vocabulary):
    """AST-pair similarity via bag-of-tokens histograms."""

    def score(ast_a, ast_b) -> float:
        h1 = bag_of_tokens(vocab, sbt_serialize(ast_a))
        h2 = bag_of_tokens(vocab, sbt_serialize(ast_b))
        return baseline_similarity(h1, h2)

    return score


def siamese_embedder(store: ParamStore, cfg: EncoderConfig, vocab: Vocabulary):
    def embed(ast) -> np.ndarray:
        return encode(store, cfg, ast_to_ids(vocab, ast, cfg.max_len))

    return embed


def baseline_embedder(vocab: Vocabulary):
    def embed(ast) -> np.ndarray:
        return bag_of_tokens(vocab, sbt_serialize(ast))

    return embed
