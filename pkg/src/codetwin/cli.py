"""Command-line entry point wiring the full pipeline.

Subcommands: synth, build-vocab, pretrain, train, embed, evaluate,
baseline-evaluate, heatmap.  One root --seed reproduces everything; every
run logs seed, configuration, and versions to standard error.

Exit codes: 0 success, 1 usage error, 2 data/model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, pipeline
from . import pretrain as pt
from . import siamese as sm
from .corpus import generate_synthetic, load_corpus
from .encoder import EncoderConfig
from .errors import CodetwinError
from .evalkit import (distance_matrix, roc_curve, score_pairs,
                      write_distance_csv, write_distance_pgm, write_roc_csv)
from .nn import active_backend, make_rng
from .pyparse import parse_source, unparse, wrap_in_function
from .vocab import load_vocab, save_vocab


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _log(message):
    print(message, file=sys.stderr)


def build_parser():
    parser = _Parser(prog="codetwin", allow_abbrev=False)
    parser.add_argument("--seed", type=int, default=0,
                        help="root seed threaded through all RNGs")
    parser.add_argument("--threads", type=int, default=1,
                        help="cap on internal parallelism (default 1)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic clone corpus")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build-vocab", help="build a coverage-cutoff vocabulary")
    p.add_argument("--corpus", required=True)
    p.add_argument("--json", action="store_true",
                   help="read .ast.json files instead of .py")
    p.add_argument("--coverage", type=float, default=0.85)
    p.add_argument("--out", required=True)

    for name in ("pretrain", "train"):
        p = sub.add_parser(name)
        p.add_argument("--corpus", required=True)
        p.add_argument("--json", action="store_true")
        p.add_argument("--vocab", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--epochs", type=int, default=20 if name == "pretrain" else 40)
        p.add_argument("--batch-size", type=int,
                       default=16 if name == "pretrain" else 32)
        p.add_argument("--learning-rate", type=float, default=1e-3)
        p.add_argument("--embed-dim", type=int, default=64)
        p.add_argument("--hidden-dim", type=int, default=128)
        p.add_argument("--max-len", type=int, default=500)
        if name == "train":
            p.add_argument("--pairs-per-epoch", type=int, default=4000)
            p.add_argument("--init", help="checkpoint to initialize from "
                                          "(e.g. pretrained encoder)")

    p = sub.add_parser("embed", help="print one embedding, one value per line")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true")

    for name in ("evaluate", "baseline-evaluate"):
        p = sub.add_parser(name)
        if name == "evaluate":
            p.add_argument("--model", required=True)
        p.add_argument("--vocab", required=True)
        p.add_argument("--corpus", required=True)
        p.add_argument("--json", action="store_true")
        p.add_argument("--pairs", type=int, default=10000)
        p.add_argument("--roc-out", help="write the ROC curve as CSV")
        if name == "baseline-evaluate":
            p.add_argument("--max-len", type=int, default=500)

    p = sub.add_parser("heatmap", help="pairwise-distance matrix CSV + PGM")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--per-class-cap", type=int, default=200)
    p.add_argument("--csv-out", required=True)
    p.add_argument("--pgm-out", required=True)
    return parser


def _load_corpus(args):
    corpus, report = load_corpus(args.corpus, use_json=args.json)
    for line in report.lines():
        _log(line)
    if not corpus.classes:
        raise CodetwinError(f"{args.corpus}: no usable solutions")
    return corpus


def _load_model(args):
    store, cfg = sm.load_checkpoint(args.model, vocab_path=args.vocab)
    vocab = load_vocab(args.vocab)
    return store, cfg, vocab


def cmd_synth(args):
    corpus = generate_synthetic(args.classes, args.per_class, args.seed)
    out = Path(args.out)
    for label, solutions in corpus.classes:
        class_dir = out / label
        class_dir.mkdir(parents=True, exist_ok=True)
        for sol_id, ast in solutions:
            (class_dir / f"{sol_id}.py").write_text(unparse(ast), encoding="utf-8")
    _log(f"wrote {corpus.n_solutions()} solutions in "
         f"{len(corpus.classes)} classes to {out}")


def cmd_build_vocab(args):
    corpus = _load_corpus(args)
    vocab = pipeline.vocab_from_corpus(corpus, args.coverage)
    save_vocab(vocab, args.out)
    _log(f"vocabulary: {len(vocab)} ids, achieved coverage "
         f"{vocab.achieved_coverage:.4f} (target {args.coverage})")


def cmd_pretrain(args):
    corpus = _load_corpus(args)
    vocab = load_vocab(args.vocab)
    cfg = EncoderConfig(vocab_size=len(vocab), embed_dim=args.embed_dim,
                        hidden_dim=args.hidden_dim, max_len=args.max_len)
    pcfg = pt.PretrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                             learning_rate=args.learning_rate, seed=args.seed)
    ids = [pipeline.ast_to_ids(vocab, ast, cfg.max_len) for ast in corpus.asts()]
    store = pipeline.init_model(cfg, args.seed, with_decoder=True)
    pipeline.pretrain_encoder(store, cfg, pcfg, ids, log=_log)
    pt.strip_decoder(store)
    sm.save_checkpoint(store, cfg, args.vocab, args.out)
    _log(f"saved pretrained encoder to {args.out}")


def cmd_train(args):
    corpus = _load_corpus(args)
    vocab = load_vocab(args.vocab)
    if args.init:
        store, cfg = sm.load_checkpoint(args.init, vocab_path=args.vocab)
        if sm.CAL_W not in store:
            sm.init_calibration(store)
    else:
        cfg = EncoderConfig(vocab_size=len(vocab), embed_dim=args.embed_dim,
                            hidden_dim=args.hidden_dim, max_len=args.max_len)
        store = pipeline.init_model(cfg, args.seed)
    tcfg = sm.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                          pairs_per_epoch=args.pairs_per_epoch,
                          learning_rate=args.learning_rate, seed=args.seed)
    pipeline.train_siamese(store, cfg, tcfg, corpus, vocab, log=_log)
    sm.save_checkpoint(store, cfg, args.vocab, args.out)
    _log(f"saved model to {args.out}")


def cmd_embed(args):
    store, cfg, vocab = _load_model(args)
    text = Path(args.input).read_text(encoding="utf-8")
    from .pyparse import ast_from_json
    module = ast_from_json(text) if args.json else parse_source(text)
    ast = wrap_in_function(module, "solution")
    vector = pipeline.siamese_embedder(store, cfg, vocab)(ast)
    for value in vector:
        print(repr(float(value)))


def cmd_evaluate(args, baseline=False):
    vocab = load_vocab(args.vocab)
    if baseline:
        scorer = pipeline.baseline_scorer(vocab)
    else:
        store, cfg, vocab = _load_model(args)
        scorer = pipeline.siamese_scorer(store, cfg, vocab)
    corpus = _load_corpus(args)
    sp = score_pairs(scorer, corpus, args.pairs, make_rng(args.seed, "eval.pairs"))
    curve = roc_curve(sp)
    if args.roc_out:
        write_roc_csv(curve, args.roc_out)
        _log(f"wrote ROC curve to {args.roc_out}")
    from .evalkit import auc as mw_auc
    print(f"AUC {mw_auc(sp):.6f}")


def cmd_heatmap(args):
    store, cfg, vocab = _load_model(args)
    corpus = _load_corpus(args)
    dm = distance_matrix(pipeline.siamese_embedder(store, cfg, vocab), corpus,
                         per_class_cap=args.per_class_cap,
                         rng=make_rng(args.seed, "heatmap.sample"))
    write_distance_csv(dm, args.csv_out)
    write_distance_pgm(dm, args.pgm_out)
    _log(f"wrote {dm.matrix.shape[0]}x{dm.matrix.shape[0]} distance matrix")


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    _log(f"codetwin {__version__} numpy {np.__version__} "
         f"backend={active_backend()} seed={args.seed} threads={args.threads}")
    _log(f"config: {vars(args)}")
    try:
        if args.subcommand == "synth":
            cmd_synth(args)
        elif args.subcommand == "build-vocab":
            cmd_build_vocab(args)
        elif args.subcommand == "pretrain":
            cmd_pretrain(args)
        elif args.subcommand == "train":
            cmd_train(args)
        elif args.subcommand == "embed":
            cmd_embed(args)
        elif args.subcommand == "evaluate":
            cmd_evaluate(args)
        elif args.subcommand == "baseline-evaluate":
            cmd_evaluate(args, baseline=True)
        elif args.subcommand == "heatmap":
            cmd_heatmap(args)
    except (CodetwinError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
