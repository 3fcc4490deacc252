"""Throughput benchmark: compiled LSTM kernels vs. the pure-Python fallback.

Runs the full encoder forward+backward pass over a batch of synthetic token
sequences with each backend and reports tokens per second.

Usage:  python3 benchmarks/bench_lstm.py [--seqs 64] [--len 150] [--repeats 3]
"""

import argparse
import time

import numpy as np

from codetwin.encoder import EncoderConfig, encode_backward, encode_forward, \
    init_encoder_params
from codetwin.nn import make_rng
from codetwin.nn import kernels


def run_pass(store, cfg, seqs):
    total = 0
    for ids in seqs:
        h, ctx = encode_forward(store, cfg, ids)
        encode_backward(ctx, np.ones_like(h))
        total += len(ids)
    return total


def bench(backend_ext: bool, store, cfg, seqs, repeats: int) -> float:
    prev = kernels._USE_EXT
    kernels._USE_EXT = backend_ext
    try:
        run_pass(store, cfg, seqs[: max(1, len(seqs) // 8)])  # warm-up
        best = 0.0
        for _ in range(repeats):
            t0 = time.perf_counter()
            tokens = run_pass(store, cfg, seqs)
            rate = tokens / (time.perf_counter() - t0)
            best = max(best, rate)
        return best
    finally:
        kernels._USE_EXT = prev


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seqs", type=int, default=64)
    ap.add_argument("--len", dest="length", type=int, default=150)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    cfg = EncoderConfig(vocab_size=100)
    store = init_encoder_params(cfg, make_rng(0, "bench"))
    rng = make_rng(0, "bench.data")
    seqs = [list(rng.integers(0, cfg.vocab_size, size=args.length))
            for _ in range(args.seqs)]

    have_ext = kernels.active_backend() == "ext"
    print(f"hidden={cfg.hidden_dim} embed={cfg.embed_dim} "
          f"seqs={args.seqs} len={args.length}")
    py_rate = bench(False, store, cfg, seqs, args.repeats)
    print(f"python backend: {py_rate:10.0f} tokens/s")
    if have_ext:
        ext_rate = bench(True, store, cfg, seqs, args.repeats)
        print(f"ext backend:    {ext_rate:10.0f} tokens/s "
              f"({ext_rate / py_rate:.2f}x)")
    else:
        print("ext backend:    not available (compiled extension not built)")


if __name__ == "__main__":
    main()
