"""Bag-of-tokens baseline: order-free token-frequency histograms over the
vocabulary, compared with cosine similarity.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroVector
from .vocab import Vocabulary


def bag_of_tokens(vocab: Vocabulary, seq) -> np.ndarray:
    """Histogram of token ids (specials included in the dimension).

    Unknown labels land in the UNK bucket; no SOS/EOS are added.
    """
    counts = np.zeros(len(vocab), dtype=np.int64)
    for label in seq:
        counts[vocab.id_of(label)] += 1
    return counts


def baseline_similarity(h1: np.ndarray, h2: np.ndarray) -> float:
    """Cosine similarity of two count histograms; in [0, 1]."""
    n1 = float(np.linalg.norm(h1))
    n2 = float(np.linalg.norm(h2))
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroVector("histogram has no tokens")
    return float(np.dot(h1.astype(np.float64), h2.astype(np.float64)) / (n1 * n2))
