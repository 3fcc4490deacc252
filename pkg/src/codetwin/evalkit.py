"""Embedding quality scoring: pairwise similarities, ROC curve, AUC, and
pairwise-distance matrices for heatmap rendering.

Scores are similarities throughout (higher = more likely same class);
distances for reporting are d = 1 - s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySide, ZeroVector
from .siamese import cosine_similarity, sample_pair_indices


@dataclass
class ScoredPairs:
    positives: list[float]
    negatives: list[float]


@dataclass
class RocCurve:
    points: list[tuple[float, float]]  # (fpr, tpr), threshold descending
    thresholds: list[float] = field(default_factory=list)
    auc: float = 0.0


@dataclass
class DistanceMatrix:
    labels: list[str]  # class label of each row
    matrix: np.ndarray  # d = 1 - s, square


def score_pairs(scorer, corpus, n_pairs: int, rng: np.random.Generator) -> ScoredPairs:
    """Draw balanced pairs and score them with ``scorer(ast_a, ast_b)``."""
    sp = ScoredPairs([], [])
    for (ci, si), (cj, sj), y in sample_pair_indices(corpus, n_pairs, rng):
        ast_a = corpus.classes[ci][1][si][1]
        ast_b = corpus.classes[cj][1][sj][1]
        score = scorer(ast_a, ast_b)
        (sp.positives if y == 1 else sp.negatives).append(float(score))
    return sp


def auc(sp: ScoredPairs) -> float:
    """Mann-Whitney AUC: Pr[pos > neg] + Pr[pos == neg]/2, exact over all
    positive/negative pairs via tied ranks."""
    if not sp.positives or not sp.negatives:
        raise EmptySide("AUC needs at least one score on each side")
    pos = np.asarray(sp.positives, dtype=np.float64)
    neg = np.asarray(sp.negatives, dtype=np.float64)
    allscores = np.concatenate([pos, neg])
    order = np.argsort(allscores, kind="stable")
    ranks = np.empty(len(allscores), dtype=np.float64)
    sorted_scores = allscores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # average 1-based rank
        i = j + 1
    n_pos = len(pos)
    n_neg = len(neg)
    rank_sum = ranks[:n_pos].sum()
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_curve(sp: ScoredPairs) -> RocCurve:
    """Sweep thresholds over the distinct scores (descending, with a +inf
    sentinel); TPR/FPR are the fractions of scores >= threshold."""
    if not sp.positives or not sp.negatives:
        raise EmptySide("ROC needs at least one score on each side")
    pos = np.sort(np.asarray(sp.positives, dtype=np.float64))
    neg = np.sort(np.asarray(sp.negatives, dtype=np.float64))
    distinct = np.unique(np.concatenate([pos, neg]))[::-1]
    thresholds = [np.inf] + [float(v) for v in distinct]
    points = [(0.0, 0.0)]
    n_pos = len(pos)
    n_neg = len(neg)
    for v in distinct:
        tpr = (n_pos - np.searchsorted(pos, v, side="left")) / n_pos
        fpr = (n_neg - np.searchsorted(neg, v, side="left")) / n_neg
        points.append((float(fpr), float(tpr)))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=points, thresholds=thresholds, auc=area)


def distance_matrix(embed_fn, corpus, per_class_cap: int = 200,
                    rng: np.random.Generator | None = None) -> DistanceMatrix:
    """Pairwise d = 1 - cosine over up to ``per_class_cap`` solutions per
    class; rows grouped contiguously by class."""
    rng = rng or np.random.default_rng(0)
    labels = []
    vectors = []
    for label, solutions in corpus.classes:
        take = np.arange(len(solutions))
        if len(solutions) > per_class_cap:
            take = np.sort(rng.choice(len(solutions), per_class_cap, replace=False))
        for i in take:
            labels.append(label)
            vectors.append(np.asarray(embed_fn(solutions[i][1]), dtype=np.float64))
    n = len(vectors)
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            try:
                d = 1.0 - cosine_similarity(vectors[i], vectors[j])
            except ZeroVector:
                d = 1.0
            matrix[i, j] = matrix[j, i] = d
    return DistanceMatrix(labels=labels, matrix=matrix)


# ---------------------------------------------------------------------------
# File outputs


def write_roc_csv(curve: RocCurve, path) -> None:
    lines = ["threshold,fpr,tpr"]
    for threshold, (fpr, tpr) in zip(curve.thresholds, curve.points):
        lines.append(f"{threshold!r},{fpr!r},{tpr!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_distance_csv(dm: DistanceMatrix, path) -> None:
    lines = [",".join(dm.labels)]
    for row in dm.matrix:
        lines.append(",".join(repr(float(x)) for x in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_distance_pgm(dm: DistanceMatrix, path) -> None:
    """Plain-text P2 grayscale: 255 = distance 0, 0 = distance >= 1."""
    n = dm.matrix.shape[0]
    lines = ["P2", f"{n} {n}", "255"]
    for row in dm.matrix:
        gray = np.round(255 * (1.0 - np.clip(row, 0.0, 1.0))).astype(int)
        lines.append(" ".join(str(int(g)) for g in gray))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
