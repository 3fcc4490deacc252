"""ROC/AUC oracles, pair scoring, distance matrices, and file outputs."""

import numpy as np
import pytest

from codetwin.errors import EmptySide
from codetwin.evalkit import (DistanceMatrix, RocCurve, ScoredPairs, auc,
                              distance_matrix, roc_curve, score_pairs,
                              write_distance_csv, write_distance_pgm,
                              write_roc_csv)
from codetwin.nn import make_rng
from codetwin.pyparse import AstNode
from codetwin.corpus import LabeledCorpus


def brute_force_auc(sp):
    """Independent oracle: direct pair counting."""
    wins = ties = 0
    for p in sp.positives:
        for n in sp.negatives:
            if p > n:
                wins += 1
            elif p == n:
                ties += 1
    return (wins + 0.5 * ties) / (len(sp.positives) * len(sp.negatives))


class TestAuc:
    def test_perfect_separation(self):
        assert auc(ScoredPairs([0.9, 0.8], [0.1, 0.2])) == pytest.approx(1.0)

    def test_all_ties(self):
        assert auc(ScoredPairs([0.5], [0.5])) == pytest.approx(0.5)

    def test_worked_example(self):
        assert auc(ScoredPairs([0.9, 0.4], [0.6, 0.1])) == pytest.approx(0.75)

    def test_empty_side_rejected(self):
        with pytest.raises(EmptySide):
            auc(ScoredPairs([], [0.5]))
        with pytest.raises(EmptySide):
            auc(ScoredPairs([0.5], []))

    def test_matches_brute_force_with_ties(self):
        rng = make_rng(1, "auc.brute")
        for _ in range(100):
            n_pos = int(rng.integers(1, 30))
            n_neg = int(rng.integers(1, 30))
            # quantized scores so ties actually occur
            pos = list(np.round(rng.uniform(0, 1, n_pos), 1))
            neg = list(np.round(rng.uniform(0, 1, n_neg), 1))
            sp = ScoredPairs(pos, neg)
            assert auc(sp) == pytest.approx(brute_force_auc(sp), abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = make_rng(2, "auc.mono")
        pos = list(rng.uniform(-1, 1, 20))
        neg = list(rng.uniform(-1, 1, 25))
        base = auc(ScoredPairs(pos, neg))
        shifted = auc(ScoredPairs([2 * s + 1 for s in pos],
                                  [2 * s + 1 for s in neg]))
        assert shifted == pytest.approx(base, abs=1e-12)


class TestRocCurve:
    def test_perfect_separation_hits_corner(self):
        curve = roc_curve(ScoredPairs([0.9, 0.8], [0.1, 0.2]))
        assert (0.0, 1.0) in curve.points

    def test_single_tied_value(self):
        curve = roc_curve(ScoredPairs([0.5], [0.5]))
        assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
        assert curve.auc == pytest.approx(0.5)

    def test_worked_example_trapezoid(self):
        curve = roc_curve(ScoredPairs([0.9, 0.4], [0.6, 0.1]))
        assert curve.auc == pytest.approx(0.75, abs=1e-12)

    def test_starts_at_origin_ends_at_corner(self):
        rng = make_rng(3, "roc.ends")
        curve = roc_curve(ScoredPairs(list(rng.uniform(0, 1, 10)),
                                      list(rng.uniform(0, 1, 10))))
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)

    def test_rates_nondecreasing(self):
        rng = make_rng(4, "roc.mono")
        curve = roc_curve(ScoredPairs(list(rng.uniform(0, 1, 15)),
                                      list(rng.uniform(0, 1, 15))))
        fprs = [p[0] for p in curve.points]
        tprs = [p[1] for p in curve.points]
        assert fprs == sorted(fprs)
        assert tprs == sorted(tprs)

    def test_thresholds_descend_from_sentinel(self):
        curve = roc_curve(ScoredPairs([0.9, 0.4], [0.6, 0.1]))
        assert curve.thresholds[0] == np.inf
        assert curve.thresholds == sorted(curve.thresholds, reverse=True)

    def test_trapezoid_equals_mann_whitney(self):
        """Property: trapezoidal ROC area == rank-based AUC within 1e-9."""
        rng = make_rng(5, "roc.mw")
        for _ in range(500):
            n_pos = int(rng.integers(1, 51))
            n_neg = int(rng.integers(1, 51))
            pos = list(np.round(rng.uniform(0, 1, n_pos), 2))
            neg = list(np.round(rng.uniform(0, 1, n_neg), 2))
            sp = ScoredPairs(pos, neg)
            assert abs(roc_curve(sp).auc - auc(sp)) < 1e-9


def constant_corpus(n_classes=2, per_class=3):
    classes = []
    for c in range(n_classes):
        sols = [(f"s{i}", AstNode("Module", children=[
            AstNode("Expr", children=[AstNode("Num", str(i))])]))
            for i in range(per_class)]
        classes.append((f"class{c}", sols))
    return LabeledCorpus(classes)


class TestScorePairs:
    def test_balance(self):
        sp = score_pairs(lambda a, b: 0.5, constant_corpus(), 2,
                         make_rng(6, "sp"))
        assert len(sp.positives) == 1
        assert len(sp.negatives) == 1

    def test_constant_scorer(self):
        sp = score_pairs(lambda a, b: 1.0, constant_corpus(), 10,
                         make_rng(7, "sp"))
        assert all(s == 1.0 for s in sp.positives + sp.negatives)

    def test_deterministic_given_seed(self):
        def scorer(a, b):
            return float(len(repr(a)) - len(repr(b)))

        sp1 = score_pairs(scorer, constant_corpus(3, 5), 60, make_rng(8, "sp"))
        sp2 = score_pairs(scorer, constant_corpus(3, 5), 60, make_rng(8, "sp"))
        assert sp1.positives == sp2.positives
        assert sp1.negatives == sp2.negatives


class TestDistanceMatrix:
    def test_single_sample(self):
        dm = distance_matrix(lambda ast: np.ones(4),
                             constant_corpus(1, 1), rng=make_rng(9, "dm"))
        assert dm.matrix.shape == (1, 1)
        assert dm.matrix[0, 0] == 0.0

    def test_constant_embedder_all_zero(self):
        dm = distance_matrix(lambda ast: np.array([1.0, 2.0]),
                             constant_corpus(2, 2), rng=make_rng(10, "dm"))
        np.testing.assert_allclose(dm.matrix, 0.0, atol=1e-12)

    def test_symmetry_and_zero_diagonal(self):
        rng = make_rng(11, "dm.embed")
        table = {}

        def embed(ast):
            key = repr(ast)
            if key not in table:
                table[key] = rng.standard_normal(8)
            return table[key]

        dm = distance_matrix(embed, constant_corpus(2, 3), rng=make_rng(11, "dm"))
        np.testing.assert_allclose(dm.matrix, dm.matrix.T, atol=1e-6)
        np.testing.assert_allclose(np.diag(dm.matrix), 0.0, atol=1e-6)
        assert np.all(dm.matrix >= 0.0) and np.all(dm.matrix <= 2.0)

    def test_per_class_cap(self):
        dm = distance_matrix(lambda ast: np.ones(2), constant_corpus(2, 5),
                             per_class_cap=2, rng=make_rng(12, "dm"))
        assert dm.matrix.shape == (4, 4)
        assert dm.labels == ["class0", "class0", "class1", "class1"]

    def test_rows_grouped_by_class(self):
        dm = distance_matrix(lambda ast: np.ones(2), constant_corpus(3, 2),
                             rng=make_rng(13, "dm"))
        assert dm.labels == sorted(dm.labels)


class TestFileOutputs:
    def test_roc_csv(self, tmp_path):
        curve = roc_curve(ScoredPairs([0.9, 0.4], [0.6, 0.1]))
        path = tmp_path / "roc.csv"
        write_roc_csv(curve, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "threshold,fpr,tpr"
        assert len(lines) == len(curve.points) + 1
        threshold, fpr, tpr = lines[1].split(",")
        assert float(threshold) == np.inf
        assert float(fpr) == 0.0 and float(tpr) == 0.0

    def test_distance_csv(self, tmp_path):
        dm = DistanceMatrix(labels=["a", "b"],
                            matrix=np.array([[0.0, 0.25], [0.25, 0.0]]))
        path = tmp_path / "dm.csv"
        write_distance_csv(dm, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "a,b"
        assert [float(x) for x in lines[1].split(",")] == [0.0, 0.25]

    def test_distance_pgm(self, tmp_path):
        dm = DistanceMatrix(labels=["a", "b"],
                            matrix=np.array([[0.0, 0.5], [1.5, 0.0]]))
        path = tmp_path / "dm.pgm"
        write_distance_pgm(dm, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "P2"
        assert lines[1] == "2 2"
        assert lines[2] == "255"
        assert lines[3].split() == ["255", "128"]  # d=0 -> 255, d=0.5 -> ~128
        assert lines[4].split() == ["0", "255"]    # d>=1 clamps to 0
