"""Corpus loading, splitting, and the synthetic clone generator."""

import numpy as np
import pytest

from codetwin.corpus import (LabeledCorpus, generate_synthetic, load_corpus,
                             split_corpus)
from codetwin.errors import TooFewSolutions
from codetwin.pyparse import unparse


def write_corpus(root, layout):
    for label, files in layout.items():
        d = root / label
        d.mkdir(parents=True)
        for name, text in files.items():
            (d / name).write_text(text)


class TestLoadCorpus:
    def test_empty_directory(self, tmp_path):
        corpus, report = load_corpus(tmp_path)
        assert corpus.classes == []
        assert report.skipped == []

    def test_two_classes_two_files_each(self, tmp_path):
        write_corpus(tmp_path, {
            "p1": {"a.py": "x = 1\n", "b.py": "x = 2\n"},
            "p2": {"a.py": "y = 1\n", "b.py": "y = 2\n"},
        })
        corpus, report = load_corpus(tmp_path)
        assert [label for label, _ in corpus.classes] == ["p1", "p2"]
        assert corpus.n_solutions() == 4
        assert report.skipped == []

    def test_solutions_are_wrapped_in_function(self, tmp_path):
        write_corpus(tmp_path, {"p1": {"a.py": "x = 1\n"}})
        corpus, _ = load_corpus(tmp_path)
        ast = corpus.classes[0][1][0][1]
        assert ast.children[0].kind == "FunctionDef"
        assert ast.children[0].value == "solution"

    def test_unparsable_file_skipped_and_reported(self, tmp_path):
        write_corpus(tmp_path, {
            "p1": {"good.py": "x = 1\n", "bad.py": "class C: pass\n"},
        })
        corpus, report = load_corpus(tmp_path)
        assert corpus.n_solutions() == 1
        assert len(report.skipped) == 1
        assert "bad.py" in report.lines()[0]
        assert report.lines()[0].startswith("SKIP ")

    def test_class_with_no_valid_solutions_dropped(self, tmp_path):
        write_corpus(tmp_path, {
            "p1": {"a.py": "x = 1\n"},
            "p2": {"bad.py": "import os\n"},
        })
        corpus, report = load_corpus(tmp_path)
        assert [label for label, _ in corpus.classes] == ["p1"]
        assert any("p2" in path for path, _ in report.skipped)

    def test_non_matching_suffixes_ignored(self, tmp_path):
        write_corpus(tmp_path, {"p1": {"a.py": "x = 1\n", "notes.txt": "hi"}})
        corpus, _ = load_corpus(tmp_path)
        assert corpus.n_solutions() == 1

    def test_json_corpus(self, tmp_path):
        from codetwin.pyparse import ast_to_json, parse_source

        d = tmp_path / "p1"
        d.mkdir()
        (d / "a.ast.json").write_text(ast_to_json(parse_source("x = 1\n")))
        corpus, report = load_corpus(tmp_path, use_json=True)
        assert corpus.n_solutions() == 1
        assert report.skipped == []

    def test_deterministic_order(self, tmp_path):
        write_corpus(tmp_path, {
            "zz": {"b.py": "x = 1\n", "a.py": "x = 2\n"},
            "aa": {"d.py": "y = 1\n", "c.py": "y = 2\n"},
        })
        corpus, _ = load_corpus(tmp_path)
        assert [label for label, _ in corpus.classes] == ["aa", "zz"]
        assert [sid for sid, _ in corpus.classes[0][1]] == ["c", "d"]


class TestSplitCorpus:
    def make(self, per_class=5, n_classes=2):
        return generate_synthetic(n_classes, per_class, seed=0)

    def test_ceiling_rule(self):
        split = split_corpus(self.make(per_class=5), 0.2, seed=0)
        for label, sols in split.test.classes:
            assert len(sols) == 1
        for label, sols in split.train.classes:
            assert len(sols) == 4

    def test_exact_fraction(self):
        split = split_corpus(self.make(per_class=60), 1 / 6, seed=0)
        assert all(len(s) == 10 for _, s in split.test.classes)
        assert all(len(s) == 50 for _, s in split.train.classes)

    def test_partition_is_disjoint_and_complete(self):
        corpus = self.make(per_class=7)
        split = split_corpus(corpus, 0.3, seed=1)
        for (label, orig), (_, tr), (_, te) in zip(
                corpus.classes, split.train.classes, split.test.classes):
            orig_ids = {sid for sid, _ in orig}
            train_ids = {sid for sid, _ in tr}
            test_ids = {sid for sid, _ in te}
            assert train_ids & test_ids == set()
            assert train_ids | test_ids == orig_ids

    def test_deterministic(self):
        corpus = self.make(per_class=9)
        s1 = split_corpus(corpus, 0.25, seed=5)
        s2 = split_corpus(corpus, 0.25, seed=5)
        for (_, a), (_, b) in zip(s1.test.classes, s2.test.classes):
            assert [sid for sid, _ in a] == [sid for sid, _ in b]

    def test_different_seeds_differ(self):
        corpus = self.make(per_class=20)
        s1 = split_corpus(corpus, 0.5, seed=1)
        s2 = split_corpus(corpus, 0.5, seed=2)
        ids1 = [sid for _, sols in s1.test.classes for sid, _ in sols]
        ids2 = [sid for _, sols in s2.test.classes for sid, _ in sols]
        assert ids1 != ids2

    def test_too_few_solutions_names_class(self):
        corpus = LabeledCorpus([("lonely", [("s0", None)]),
                                ("ok", [("s0", None), ("s1", None)])])
        with pytest.raises(TooFewSolutions, match="lonely"):
            split_corpus(corpus, 0.5, seed=0)

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError):
            split_corpus(self.make(), 0.0, seed=0)
        with pytest.raises(ValueError):
            split_corpus(self.make(), 1.0, seed=0)


class TestGenerateSynthetic:
    def test_shape(self):
        corpus = generate_synthetic(4, 6, seed=0)
        assert len(corpus.classes) == 4
        assert all(len(sols) == 6 for _, sols in corpus.classes)

    def test_byte_for_byte_deterministic(self):
        c1 = generate_synthetic(3, 5, seed=7)
        c2 = generate_synthetic(3, 5, seed=7)
        for (_, s1), (_, s2) in zip(c1.classes, c2.classes):
            for (_, a1), (_, a2) in zip(s1, s2):
                assert unparse(a1) == unparse(a2)

    def test_seeds_differ(self):
        c1 = generate_synthetic(2, 3, seed=1)
        c2 = generate_synthetic(2, 3, seed=2)
        texts1 = [unparse(a) for a in c1.asts()]
        texts2 = [unparse(a) for a in c2.asts()]
        assert texts1 != texts2

    def test_all_variants_parse_back(self):
        from codetwin.pyparse import parse_source

        corpus = generate_synthetic(8, 4, seed=3)
        for ast in corpus.asts():
            assert parse_source(unparse(ast)) == ast

    def test_preconditions(self):
        with pytest.raises(ValueError):
            generate_synthetic(1, 5, seed=0)
        with pytest.raises(ValueError):
            generate_synthetic(2, 1, seed=0)

    def test_cross_class_token_overlap_is_high(self):
        """Classes share their token pool: mean cross-class bag-of-tokens
        similarity must be >= 0.8 so structure, not tokens, carries class
        identity."""
        from codetwin import pipeline
        from codetwin.baseline import bag_of_tokens, baseline_similarity
        from codetwin.pyparse import wrap_in_function
        from codetwin.sbt import sbt_serialize

        corpus = generate_synthetic(6, 8, seed=0)
        wrapped = LabeledCorpus([(lab, [(sid, wrap_in_function(ast))
                                        for sid, ast in sols])
                                 for lab, sols in corpus.classes])
        vocab = pipeline.vocab_from_corpus(wrapped, 1.0)
        hists = [[bag_of_tokens(vocab, sbt_serialize(ast))
                  for _, ast in sols] for _, sols in wrapped.classes]
        sims = []
        for i in range(len(hists)):
            for j in range(i + 1, len(hists)):
                for hi in hists[i]:
                    for hj in hists[j]:
                        sims.append(baseline_similarity(hi, hj))
        assert np.mean(sims) >= 0.8
