"""Labeled solution corpora: disk ingestion, train/test splitting, and the
synthetic clone generator (re-exported from synth).

Directory layout: ``root/<class_label>/<solution_id>.py`` (or
``.ast.json`` when loading pre-parsed trees from an external parser).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CodetwinError, FormatError, ParseError, TooFewSolutions
from .nn.rng import make_rng
from .pyparse import AstNode, ast_from_json, parse_source, wrap_in_function
from .synth import generate_synthetic  # noqa: F401  (public re-export)


@dataclass
class LabeledCorpus:
    classes: list[tuple[str, list[tuple[str, AstNode]]]]
    provenance: str = ""

    def n_solutions(self) -> int:
        return sum(len(sols) for _, sols in self.classes)

    def asts(self):
        for _, solutions in self.classes:
            for _, ast in solutions:
                yield ast


@dataclass
class LoadReport:
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def lines(self) -> list[str]:
        return [f"SKIP {path} {reason}" for path, reason in self.skipped]


@dataclass
class CorpusSplit:
    train: LabeledCorpus
    test: LabeledCorpus
    seed: int


def load_corpus(root_dir, use_json: bool = False):
    """Parse every solution file under root_dir; returns (corpus, report).

    Files are parsed then wrapped in a parameterless function definition
    named "solution".  Unparsable files are skipped and reported; classes
    left with zero valid solutions are dropped.
    """
    root = Path(root_dir)
    suffix = ".ast.json" if use_json else ".py"
    classes = []
    report = LoadReport()
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        solutions = []
        for path in sorted(class_dir.iterdir()):
            if not path.name.endswith(suffix):
                continue
            try:
                text = path.read_text(encoding="utf-8")
                module = ast_from_json(text) if use_json else parse_source(text)
                ast = wrap_in_function(module, "solution")
            except (ParseError, FormatError, CodetwinError, UnicodeDecodeError) as exc:
                report.skipped.append((str(path), str(exc)))
                continue
            solutions.append((path.name[:-len(suffix)], ast))
        if solutions:
            classes.append((class_dir.name, solutions))
        else:
            report.skipped.append((str(class_dir), "class has no valid solutions"))
    return LabeledCorpus(classes=classes, provenance=str(root)), report


def split_corpus(corpus: LabeledCorpus, test_fraction: float, seed: int) -> CorpusSplit:
    """Per-class disjoint train/test partition, ceil(fraction*n) to test."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = make_rng(seed, "split")
    train_classes = []
    test_classes = []
    for label, solutions in corpus.classes:
        n = len(solutions)
        if n < 2:
            raise TooFewSolutions(f"class {label!r} has {n} solution(s); need >= 2")
        # Small guard so e.g. (1/6)*60 = 10.000000000000002 still ceils to 10.
        n_test = math.ceil(test_fraction * n - 1e-9)
        order = rng.permutation(n)
        test_idx = sorted(order[:n_test])
        train_idx = sorted(order[n_test:])
        test_classes.append((label, [solutions[i] for i in test_idx]))
        train_classes.append((label, [solutions[i] for i in train_idx]))
    prov = corpus.provenance
    return CorpusSplit(
        train=LabeledCorpus(train_classes, provenance=f"{prov}/train"),
        test=LabeledCorpus(test_classes, provenance=f"{prov}/test"),
        seed=seed,
    )
