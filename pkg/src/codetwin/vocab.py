"""Frequency-ranked token vocabulary with a corpus-coverage cutoff.

Tokens are ranked by count (ties broken lexicographically) and the smallest
prefix reaching the coverage target is kept; everything else encodes to UNK.
The two traversal delimiters are always present so tree structure survives
even aggressive cutoffs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus, FormatError
from .sbt import CLOSE, OPEN

PAD, UNK, SOS, EOS = 0, 1, 2, 3
SPECIALS = ["<PAD>", "<UNK>", "<SOS>", "<EOS>"]

DEFAULT_COVERAGE = 0.85
DEFAULT_MAX_LEN = 500


@dataclass
class Vocabulary:
    entries: list[tuple[str, int]]
    coverage_target: float
    achieved_coverage: float
    ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.ids = {label: len(SPECIALS) + i
                    for i, (label, _) in enumerate(self.entries)}

    def __len__(self):
        return len(SPECIALS) + len(self.entries)

    def id_of(self, label: str) -> int:
        return self.ids.get(label, UNK)


def count_tokens(corpus) -> dict[str, int]:
    """Exact token multiplicities over an iterable of SBT sequences."""
    counts = Counter()
    for seq in corpus:
        counts.update(seq)
    return dict(counts)


def build_vocab(counts: dict[str, int], coverage_target: float = DEFAULT_COVERAGE) -> Vocabulary:
    """Keep the smallest frequency-ranked prefix reaching the coverage target.

    The delimiters "(" and ")" are force-included afterward if the prefix
    missed them; entries are then re-sorted so ids stay in descending-count
    order.
    """
    if not 0 < coverage_target <= 1:
        raise ValueError(f"coverage_target must be in (0, 1], got {coverage_target}")
    total = sum(counts.values())
    if total == 0:
        raise EmptyCorpus("cannot build a vocabulary from zero tokens")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = []
    covered = 0
    for label, count in ranked:
        # Compare as a fraction so e.g. 8/10 meets a 0.8 target exactly.
        if covered / total >= coverage_target:
            break
        kept.append((label, count))
        covered += count
    present = {label for label, _ in kept}
    for delim in (OPEN, CLOSE):
        if delim not in present:
            kept.append((delim, counts.get(delim, 0)))
            covered += counts.get(delim, 0)
    kept.sort(key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(kept, coverage_target, covered / total)


def encode_sequence(vocab: Vocabulary, seq, max_len: int = DEFAULT_MAX_LEN) -> list[int]:
    """Map labels to ids, bracketed by SOS/EOS, truncating the body to fit."""
    if max_len < 3:
        raise ValueError(f"max_len must be >= 3, got {max_len}")
    body = [vocab.id_of(label) for label in seq[:max_len - 2]]
    return [SOS] + body + [EOS]


def save_vocab(vocab: Vocabulary, path) -> None:
    lines = [f"codetwin-vocab v1 coverage={vocab.achieved_coverage!r}"]
    for label, count in vocab.entries:
        lines.append(f"{label}\t{count}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_vocab(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("codetwin-vocab v1 coverage="):
        raise FormatError("missing codetwin-vocab v1 header")
    try:
        coverage = float(lines[0].split("coverage=", 1)[1])
    except ValueError as exc:
        raise FormatError("unreadable coverage in header") from exc
    entries = []
    seen = set()
    prev = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'label<TAB>count'")
        label, count_text = parts
        try:
            count = int(count_text)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad count {count_text!r}") from exc
        if count < 0:
            raise FormatError(f"line {lineno}: negative count")
        if label in seen:
            raise FormatError(f"line {lineno}: duplicate label {label!r}")
        if prev is not None and count > prev:
            raise FormatError(f"line {lineno}: counts must be non-increasing")
        seen.add(label)
        prev = count
        entries.append((label, count))
    if OPEN not in seen or CLOSE not in seen:
        raise FormatError("vocabulary must contain both traversal delimiters")
    # The file stores achieved coverage; the original target is not
    # recoverable, so it is taken to equal the achieved value.
    return Vocabulary(entries, coverage, coverage)
