"""Exception hierarchy shared across the toolkit."""


class CodetwinError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CodetwinError):
    """Lexing or parsing failure; always carries a source location."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class FormatError(CodetwinError):
    """Malformed external file (AST JSON, vocab file, checkpoint)."""


class InvalidRoot(CodetwinError):
    """AST operation applied to a tree whose root is not Module."""


class MalformedSbt(CodetwinError):
    """Token sequence is not a well-formed structure-based traversal."""


class EmptyCorpus(CodetwinError):
    """Operation requires a nonempty corpus."""


class ShapeMismatch(CodetwinError):
    """Tensor shape inconsistent with stored parameters."""


class EmptySequence(CodetwinError):
    """Encoder input must contain at least one token."""


class IdOutOfRange(CodetwinError):
    """Token id not covered by the embedding table."""


class ZeroVector(CodetwinError):
    """Cosine similarity undefined for (near-)zero vectors."""


class InsufficientClasses(CodetwinError):
    """Pair sampling needs at least two classes."""


class InsufficientSamples(CodetwinError):
    """Pair sampling needs at least two solutions in some class."""


class TooFewSolutions(CodetwinError):
    """Class too small to split into train and test."""


class VocabMismatch(CodetwinError):
    """Checkpoint was trained against a different vocabulary file."""


class NotApplicable(CodetwinError):
    """Transformation has no applicable site in the given AST."""


class EmptySide(CodetwinError):
    """ROC/AUC needs at least one positive and one negative score."""
