"""Structure-based traversal: flatten an AST into a delimiter-bracketed
token sequence and (for testing the traversal's unambiguity) parse it back.

Each subtree serializes as ``"(" label ...children... ")" label``, so a tree
with N nodes always yields exactly 4N tokens and every subtree occupies a
consecutive slice of the sequence.
"""

from __future__ import annotations

from .errors import MalformedSbt
from .pyparse import VALUE_BEARING, AstNode

OPEN = "("
CLOSE = ")"


def node_label(node: AstNode) -> str:
    """Kind-only label, or kind fused with the value for value-bearing nodes.

    Underscores inside the value are doubled so the label splits back
    unambiguously at the first single underscore (node kinds contain none).
    """
    if node.value is None:
        return node.kind
    return node.kind + "_" + node.value.replace("_", "__")


def _split_label(label: str):
    sep = label.find("_")
    if sep < 0:
        return label, None
    kind = label[:sep]
    value = label[sep + 1:].replace("__", "_")
    return kind, value


def sbt_serialize(root: AstNode) -> list[str]:
    """Depth-first flattening with open/close delimiters around each subtree."""
    out = []

    def walk(node):
        label = node_label(node)
        out.append(OPEN)
        out.append(label)
        for child in node.children:
            walk(child)
        out.append(CLOSE)
        out.append(label)

    walk(root)
    return out


def sbt_parse(seq: list[str]) -> AstNode:
    """Reconstruct the labeled tree from a serialized sequence.

    Raises MalformedSbt on unbalanced delimiters or when the label after a
    ")" does not match the label after its matching "(".
    """
    pos = 0

    def parse_node():
        nonlocal pos
        if pos + 1 >= len(seq) or seq[pos] != OPEN:
            raise MalformedSbt(f"expected '(' at position {pos}")
        label = seq[pos + 1]
        pos += 2
        children = []
        while pos < len(seq) and seq[pos] == OPEN:
            children.append(parse_node())
        if pos + 1 >= len(seq) or seq[pos] != CLOSE:
            raise MalformedSbt(f"expected ')' at position {pos}")
        if seq[pos + 1] != label:
            raise MalformedSbt(
                f"close label {seq[pos + 1]!r} does not match open label {label!r}")
        pos += 2
        kind, value = _split_label(label)
        if value is None and kind in VALUE_BEARING:
            raise MalformedSbt(f"kind {kind!r} requires a value in its label")
        return AstNode(kind, value, children)

    root = parse_node()
    if pos != len(seq):
        raise MalformedSbt(f"trailing tokens at position {pos}")
    return root
