"""Structure-based traversal serialization and its inverse."""

import pytest

from codetwin.errors import MalformedSbt
from codetwin.pyparse import AstNode, parse_source
from codetwin.sbt import CLOSE, OPEN, node_label, sbt_parse, sbt_serialize


class TestNodeLabel:
    def test_kind_only_label(self):
        assert node_label(AstNode("Return")) == "Return"

    def test_name_label(self):
        assert node_label(AstNode("Name", "x")) == "Name_x"

    def test_binop_label(self):
        assert node_label(AstNode("BinOp", "Add")) == "BinOp_Add"

    def test_underscore_in_value_is_escaped(self):
        label = node_label(AstNode("Name", "my_var"))
        assert label == "Name_my__var"
        # the escape keeps the kind/value split unambiguous
        assert sbt_parse([OPEN, label, CLOSE, label]) == AstNode("Name", "my_var")


class TestSerialize:
    def test_leaf(self):
        assert sbt_serialize(AstNode("Num", "1")) == ["(", "Num_1", ")", "Num_1"]

    def test_one_child(self):
        tree = AstNode("Return", children=[AstNode("Num", "1")])
        assert sbt_serialize(tree) == [
            "(", "Return", "(", "Num_1", ")", "Num_1", ")", "Return"]

    def test_two_children(self):
        tree = AstNode("BinOp", "Add", [AstNode("Num", "1"), AstNode("Num", "2")])
        assert sbt_serialize(tree) == [
            "(", "BinOp_Add",
            "(", "Num_1", ")", "Num_1",
            "(", "Num_2", ")", "Num_2",
            ")", "BinOp_Add"]

    def test_length_is_four_times_node_count(self):
        tree = parse_source("def f(a):\n  return a + 1\n")
        assert len(sbt_serialize(tree)) == 4 * tree.node_count()

    def test_subtree_tokens_are_consecutive(self):
        tree = parse_source("x = 1 + 2\n")
        seq = sbt_serialize(tree)
        inner = sbt_serialize(tree.children[0].children[1])
        joined = "\x00".join(seq)
        assert "\x00".join(inner) in joined


class TestParse:
    def test_leaf_round_trip(self):
        assert sbt_parse(["(", "Num_1", ")", "Num_1"]) == AstNode("Num", "1")

    def test_nested_round_trip(self):
        tree = AstNode("Return", children=[AstNode("Num", "1")])
        assert sbt_parse(sbt_serialize(tree)) == tree

    def test_mismatched_close_label(self):
        with pytest.raises(MalformedSbt):
            sbt_parse(["(", "Return", ")", "Num_1"])

    def test_unbalanced_delimiters(self):
        with pytest.raises(MalformedSbt):
            sbt_parse(["(", "Return", "(", "Num_1", ")", "Num_1"])

    def test_trailing_tokens(self):
        with pytest.raises(MalformedSbt):
            sbt_parse(["(", "Num_1", ")", "Num_1", "(", "Num_2", ")", "Num_2"])

    def test_empty_sequence(self):
        with pytest.raises(MalformedSbt):
            sbt_parse([])


def test_round_trip_and_length_over_synthetic_corpus():
    """|SBT| = 4*nodes and parse(serialize(t)) == t across generated programs."""
    from codetwin.corpus import generate_synthetic

    corpus = generate_synthetic(8, 8, seed=21)
    for ast in corpus.asts():
        seq = sbt_serialize(ast)
        assert len(seq) == 4 * ast.node_count()
        assert sbt_parse(seq) == ast
