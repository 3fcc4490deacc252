"""Semantics-preserving AST transformations for synthesizing Type-IV clones.

Every transformation preserves the final module environment as checked by
the reference interpreter:

- rename_identifiers: consistent bijection over user identifiers
- for_to_while: counted `for i in range(k)` loops (literal k >= 1) become
  init/while/increment form, with a final counter fix-up so the loop
  variable ends at k-1 exactly as the for-loop leaves it
- swap_independent_stmts: adjacent simple statements with disjoint
  read/write sets exchange places
- wrap_redundant_if_true: a statement is enclosed in `if True:`
"""

from __future__ import annotations

import numpy as np

from .errors import NotApplicable
from .interp import BUILTIN_NAMES
from .pyparse import AstNode

TRANSFORM_KINDS = ("rename_identifiers", "for_to_while",
                   "swap_independent_stmts", "wrap_redundant_if_true")

# Shared across all synthetic classes so renames stay inside one token pool.
DEFAULT_IDENT_POOL = ["a", "b", "c", "d", "e", "g", "h", "i", "j", "k", "m",
                      "n", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z"]


def copy_ast(node: AstNode) -> AstNode:
    return AstNode(node.kind, node.value, [copy_ast(c) for c in node.children])


def _blocks(node, acc):
    """All (children-list, first-statement-index) pairs under ``node``."""
    if node.kind == "Module":
        acc.append((node.children, 0))
    elif node.kind == "FunctionDef":
        acc.append((node.children, 1))
    elif node.kind == "While":
        acc.append((node.children, 1))
    elif node.kind == "For":
        acc.append((node.children, 2))
    elif node.kind == "If":
        acc.append((node.children[1].children, 0))
        acc.append((node.children[2].children, 0))
    for child in node.children:
        _blocks(child, acc)
    return acc


def _expr_names(node, acc):
    if node.kind == "Name" and node.value not in BUILTIN_NAMES:
        acc.add(node.value)
    for child in node.children:
        _expr_names(child, acc)
    return acc


def _target_base(target):
    while target.kind == "Subscript":
        target = target.children[0]
    return target.value if target.kind == "Name" else None


def _has_user_call(node):
    """Calls to user functions may mutate list arguments; treat as impure."""
    if node.kind == "Call":
        fn = node.children[0]
        if fn.kind != "Name" or fn.value not in ("range", "len"):
            return True
    return any(_has_user_call(c) for c in node.children)


def _simple_rw(stmt):
    """(reads, writes) for a side-effect-free simple statement, else None."""
    if _has_user_call(stmt):
        return None
    if stmt.kind == "Assign":
        target, value = stmt.children
        # Subscript stores mutate a list that other names may alias; skip.
        if target.kind != "Name":
            return None
        reads = _expr_names(value, set())
        writes = {target.value}
    elif stmt.kind == "AugAssign":
        target, value = stmt.children
        if target.kind != "Name":
            return None
        reads = _expr_names(target, set()) | _expr_names(value, set())
        writes = {target.value}
    elif stmt.kind == "Expr":
        reads = _expr_names(stmt.children[0], set())
        writes = set()
    else:
        return None
    return reads, writes


def _deep_writes(node, acc):
    """Every name possibly written anywhere inside ``node``."""
    if node.kind in ("Assign", "AugAssign"):
        base = _target_base(node.children[0])
        if base is not None:
            acc.add(base)
    elif node.kind == "For":
        acc.add(node.children[0].value)
    elif node.kind == "FunctionDef":
        acc.add(node.value)
    for child in node.children:
        _deep_writes(child, acc)
    return acc


def collect_identifiers(node, acc=None):
    """User identifiers (builtins excluded): names, function names, params."""
    acc = set() if acc is None else acc
    if node.kind == "Name" and node.value not in BUILTIN_NAMES:
        acc.add(node.value)
    elif node.kind in ("FunctionDef", "arg"):
        acc.add(node.value)
    for child in node.children:
        collect_identifiers(child, acc)
    return acc


def rename_with_map(node: AstNode, mapping: dict[str, str]) -> AstNode:
    value = node.value
    if node.kind in ("Name", "FunctionDef", "arg") and value in mapping:
        value = mapping[value]
    return AstNode(node.kind, value,
                   [rename_with_map(c, mapping) for c in node.children])


def make_rename_map(ast: AstNode, rng: np.random.Generator,
                    pool=None) -> dict[str, str]:
    """Random bijection from the AST's user identifiers to pool names."""
    old = sorted(collect_identifiers(ast))
    if not old:
        raise NotApplicable("no user identifiers to rename")
    candidates = [name for name in (pool or DEFAULT_IDENT_POOL)
                  if name not in BUILTIN_NAMES]
    candidates = [candidates[i] for i in rng.permutation(len(candidates))]
    while len(candidates) < len(old):
        candidates.append(f"v{len(candidates)}")
    return dict(zip(old, candidates[:len(old)]))


def _rename(ast, rng, pool=None):
    return rename_with_map(ast, make_rename_map(ast, rng, pool))


def _for_sites(ast):
    sites = []
    for block, start in _blocks(ast, []):
        for idx in range(start, len(block)):
            stmt = block[idx]
            if stmt.kind != "For":
                continue
            target, it = stmt.children[0], stmt.children[1]
            if it.kind != "Call" or len(it.children) != 2:
                continue
            fn, bound = it.children
            if fn.kind != "Name" or fn.value != "range" or bound.kind != "Num":
                continue
            if int(bound.value) < 1:
                continue
            body = stmt.children[2:]
            if target.value in _deep_writes(AstNode("List", children=list(body)), set()):
                continue
            sites.append((block, idx))
    return sites


def _for_to_while(ast, rng):
    sites = _for_sites(ast)
    if not sites:
        raise NotApplicable("no counted for-loop with a literal positive bound")
    block, idx = sites[int(rng.integers(len(sites)))]
    for_node = block[idx]
    var = for_node.children[0].value
    bound = int(for_node.children[1].children[1].value)
    body = for_node.children[2:]
    increment = AstNode("Assign", children=[
        AstNode("Name", var),
        AstNode("BinOp", "Add", [AstNode("Name", var), AstNode("Num", "1")])])
    loop = AstNode("While", children=[
        AstNode("Compare", "Lt", [AstNode("Name", var),
                                  AstNode("Num", str(bound))])]
        + list(body) + [increment])
    init = AstNode("Assign", children=[AstNode("Name", var), AstNode("Num", "0")])
    # The for-loop leaves its variable at bound-1; restore that exactly.
    fixup = AstNode("Assign", children=[AstNode("Name", var),
                                        AstNode("Num", str(bound - 1))])
    block[idx:idx + 1] = [init, loop, fixup]
    return ast


def _swap_sites(ast):
    sites = []
    for block, start in _blocks(ast, []):
        for idx in range(start, len(block) - 1):
            rw1 = _simple_rw(block[idx])
            rw2 = _simple_rw(block[idx + 1])
            if rw1 is None or rw2 is None:
                continue
            reads1, writes1 = rw1
            reads2, writes2 = rw2
            if writes1 & (reads2 | writes2) or writes2 & reads1:
                continue
            sites.append((block, idx))
    return sites


def _swap(ast, rng):
    sites = _swap_sites(ast)
    if not sites:
        raise NotApplicable("no adjacent independent statement pair")
    block, idx = sites[int(rng.integers(len(sites)))]
    block[idx], block[idx + 1] = block[idx + 1], block[idx]
    return ast


def _wrap_if_true(ast, rng):
    sites = [(block, idx)
             for block, start in _blocks(ast, [])
             for idx in range(start, len(block))]
    if not sites:
        raise NotApplicable("no statement to wrap")
    block, idx = sites[int(rng.integers(len(sites)))]
    block[idx] = AstNode("If", children=[
        AstNode("Name", "True"),
        AstNode("List", children=[block[idx]]),
        AstNode("List")])
    return ast


def transform(ast: AstNode, kind: str, rng: np.random.Generator,
              pool=None) -> AstNode:
    """Apply one semantics-preserving transformation; the input is not
    mutated.  Raises NotApplicable when the AST offers no site."""
    work = copy_ast(ast)
    if kind == "rename_identifiers":
        return _rename(work, rng, pool)
    if kind == "for_to_while":
        return _for_to_while(work, rng)
    if kind == "swap_independent_stmts":
        return _swap(work, rng)
    if kind == "wrap_redundant_if_true":
        return _wrap_if_true(work, rng)
    raise ValueError(f"unknown transformation {kind!r}")
