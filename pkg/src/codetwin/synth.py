"""Synthetic clone-class generator.

Each class starts from one structural program schema instantiated with
identifiers and constants drawn from pools SHARED across all classes, so
class membership shows up in program structure rather than in which tokens
occur.  Per-class variants are derived by composing the semantics-preserving
transformations.
"""

from __future__ import annotations

import numpy as np

from .errors import NotApplicable
from .nn.rng import make_rng
from .pyparse import parse_source
from .transforms import DEFAULT_IDENT_POOL, copy_ast, transform

SHARED_CONST_POOL = [1, 2, 3, 4, 5, 6, 7, 8, 9]
SHARED_STR_POOL = ["a", "b", "ab", "x"]


def _idents(rng, count):
    picks = rng.choice(len(DEFAULT_IDENT_POOL), size=count, replace=False)
    return [DEFAULT_IDENT_POOL[i] for i in picks]


def _const(rng):
    return int(SHARED_CONST_POOL[rng.integers(len(SHARED_CONST_POOL))])


def _int_list(rng, low=6, high=10):
    n = int(rng.integers(low, high + 1))
    return "[" + ", ".join(str(_const(rng)) for _ in range(n)) + "]"


def _accumulation(rng):
    s, i = _idents(rng, 2)
    return (f"{s} = 0\n"
            f"for {i} in range({_const(rng)}):\n"
            f"    {s} = {s} + {i} * {_const(rng)}\n")


def _conditional_max(rng):
    xs, m, v = _idents(rng, 3)
    return (f"{xs} = {_int_list(rng)}\n"
            f"{m} = 0 - {_const(rng)}\n"
            f"for {v} in {xs}:\n"
            f"    if {v} > {m}:\n"
            f"        {m} = {v}\n")


def _nested_sum(rng):
    s, i, j = _idents(rng, 3)
    return (f"{s} = 0\n"
            f"for {i} in range({_const(rng)}):\n"
            f"    for {j} in range({_const(rng)}):\n"
            f"        {s} = {s} + {i} * {j} + {_const(rng)}\n")


def _string_building(rng):
    s, i = _idents(rng, 2)
    ch1 = SHARED_STR_POOL[rng.integers(len(SHARED_STR_POOL))]
    ch2 = SHARED_STR_POOL[rng.integers(len(SHARED_STR_POOL))]
    return (f'{s} = ""\n'
            f"for {i} in range({_const(rng)}):\n"
            f"    if {i} % 2 == 0:\n"
            f'        {s} = {s} + "{ch1}"\n'
            f"    else:\n"
            f'        {s} = {s} + "{ch2}"\n')


def _filtering(rng):
    xs, out, v = _idents(rng, 3)
    return (f"{xs} = {_int_list(rng)}\n"
            f"{out} = []\n"
            f"for {v} in {xs}:\n"
            f"    if {v} % {_const(rng)} == 0:\n"
            f"        {out} = {out} + [{v}]\n")


def _counting(rng):
    xs, c, v = _idents(rng, 3)
    return (f"{xs} = {_int_list(rng)}\n"
            f"{c} = 0\n"
            f"for {v} in {xs}:\n"
            f"    if {v} < {_const(rng)}:\n"
            f"        {c} = {c} + 1\n")


def _early_return_search(rng):
    xs, fn, tgt, i, pos = _idents(rng, 5)
    return (f"{xs} = {_int_list(rng)}\n"
            f"def {fn}({tgt}):\n"
            f"    {i} = 0\n"
            f"    while {i} < len({xs}):\n"
            f"        if {xs}[{i}] == {tgt}:\n"
            f"            return {i}\n"
            f"        {i} = {i} + 1\n"
            f"    return 0 - 1\n"
            f"{pos} = {fn}({_const(rng)})\n")


def _arithmetic_pipeline(rng):
    x, y, z, w = _idents(rng, 4)
    return (f"{x} = {_const(rng)}\n"
            f"{y} = {x} * {_const(rng)} + {_const(rng)}\n"
            f"{z} = {y} % {_const(rng)} + {y} // {_const(rng)}\n"
            f"{w} = {z} * {z} - {x}\n")


SCHEMAS = [
    ("accumulation", _accumulation),
    ("conditional_max", _conditional_max),
    ("nested_sum", _nested_sum),
    ("string_building", _string_building),
    ("filtering", _filtering),
    ("counting", _counting),
    ("early_return_search", _early_return_search),
    ("arithmetic_pipeline", _arithmetic_pipeline),
]

_VARIANT_TRANSFORMS = ["for_to_while", "swap_independent_stmts",
                       "wrap_redundant_if_true"]


def make_variant(base, rng: np.random.Generator):
    """One clone: consistent rename plus 1-3 structural transformations."""
    ast = transform(base, "rename_identifiers", rng)
    for _ in range(int(rng.integers(1, 4))):
        kind = _VARIANT_TRANSFORMS[int(rng.integers(len(_VARIANT_TRANSFORMS)))]
        try:
            ast = transform(ast, kind, rng)
        except NotApplicable:
            continue
    return ast


def generate_synthetic(k_classes: int, per_class: int, seed: int):
    """Seed-deterministic labeled corpus of synthetic clone classes.

    Returns a LabeledCorpus of unwrapped Module ASTs (one structural schema
    per class, identifiers/constants from the shared pools).
    """
    from .corpus import LabeledCorpus  # local import to avoid a cycle

    if k_classes < 2:
        raise ValueError("need at least 2 classes")
    if per_class < 2:
        raise ValueError("need at least 2 solutions per class")
    classes = []
    for idx in range(k_classes):
        schema_name, schema = SCHEMAS[idx % len(SCHEMAS)]
        rng = make_rng(seed, f"synth.class{idx}")
        base = parse_source(schema(rng))
        solutions = []
        for v in range(per_class):
            ast = copy_ast(base) if v == 0 else make_variant(base, rng)
            solutions.append((f"s{v:03d}", ast))
        classes.append((f"class{idx:02d}_{schema_name}", solutions))
    return LabeledCorpus(classes=classes,
                         provenance=f"synthetic(seed={seed})")
