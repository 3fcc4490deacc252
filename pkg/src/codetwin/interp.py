"""Tree-walking reference interpreter for the parser's Python subset.

Used only as a correctness oracle for the semantics-preserving
transformations: two programs are considered equivalent when running both
yields equal final module environments (function definitions excluded).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CodetwinError
from .pyparse import AstNode


class InterpError(CodetwinError):
    """Runtime failure in the reference interpreter (including step budget)."""


@dataclass
class Function:
    node: AstNode  # FunctionDef

    @property
    def params(self):
        return [a.value for a in self.node.children[0].children]


class _Return(Exception):
    def __init__(self, value):
        self.value = value


_CONSTANTS = {"True": True, "False": False, "None": None}
BUILTIN_NAMES = {"range", "len", "True", "False", "None"}


class _Machine:
    def __init__(self, max_steps):
        self.max_steps = max_steps
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise InterpError(f"step budget of {self.max_steps} exceeded")

    # --- expressions

    def eval(self, node, local, glob):
        self.tick()
        kind = node.kind
        if kind == "Num":
            return int(node.value)
        if kind == "Str":
            return node.value
        if kind == "Name":
            return self.lookup(node.value, local, glob)
        if kind == "List":
            return [self.eval(c, local, glob) for c in node.children]
        if kind == "BinOp":
            left = self.eval(node.children[0], local, glob)
            right = self.eval(node.children[1], local, glob)
            return self.binop(node.value, left, right)
        if kind == "BoolOp":
            if node.value == "And":
                value = True
                for child in node.children:
                    value = self.eval(child, local, glob)
                    if not value:
                        return value
                return value
            for child in node.children:
                value = self.eval(child, local, glob)
                if value:
                    return value
            return value
        if kind == "UnaryOp":
            operand = self.eval(node.children[0], local, glob)
            return (not operand) if node.value == "Not" else -operand
        if kind == "Compare":
            left = self.eval(node.children[0], local, glob)
            right = self.eval(node.children[1], local, glob)
            return self.compare(node.value, left, right)
        if kind == "Subscript":
            container = self.eval(node.children[0], local, glob)
            index = self.eval(node.children[1], local, glob)
            try:
                return container[index]
            except (IndexError, KeyError, TypeError) as exc:
                raise InterpError(f"subscript failed: {exc}") from exc
        if kind == "Call":
            return self.call(node, local, glob)
        raise InterpError(f"cannot evaluate node kind {kind!r}")

    def lookup(self, name, local, glob):
        if name in _CONSTANTS:
            return _CONSTANTS[name]
        if local is not None and name in local:
            return local[name]
        if name in glob:
            return glob[name]
        raise InterpError(f"undefined name {name!r}")

    @staticmethod
    def binop(op, left, right):
        try:
            if op == "Add":
                return left + right
            if op == "Sub":
                return left - right
            if op == "Mult":
                return left * right
            if op == "Div":
                return left / right
            if op == "FloorDiv":
                return left // right
            if op == "Mod":
                return left % right
        except (TypeError, ZeroDivisionError) as exc:
            raise InterpError(f"binary op {op} failed: {exc}") from exc
        raise InterpError(f"unknown binary op {op!r}")

    @staticmethod
    def compare(op, left, right):
        try:
            if op == "Lt":
                return left < right
            if op == "Gt":
                return left > right
            if op == "Le":
                return left <= right
            if op == "Ge":
                return left >= right
            if op == "Eq":
                return left == right
            if op == "NotEq":
                return left != right
        except TypeError as exc:
            raise InterpError(f"comparison {op} failed: {exc}") from exc
        raise InterpError(f"unknown comparison {op!r}")

    def call(self, node, local, glob):
        func_node = node.children[0]
        if func_node.kind != "Name":
            raise InterpError("only named functions can be called")
        name = func_node.value
        args = [self.eval(c, local, glob) for c in node.children[1:]]
        if name == "range" and name not in glob and (local is None or name not in local):
            try:
                return range(*args)
            except TypeError as exc:
                raise InterpError(f"range failed: {exc}") from exc
        if name == "len" and name not in glob and (local is None or name not in local):
            try:
                return len(args[0]) if len(args) == 1 else None
            except TypeError as exc:
                raise InterpError(f"len failed: {exc}") from exc
        target = self.lookup(name, local, glob)
        if not isinstance(target, Function):
            raise InterpError(f"{name!r} is not callable")
        if len(args) != len(target.params):
            raise InterpError(f"{name!r} expects {len(target.params)} arguments")
        frame = dict(zip(target.params, args))
        try:
            self.run_block(target.node.children[1:], frame, glob)
        except _Return as ret:
            return ret.value
        return None

    # --- statements

    def assign(self, target, value, local, glob):
        env = glob if local is None else local
        if target.kind == "Name":
            env[target.value] = value
        elif target.kind == "Subscript":
            container = self.eval(target.children[0], local, glob)
            index = self.eval(target.children[1], local, glob)
            try:
                container[index] = value
            except (IndexError, KeyError, TypeError) as exc:
                raise InterpError(f"subscript store failed: {exc}") from exc
        else:
            raise InterpError(f"invalid assignment target {target.kind!r}")

    def run_block(self, stmts, local, glob):
        for stmt in stmts:
            self.exec_stmt(stmt, local, glob)

    def exec_stmt(self, node, local, glob):
        self.tick()
        kind = node.kind
        if kind == "Assign":
            self.assign(node.children[0],
                        self.eval(node.children[1], local, glob), local, glob)
        elif kind == "AugAssign":
            target = node.children[0]
            current = self.eval(target, local, glob)
            value = self.eval(node.children[1], local, glob)
            self.assign(target, self.binop(node.value, current, value), local, glob)
        elif kind == "Expr":
            self.eval(node.children[0], local, glob)
        elif kind == "Return":
            value = self.eval(node.children[0], local, glob) if node.children else None
            raise _Return(value)
        elif kind == "If":
            if self.eval(node.children[0], local, glob):
                self.run_block(node.children[1].children, local, glob)
            else:
                self.run_block(node.children[2].children, local, glob)
        elif kind == "While":
            while self.eval(node.children[0], local, glob):
                self.run_block(node.children[1:], local, glob)
        elif kind == "For":
            iterable = self.eval(node.children[1], local, glob)
            if not isinstance(iterable, (list, str, range)):
                raise InterpError(f"cannot iterate over {type(iterable).__name__}")
            var = node.children[0].value
            env = glob if local is None else local
            for item in iterable:
                env[var] = item
                self.run_block(node.children[2:], local, glob)
        elif kind == "FunctionDef":
            env = glob if local is None else local
            env[node.value] = Function(node)
        else:
            raise InterpError(f"cannot execute node kind {kind!r}")


def exec_module(module: AstNode, env: dict | None = None,
                max_steps: int = 200_000) -> dict:
    """Execute a Module's statements; returns the final module environment.

    ``env`` seeds initial variable bindings (the "fixed inputs").
    """
    glob = dict(env) if env else {}
    machine = _Machine(max_steps)
    try:
        machine.run_block(module.children, None, glob)
    except _Return as exc:
        raise InterpError("return outside a function") from exc
    return glob


def final_environment(env: dict) -> dict:
    """Module environment restricted to plain values (functions dropped)."""
    return {k: v for k, v in env.items() if not isinstance(v, Function)}
